import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from tdaews import InsufficientDataError, ValidationError, mann_kendall, pre_event_trend, rolling_indicators
from tdaews.ews import INDICATORS, IndicatorSeries, low_frequency_power

distinct_series = arrays(
    np.float64, st.integers(3, 40), elements=st.floats(-1e3, 1e3, allow_nan=False, width=64), unique=True
)


def periodogram(x):
    x = np.asarray(x, dtype=float)
    t = np.arange(len(x))
    x = x - np.polyval(np.polyfit(t, x, 1), t)
    return (np.abs(np.fft.rfft(x)) ** 2 / len(x))[1:]


def test_constant_window_variance_zero():
    ind = rolling_indicators(np.full(60, 3.0), window=20)
    assert np.all(ind.variance == 0)
    assert np.all(ind.acf1 == 0)
    assert ind.degenerate.all()


def test_low_frequency_tone():
    n = 500
    x = np.cos(2 * np.pi * np.arange(n) / n)
    low = low_frequency_power(x[None, :], 0.1)[0]
    pg = periodogram(x)
    high = pg[-int(math.ceil(0.1 * len(pg))):].mean()
    assert low / high > 10


def test_low_frequency_matches_periodogram(rng):
    x = rng.normal(size=200)
    pg = periodogram(x)
    k = math.ceil(0.1 * 200 / 2)
    assert low_frequency_power(x[None, :], 0.1)[0] == pytest.approx(pg[:k].mean(), rel=1e-12)


def test_ar1_lag_one_autocorrelation():
    rng = np.random.default_rng(11)
    n = 5000
    x = np.zeros(n)
    eps = rng.normal(size=n)
    for t in range(1, n):
        x[t] = 0.9 * x[t - 1] + eps[t]
    ind = rolling_indicators(x[500:], window=500)
    assert ind.acf1.mean() == pytest.approx(0.9, abs=0.05)


def test_white_noise_acf_near_zero(rng):
    ind = rolling_indicators(rng.normal(size=3000), window=500)
    assert abs(ind.acf1.mean()) < 3 / math.sqrt(500)


def test_variance_matches_numpy(rng):
    x = rng.normal(size=120)
    ind = rolling_indicators(x, window=40)
    assert len(ind.dates) == 81
    for t in (0, 40, 80):
        assert ind.variance[t] == pytest.approx(np.var(x[t : t + 40], ddof=1), rel=1e-12)


def test_indicator_invariants(rng):
    x = rng.normal(size=300).cumsum()
    base = rolling_indicators(x, window=100)
    shifted = rolling_indicators(x + 50.0, window=100)
    scaled = rolling_indicators(3.0 * x, window=100)
    affine = rolling_indicators(2.5 * x - 7.0, window=100)
    np.testing.assert_allclose(shifted.variance, base.variance, rtol=1e-8)
    np.testing.assert_allclose(shifted.low_freq_power, base.low_freq_power, rtol=1e-8)
    np.testing.assert_allclose(scaled.variance, 9.0 * base.variance, rtol=1e-10)
    np.testing.assert_allclose(affine.acf1, base.acf1, rtol=1e-9, atol=1e-12)


def test_indicator_dates_and_validation(rng):
    x = rng.normal(size=50)
    ind = rolling_indicators(x, window=10, dates=np.arange(100, 150))
    np.testing.assert_array_equal(ind.dates, np.arange(109, 150))
    with pytest.raises(InsufficientDataError):
        rolling_indicators(x, window=51)
    with pytest.raises(ValidationError):
        rolling_indicators(x, window=10, low_freq_fraction=0.0)
    with pytest.raises(ValidationError):
        rolling_indicators(np.append(x, np.nan), window=10)


def test_hann_taper_changes_estimate(rng):
    x = rng.normal(size=200)
    a = rolling_indicators(x, window=100).low_freq_power
    b = rolling_indicators(x, window=100, taper="hann").low_freq_power
    assert not np.allclose(a, b)
    with pytest.raises(ValidationError):
        rolling_indicators(x, window=100, taper="box")


def test_mann_kendall_examples():
    up = mann_kendall(np.arange(250.0))
    assert up.tau == 1.0 and up.s_statistic == 250 * 249 // 2
    assert mann_kendall(-np.arange(250.0)).tau == -1.0
    r = mann_kendall([1, 3, 2, 4])
    assert r.s_statistic == 4
    assert r.tau == 2 / 3


def test_mann_kendall_small_sample_statistics():
    r = mann_kendall([1, 3, 2, 4])
    var_s = 4 * 3 * 13 / 18
    assert r.z_score == pytest.approx(3 / math.sqrt(var_s), rel=1e-14)
    assert r.p_value == pytest.approx(2 * stats.norm.sf(r.z_score), rel=1e-12)


def test_mann_kendall_ties_match_scipy(rng):
    x = rng.integers(0, 5, size=60).astype(float)
    r = mann_kendall(x)
    assert r.tau == pytest.approx(stats.kendalltau(np.arange(60), x).statistic, rel=1e-12)


def test_mann_kendall_all_tied():
    r = mann_kendall([2.0, 2.0, 2.0])
    assert r.tau == 0.0 and r.p_value == 1.0
    with pytest.raises(InsufficientDataError):
        mann_kendall([1.0])


@given(distinct_series)
@settings(max_examples=60)
def test_mann_kendall_rank_invariance(x):
    a = mann_kendall(x)
    # a strictly increasing map that cannot collapse distinct floats
    ranks = np.argsort(np.argsort(x)).astype(float)
    b = mann_kendall(ranks**3 + 0.5)
    assert a.s_statistic == b.s_statistic and a.tau == b.tau
    rev = mann_kendall(x[::-1])
    assert rev.s_statistic == -a.s_statistic and rev.tau == -a.tau
    assert a.tau == pytest.approx(stats.kendalltau(np.arange(len(x)), x).statistic, abs=1e-12)


def index_indicators(n):
    t = np.arange(n, dtype=float)
    return IndicatorSeries(np.arange(n), t, t, t, window=1)


def test_pre_event_trend_monotone():
    ind = index_indicators(400)
    reports = pre_event_trend(ind, 399, span=250)
    assert set(reports) == set(INDICATORS)
    for rep in reports.values():
        assert rep.tau == 1.0 and rep.span == 250 and rep.n == 250


def test_pre_event_excludes_event_day():
    t = np.arange(10, dtype=float)
    vals = t.copy()
    vals[5] = -100.0  # the event-day value must not enter the window
    ind = IndicatorSeries(np.arange(10), vals, vals, vals, window=1)
    assert pre_event_trend(ind, 5, span=5)["variance"].tau == 1.0


def test_pre_event_errors():
    ind = index_indicators(100)
    with pytest.raises(InsufficientDataError):
        pre_event_trend(ind, 50, span=250)
    with pytest.raises(ValidationError):
        pre_event_trend(ind, 500, span=10)


def test_pre_event_iso_dates():
    dates = np.arange(np.datetime64("2000-01-01"), np.datetime64("2000-03-01"))
    t = np.arange(len(dates), dtype=float)
    ind = IndicatorSeries(dates, t, t, -t, window=1)
    rep = pre_event_trend(ind, "2000-02-15", span=30)
    assert rep["variance"].tau == 1.0 and rep["acf1"].tau == -1.0
    with pytest.raises(ValidationError):
        pre_event_trend(ind, "1999-12-01", span=30)
