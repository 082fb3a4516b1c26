"""Rolling early-warning indicators and Mann-Kendall trend statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InsufficientDataError, ValidationError

__all__ = [
    "INDICATORS",
    "IndicatorSeries",
    "TrendReport",
    "rolling_indicators",
    "low_frequency_power",
    "mann_kendall",
    "pre_event_trend",
]

INDICATORS = ("variance", "low_freq_power", "acf1")


@dataclass(frozen=True, eq=False)
class IndicatorSeries:
    """Indicators per rolling window, dated by the window's last observation."""

    dates: np.ndarray
    variance: npt.NDArray[np.float64]
    low_freq_power: npt.NDArray[np.float64]
    acf1: npt.NDArray[np.float64]
    window: int = 500
    low_freq_fraction: float = 0.1
    degenerate: npt.NDArray[np.bool_] | None = None

    def __len__(self) -> int:
        return int(self.variance.shape[0])

    def column(self, name: str) -> npt.NDArray[np.float64]:
        if name not in INDICATORS:
            raise ValidationError(f"unknown indicator {name!r}; expected one of {', '.join(INDICATORS)}")
        return getattr(self, name)


@dataclass(frozen=True)
class TrendReport:
    tau: float
    s_statistic: int
    z_score: float
    p_value: float
    span: int
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def _linear_detrend(win: np.ndarray) -> np.ndarray:
    """Remove the least-squares line from every row of ``win``."""
    n = win.shape[-1]
    t = np.arange(n, dtype=np.float64) - (n - 1) / 2
    mean = win.mean(axis=-1, keepdims=True)
    slope = (win @ t) / (t @ t)
    return win - mean - slope[..., None] * t


def low_frequency_power(windows: npt.ArrayLike, fraction: float = 0.1, taper: str | None = None) -> npt.NDArray[np.float64]:
    """Mean periodogram power over the lowest nonzero frequencies of each detrended row.

    The band is the first ``ceil(fraction * n / 2)`` Fourier frequencies
    ``k / n`` with ``k >= 1``. Power is ``|X_k|^2 / sum(taper^2)`` (``n`` when
    untapered).
    """
    win = np.atleast_2d(np.asarray(windows, dtype=np.float64))
    n = win.shape[-1]
    if not 0 < fraction <= 0.5:
        raise ValidationError(f"low_freq_fraction must be in (0, 0.5], got {fraction}")
    if n < 4:
        raise InsufficientDataError(f"window of {n} points is too short for a periodogram")
    x = _linear_detrend(win)
    if taper is None:
        norm = float(n)
    elif taper == "hann":
        h = np.hanning(n)
        x = x * h
        norm = float(h @ h)
    else:
        raise ValidationError(f"unknown taper {taper!r}")
    k = max(1, math.ceil(fraction * (n / 2)))
    coef = np.fft.rfft(x, axis=-1)[..., 1 : k + 1]
    return (coef.real**2 + coef.imag**2).mean(axis=-1) / norm


def rolling_indicators(
    series: npt.ArrayLike,
    window: int = 500,
    low_freq_fraction: float = 0.1,
    dates: npt.ArrayLike | None = None,
    taper: str | None = None,
) -> IndicatorSeries:
    """Variance, low-frequency power and lag-1 autocorrelation over a rolling window.

    Variance is the unbiased estimator. The lag-1 autocorrelation of the
    demeaned window is ``sum(x_t x_{t+1}) / sum(x_t^2)``; constant windows get
    0 and are flagged in ``degenerate``.
    """
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if not np.isfinite(x).all():
        raise ValidationError("indicator input must be finite")
    if not isinstance(window, (int, np.integer)) or window < 4:
        raise ValidationError(f"indicator window must be an integer >= 4, got {window!r}")
    if window > len(x):
        raise InsufficientDataError(f"indicator window {window} exceeds the {len(x)} available values")
    if dates is None:
        dates = np.arange(len(x))
    dates = np.asarray(dates)
    if dates.shape != x.shape:
        raise ValidationError(f"{len(dates)} dates for {len(x)} values")

    win = sliding_window_view(x, window)
    centred = win - win.mean(axis=1, keepdims=True)
    ss = np.einsum("ij,ij->i", centred, centred)
    variance = ss / (window - 1)
    lag = np.einsum("ij,ij->i", centred[:, :-1], centred[:, 1:])
    # exact zero only for constant windows; tiny ss from rounding is still a real variance
    degenerate = ss == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        acf1 = np.where(degenerate, 0.0, lag / np.where(degenerate, 1.0, ss))
    acf1 = np.clip(acf1, -1.0, 1.0)
    power = low_frequency_power(win, low_freq_fraction, taper=taper)
    return IndicatorSeries(
        dates=dates[window - 1 :].copy(),
        variance=variance,
        low_freq_power=power,
        acf1=acf1,
        window=int(window),
        low_freq_fraction=float(low_freq_fraction),
        degenerate=degenerate,
    )


def _normal_two_sided(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


def mann_kendall(series: npt.ArrayLike) -> TrendReport:
    """Mann-Kendall test for a monotone trend against time order.

    ``tau`` is ``S / sqrt(n0 (n0 - n1))`` with ``n0 = n(n-1)/2`` and ``n1``
    the tied-pair count, so it equals ``S / n0`` without ties. The z-score
    uses the tie-corrected variance of ``S`` with a continuity correction of
    one; the p-value is two-sided.
    """
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    n = len(x)
    if n < 2:
        raise InsufficientDataError(f"Mann-Kendall needs at least 2 values, got {n}")
    if not np.isfinite(x).all():
        raise ValidationError("Mann-Kendall input must be finite")
    s = 0
    for i in range(n - 1):
        s += int(np.sign(x[i + 1 :] - x[i]).sum())
    _, counts = np.unique(x, return_counts=True)
    n0 = n * (n - 1) // 2
    n1 = int((counts * (counts - 1) // 2).sum())
    var_s = (n * (n - 1) * (2 * n + 5) - float((counts * (counts - 1) * (2 * counts + 5)).sum())) / 18.0
    if n1 == n0:
        return TrendReport(0.0, 0, 0.0, 1.0, n, n)
    tau = s / math.sqrt(n0 * (n0 - n1))
    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0
    return TrendReport(float(tau), int(s), float(z), float(_normal_two_sided(z)), n, n)


def pre_event_trend(indicators: IndicatorSeries, event_date, span: int = 250) -> dict[str, TrendReport]:
    """Mann-Kendall of each indicator over the ``span`` values strictly before ``event_date``."""
    dates = indicators.dates
    if dates.dtype.kind == "M":
        event = np.datetime64(event_date, "D")
    else:
        event = np.asarray(event_date, dtype=dates.dtype)
    if len(dates) == 0 or event < dates[0] or event > dates[-1]:
        lo, hi = (dates[0], dates[-1]) if len(dates) else ("-", "-")
        raise ValidationError(f"event date {event} is outside the indicator range {lo} .. {hi}")
    if span < 2:
        raise ValidationError(f"span must be at least 2, got {span}")
    end = int(np.searchsorted(dates, event, side="left"))
    if end < span:
        raise InsufficientDataError(
            f"only {end} indicator values precede {event}, {span} required"
        )
    out = {}
    for name in INDICATORS:
        rep = mann_kendall(indicators.column(name)[end - span : end])
        out[name] = TrendReport(rep.tau, rep.s_statistic, rep.z_score, rep.p_value, span, rep.n)
    return out
