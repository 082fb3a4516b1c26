import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from oracles import grid_landscape
from tdaews import (
    PersistenceDiagram,
    PersistenceLandscape,
    ValidationError,
    bottleneck_distance,
    landscape_from_diagram,
    landscape_from_pairs,
    lp_norm,
    sup_distance,
)
from tdaews.landscape import lp_norms, tent_values

pair_lists = st.lists(
    st.tuples(st.floats(0, 10), st.floats(0.01, 5)).map(lambda t: (t[0], t[0] + t[1])), min_size=1, max_size=20
)


def random_pairs(rng, k):
    b = rng.uniform(0, 5, size=k)
    return np.column_stack([b, b + rng.uniform(0.05, 3, size=k)])


def kth_tent(pairs, k, x):
    vals = sorted((max(0.0, min(x - b, d - x)) for b, d in pairs), reverse=True)
    return vals[k] if k < len(vals) else 0.0


def quad_norm(pairs, p):
    """``(sum_k int lambda_k^p)^(1/p)`` by adaptive quadrature of the defining formula."""
    # lambda_k is linear between the points where two tent pieces meet or a tent hits zero
    cuts = {v for b, d in pairs for v in (b, d)}
    cuts |= {(b + d) / 2 for b, _ in pairs for _, d in pairs}
    cuts = sorted(cuts)
    total = 0.0
    for k in range(len(pairs)):
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, _ = integrate.quad(lambda x: kth_tent(pairs, k, x) ** p, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
            total += val
    return total ** (1.0 / p)


def test_single_tent():
    land = landscape_from_pairs([(0.0, 2.0)])
    assert len(land.levels) == 1
    np.testing.assert_array_equal(land.levels[0], [[0, 0], [1, 1], [2, 0]])
    assert lp_norm(land, 1) == 1.0
    assert lp_norm(land, 2) == pytest.approx(math.sqrt(2 / 3), rel=1e-15)


def test_empty_landscape():
    land = landscape_from_diagram(PersistenceDiagram.empty())
    assert land.levels == ()
    assert lp_norm(land, 1) == 0.0 and lp_norm(land, 2) == 0.0
    assert land.evaluate(np.array([0.0, 1.0])).shape[-1] == 2


def test_nested_tents():
    land = landscape_from_pairs([(0.0, 4.0), (1.0, 3.0)])
    x = np.linspace(-1, 5, 121)
    np.testing.assert_allclose(land.evaluate(x, 0), tent_values([(0, 4)], x)[:, 0], atol=1e-15)
    np.testing.assert_allclose(land.evaluate(x, 1), tent_values([(1, 3)], x)[:, 0], atol=1e-15)


@pytest.mark.parametrize("b,d", [(0.0, 2.0), (1.0, math.sqrt(2)), (3.5, 9.25)])
def test_tent_closed_form(b, d):
    h = (d - b) / 2
    land = landscape_from_pairs([(b, d)])
    assert lp_norm(land, 1) == pytest.approx(h * h, rel=1e-14)
    assert lp_norm(land, 2) == pytest.approx(math.sqrt(2 * h**3 / 3), rel=1e-14)


def test_unit_square_norm():
    h = (math.sqrt(2) - 1) / 2
    land = landscape_from_pairs([(1.0, math.sqrt(2))])
    assert abs(lp_norm(land, 1) - h * h) < 1e-12
    assert abs(lp_norm(land, 2) - math.sqrt(2 * h**3 / 3)) < 1e-12


def test_matches_grid_oracle(rng):
    for _ in range(20):
        pairs = random_pairs(rng, int(rng.integers(1, 21)))
        grid = np.linspace(-0.5, 9, 1901)
        land = landscape_from_pairs(pairs)
        want = grid_landscape(pairs, grid)
        got = np.array([land.evaluate(grid, k) for k in range(len(pairs))])
        np.testing.assert_allclose(got, want, atol=1e-12)


@given(pair_lists)
@settings(max_examples=40, deadline=None)
def test_levels_monotone(pairs):
    land = landscape_from_pairs(pairs)
    xs = np.unique(np.concatenate([lv[:, 0] for lv in land.levels]))
    vals = np.array([land.evaluate(xs, k) for k in range(len(land.levels) + 1)])
    assert np.all(vals[:-1] >= vals[1:] - 1e-12)
    assert np.all(vals[-1] == 0)


def test_norm_matches_quadrature(rng):
    for _ in range(12):
        pairs = [tuple(r) for r in random_pairs(rng, int(rng.integers(1, 8)))]
        land = landscape_from_pairs(pairs)
        for p in (1, 2):
            assert abs(lp_norm(land, p) - quad_norm(pairs, p)) < 1e-9


@given(pair_lists, st.sampled_from([0.5, 2.0, 10.0]))
@settings(max_examples=40, deadline=None)
def test_norm_scaling(pairs, factor):
    a = landscape_from_pairs(pairs)
    b = landscape_from_pairs([(factor * x, factor * y) for x, y in pairs])
    for p in (1, 2):
        assert lp_norm(b, p) == pytest.approx(factor ** (1 + 1 / p) * lp_norm(a, p), rel=1e-10)


def test_lp_norms_and_bad_p():
    land = landscape_from_pairs([(0.0, 2.0)])
    assert lp_norms(land) == (lp_norm(land, 1), lp_norm(land, 2))
    with pytest.raises(ValidationError):
        lp_norm(land, 3)


def test_sup_distance_examples():
    a = landscape_from_pairs([(0.0, 2.0)])
    b = landscape_from_pairs([(0.0, 4.0)])
    assert sup_distance(a, a) == 0.0
    # the peaks are 1 at x=1 and 2 at x=2, so the difference peaks at x=2 with value 2
    assert sup_distance(a, b) == 2.0
    assert sup_distance(a, PersistenceLandscape()) == 1.0


@given(pair_lists, pair_lists)
@settings(max_examples=60, deadline=None)
def test_sup_distance_bounded_by_bottleneck(a, b):
    da, db = PersistenceDiagram.from_pairs(a), PersistenceDiagram.from_pairs(b)
    la, lb = landscape_from_diagram(da), landscape_from_diagram(db)
    assert sup_distance(la, lb) <= bottleneck_distance(da, db) + 1e-12


def test_sup_distance_under_shift(rng):
    for _ in range(30):
        pairs = random_pairs(rng, 10)
        delta = float(rng.uniform(0, 0.2))
        shifted = pairs + rng.uniform(-delta, delta, size=pairs.shape)
        shifted[:, 1] = np.maximum(shifted[:, 1], shifted[:, 0])
        assert sup_distance(landscape_from_pairs(pairs), landscape_from_pairs(shifted)) <= delta + 1e-12


def test_essential_points_ignored():
    dgm = PersistenceDiagram(
        np.array([1, 1]), np.array([0.0, 1.0]), np.array([2.0, 5.0]), np.array([False, True])
    )
    assert lp_norm(landscape_from_diagram(dgm), 1) == 1.0


def test_landscape_csv(tmp_path):
    land = landscape_from_pairs([(0.0, 4.0), (1.0, 3.0)])
    text = land.to_csv(tmp_path / "l.csv")
    lines = text.splitlines()
    assert lines[0] == "level,x,y"
    assert lines[1] == "1,0,0"
    assert (tmp_path / "l.csv").read_text() == text
