import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import euclidean
from tdaews import DistanceMatrix, PointCloud, ValidationError, distance_matrix, perturb_cloud, scale_cloud

clouds = st.integers(1, 12).flatmap(
    lambda n: st.integers(1, 5).flatmap(
        lambda d: arrays(np.float64, (n, d), elements=st.floats(-100, 100, allow_nan=False, width=64))
    )
)


def test_three_four_five():
    dm = distance_matrix(PointCloud(np.array([[0.0, 0.0], [3.0, 4.0]])))
    assert dm.entries[0, 1] == 5.0
    assert dm.entries[1, 0] == 5.0


def test_unit_square_entries(unit_square):
    e = distance_matrix(PointCloud(unit_square)).entries
    for i, j in [(0, 1), (1, 2), (2, 3), (0, 3)]:
        assert e[i, j] == 1.0
    assert e[0, 2] == math.sqrt(2.0)
    assert e[1, 3] == math.sqrt(2.0)


def test_matches_pointwise_formula(rng):
    pts = rng.normal(size=(15, 4))
    e = distance_matrix(PointCloud(pts)).entries
    for i in range(15):
        for j in range(15):
            assert e[i, j] == pytest.approx(euclidean(pts[i], pts[j]), rel=1e-14, abs=1e-15)


@given(clouds)
def test_symmetric_zero_diagonal(pts):
    e = distance_matrix(PointCloud(pts)).entries
    assert np.array_equal(e, e.T)
    assert np.all(np.diag(e) == 0)
    assert np.all(e >= 0)


@given(clouds, st.floats(1e-3, 1e3))
def test_scaling_commutes_with_distances(pts, factor):
    a = distance_matrix(scale_cloud(PointCloud(pts), factor)).entries
    b = factor * distance_matrix(PointCloud(pts)).entries
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * max(1.0, b.max()))


def test_scale_identity_and_square(unit_square):
    c = PointCloud(unit_square)
    assert scale_cloud(c, 1.0) == c
    e = distance_matrix(scale_cloud(c, 2.0)).entries
    assert e[0, 1] == 2.0


def test_scale_random_cloud_triples_distances(rng):
    c = PointCloud(rng.uniform(size=(10, 3)))
    a = distance_matrix(scale_cloud(c, 3.0)).entries
    iu = np.triu_indices(10, 1)
    assert len(iu[0]) == 45
    for i, j in zip(*iu):
        assert a[i, j] == pytest.approx(3.0 * euclidean(c.points[i], c.points[j]), rel=1e-12)


@pytest.mark.parametrize("factor", [0.0, -1.0, math.inf, math.nan])
def test_scale_rejects_bad_factor(unit_square, factor):
    with pytest.raises(ValidationError):
        scale_cloud(PointCloud(unit_square), factor)


def test_perturb_zero_and_determinism(rng):
    c = PointCloud(rng.normal(size=(20, 4)))
    assert perturb_cloud(c, 0.0, seed=3) == c
    assert perturb_cloud(c, 0.1, seed=3) == perturb_cloud(c, 0.1, seed=3)
    assert perturb_cloud(c, 0.1, seed=3) != perturb_cloud(c, 0.1, seed=4)


@given(clouds, st.floats(0, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_perturb_bounds(pts, delta, seed):
    c = PointCloud(pts)
    q = perturb_cloud(c, delta, seed)
    assert np.all(np.abs(q.points - c.points) <= delta * (1 + 1e-12) + 1e-12)
    change = np.abs(distance_matrix(q).entries - distance_matrix(c).entries)
    assert np.all(change <= 2 * delta * math.sqrt(c.dim) + 1e-9)


def test_perturb_rejects_negative(unit_square):
    with pytest.raises(ValidationError):
        perturb_cloud(PointCloud(unit_square), -0.1, seed=0)


def test_cloud_validation():
    with pytest.raises(ValidationError, match="point 1"):
        PointCloud(np.array([[0.0, 0.0], [np.nan, 1.0]]))
    with pytest.raises(ValidationError):
        PointCloud(np.zeros((0, 2)))
    with pytest.raises(ValidationError):
        PointCloud(np.zeros((2, 2, 2)))
    # a flat array is a cloud on the line
    assert PointCloud(np.zeros(3)).dim == 1


def test_coincident_points_allowed():
    e = distance_matrix(PointCloud(np.zeros((3, 2)))).entries
    assert np.all(e == 0)


def test_distance_matrix_validation():
    with pytest.raises(ValidationError):
        DistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValidationError):
        DistanceMatrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValidationError):
        DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    assert DistanceMatrix(np.array([[0.0, 2.0], [2.0, 0.0]])).diameter() == 2.0


def test_cloud_is_read_only(unit_square):
    c = PointCloud(unit_square)
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0
