"""Point clouds and Euclidean distance matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``size`` points in ``R^dim`` stored as a read-only ``(size, dim)`` array."""

    points: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValidationError(f"point cloud must be a non-empty 2-D array, got shape {pts.shape}")
        bad = ~np.isfinite(pts).all(axis=1)
        if bad.any():
            raise ValidationError(f"non-finite coordinate in point {int(np.flatnonzero(bad)[0])}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric ``n x n`` matrix of pairwise distances with a zero diagonal."""

    entries: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=np.float64, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValidationError(f"distance matrix must be square and non-empty, got shape {m.shape}")
        if not np.isfinite(m).all() or (m < 0).any():
            raise ValidationError("distance matrix entries must be finite and non-negative")
        if not np.array_equal(m, m.T):
            raise ValidationError("distance matrix must be symmetric")
        if (np.diag(m) != 0).any():
            raise ValidationError("distance matrix must have a zero diagonal")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def diameter(self) -> float:
        return float(self.entries.max())


def distance_matrix(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distances between every pair of points of ``cloud``.

    The upper triangle is computed from coordinate differences and mirrored,
    so the result is exactly symmetric.
    """
    pts = cloud.points
    n = pts.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    diff = pts[iu] - pts[ju]
    upper = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    m = np.zeros((n, n), dtype=np.float64)
    m[iu, ju] = upper
    m[ju, iu] = upper
    return DistanceMatrix(m)


def _check_factor(factor: float) -> float:
    f = float(factor)
    if not math.isfinite(f) or f <= 0:
        raise ValidationError(f"scale factor must be positive and finite, got {factor!r}")
    return f


def scale_cloud(cloud: PointCloud, factor: float) -> PointCloud:
    """Multiply every coordinate by ``factor`` (> 0)."""
    return PointCloud(cloud.points * _check_factor(factor))


def perturb_cloud(cloud: PointCloud, magnitude: float, seed: int) -> PointCloud:
    """Displace every coordinate by an independent ``U[-magnitude, magnitude]`` draw.

    The displacement is deterministic for a given ``seed``.
    """
    mag = float(magnitude)
    if not math.isfinite(mag) or mag < 0:
        raise ValidationError(f"perturbation magnitude must be finite and >= 0, got {magnitude!r}")
    if mag == 0:
        return PointCloud(cloud.points)
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-mag, mag, size=cloud.points.shape)
    return PointCloud(cloud.points + shift)
