"""Exact persistence landscapes and their L^1 / L^2 norms.

A level is stored as its polyline vertices. Between consecutive critical
abscissae (births, deaths, midpoints, and the crossings ``(b_i + d_j) / 2`` of
a rising edge with a falling edge) no two tents cross, so each level is the
same tent there and hence linear. Evaluating every tent on that finite set
and sorting pointwise therefore gives the levels exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import ValidationError
from .persistence import PersistenceDiagram

__all__ = [
    "PersistenceLandscape",
    "landscape_from_diagram",
    "landscape_from_pairs",
    "tent_values",
    "lp_norm",
    "sup_distance",
]


@dataclass(frozen=True, eq=False)
class PersistenceLandscape:
    """Levels ``lambda_1 >= lambda_2 >= ...`` as ``(m_k, 2)`` vertex arrays.

    Each level is zero outside ``[x[0], x[-1]]`` and linear between vertices.
    An empty tuple is the zero landscape.
    """

    levels: tuple[npt.NDArray[np.float64], ...] = ()

    def __len__(self) -> int:
        return len(self.levels)

    def evaluate(self, x: npt.ArrayLike, k: int | None = None) -> npt.NDArray[np.float64]:
        """Values of level ``k`` (0-based) at ``x``, or of every level stacked when ``k`` is None."""
        xs = np.asarray(x, dtype=np.float64)
        if k is not None:
            if k >= len(self.levels):
                return np.zeros_like(xs)
            lv = self.levels[k]
            return np.interp(xs, lv[:, 0], lv[:, 1], left=0.0, right=0.0)
        if not self.levels:
            return np.zeros((0,) + xs.shape)
        return np.stack([np.interp(xs, lv[:, 0], lv[:, 1], left=0.0, right=0.0) for lv in self.levels])

    def to_csv(self, path: str | Path | None = None) -> str:
        """``level,x,y`` rows listing every vertex, levels numbered from 1."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "x", "y"])
        for k, lv in enumerate(self.levels, start=1):
            for x, y in lv:
                w.writerow([k, f"{x:.17g}", f"{y:.17g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def tent_values(pairs: npt.ArrayLike, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """``(len(x), n_pairs)`` matrix of tent heights ``max(0, min(x - b, d - x))``."""
    pr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    xs = np.asarray(x, dtype=np.float64).reshape(-1, 1)
    return np.maximum(0.0, np.minimum(xs - pr[:, 0], pr[:, 1] - xs))


def _simplify(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Trim zero stretches and drop vertices where the slope does not change."""
    pos = np.flatnonzero(ys > 0)
    lo, hi = max(pos[0] - 1, 0), min(pos[-1] + 1, len(xs) - 1)
    xs, ys = xs[lo : hi + 1], ys[lo : hi + 1]
    if len(xs) <= 2:
        return np.stack([xs, ys], axis=1)
    slope = np.diff(ys) / np.diff(xs)
    scale = max(1.0, float(np.abs(xs).max()))
    keep = np.ones(len(xs), dtype=bool)
    keep[1:-1] = np.abs(slope[1:] - slope[:-1]) > 1e-9 * scale
    return np.stack([xs[keep], ys[keep]], axis=1)


def landscape_from_pairs(pairs: npt.ArrayLike) -> PersistenceLandscape:
    """Landscape of a finite multiset of ``(birth, death)`` pairs."""
    pr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if not np.isfinite(pr).all():
        raise ValidationError("landscape pairs must be finite")
    pr = pr[pr[:, 1] > pr[:, 0]]
    if len(pr) == 0:
        return PersistenceLandscape(())
    b, d = pr[:, 0], pr[:, 1]
    cross = (b[:, None] + d[None, :]) / 2
    # a rising edge of i meets a falling edge of j only inside both supports
    valid = (cross > b[:, None]) & (cross < d[None, :])
    grid = np.unique(np.concatenate([b, d, (b + d) / 2, cross[valid]]))
    vals = tent_values(pr, grid)
    vals = -np.sort(-vals, axis=1)
    levels = []
    for k in range(vals.shape[1]):
        ys = vals[:, k]
        if not (ys > 0).any():
            break
        levels.append(_simplify(grid, ys))
    for lv in levels:
        lv.setflags(write=False)
    return PersistenceLandscape(tuple(levels))


def landscape_from_diagram(diagram: PersistenceDiagram, dim: int = 1) -> PersistenceLandscape:
    """Landscape of the non-essential points of ``diagram`` in degree ``dim``."""
    return landscape_from_pairs(diagram.pairs(dim))


def _level_power_integral(lv: np.ndarray, p: int) -> float:
    x, y = lv[:, 0], lv[:, 1]
    dx = np.diff(x)
    y0, y1 = y[:-1], y[1:]
    if p == 1:
        return float(np.sum(dx * (y0 + y1)) / 2)
    return float(np.sum(dx * (y0 * y0 + y0 * y1 + y1 * y1)) / 3)


def lp_norm(landscape: PersistenceLandscape, p: int) -> float:
    """``(sum_k integral lambda_k^p)^(1/p)`` by exact segment-wise integration, p in {1, 2}."""
    if p not in (1, 2):
        raise ValidationError(f"only p = 1 and p = 2 are supported, got {p!r}")
    total = sum(_level_power_integral(lv, p) for lv in landscape.levels)
    return total if p == 1 else float(np.sqrt(total))


def lp_norms(landscape: PersistenceLandscape, ps: Sequence[int] = (1, 2)) -> tuple[float, ...]:
    return tuple(lp_norm(landscape, p) for p in ps)


def sup_distance(a: PersistenceLandscape, b: PersistenceLandscape) -> float:
    """``max_k sup_x |a_k(x) - b_k(x)|`` evaluated on the merged vertex grid."""
    best = 0.0
    for k in range(max(len(a), len(b))):
        pieces = [lv[:, 0] for lv in (a.levels[k : k + 1] + b.levels[k : k + 1])]
        grid = np.unique(np.concatenate(pieces))
        diff = np.abs(a.evaluate(grid, k) - b.evaluate(grid, k))
        best = max(best, float(diff.max()))
    return best
