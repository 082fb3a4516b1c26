"""Sliding-window point clouds over a multivariate series and their landscape norms."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import DegenerateInputError, InsufficientDataError, ValidationError
from .geometry import PointCloud, distance_matrix
from .landscape import landscape_from_diagram, lp_norm
from .persistence import build_rips_filtration, compute_persistence

__all__ = [
    "MultiSeries",
    "NormSeries",
    "sliding_windows",
    "cloud_norms",
    "window_norms",
    "norm_series",
    "norm_table",
    "normalize_series",
    "worker_count",
]


def _as_dates(dates: npt.ArrayLike) -> np.ndarray:
    arr = np.asarray(dates)
    if arr.dtype.kind in "US" or arr.dtype == object:
        try:
            arr = arr.astype("datetime64[D]")
        except (ValueError, TypeError):
            raise ValidationError("dates must be ISO dates or numbers") from None
    elif arr.dtype.kind == "M":
        arr = arr.astype("datetime64[D]")
    elif arr.dtype.kind not in "iuf":
        raise ValidationError(f"unsupported date dtype {arr.dtype}")
    return arr


@dataclass(frozen=True, eq=False)
class MultiSeries:
    """``n`` observations of ``d`` aligned series.

    ``dates`` is either ``datetime64[D]`` (trading days) or a numeric index
    such as a simulation step or a parameter value; it must be strictly
    increasing.
    """

    labels: tuple[str, ...]
    dates: np.ndarray
    values: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        dates = _as_dates(self.dates).copy()
        labels = tuple(str(x) for x in self.labels)
        if vals.ndim != 2:
            raise ValidationError(f"values must be an (n, d) array, got shape {vals.shape}")
        if vals.shape[1] < 2:
            raise ValidationError(f"need at least 2 series, got {vals.shape[1]}")
        if len(labels) != vals.shape[1]:
            raise ValidationError(f"{len(labels)} labels for {vals.shape[1]} columns")
        if dates.shape != (vals.shape[0],):
            raise ValidationError(f"{dates.shape[0]} dates for {vals.shape[0]} rows")
        if not np.isfinite(vals).all():
            row = int(np.flatnonzero(~np.isfinite(vals).all(axis=1))[0])
            raise ValidationError(f"missing or non-finite value in row {row} ({dates[row]})")
        if len(dates) > 1 and not (dates[1:] > dates[:-1]).all():
            raise ValidationError("dates must be strictly increasing")
        vals.setflags(write=False)
        dates.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    def select(self, columns: Sequence[int]) -> "MultiSeries":
        cols = list(columns)
        return MultiSeries(tuple(self.labels[c] for c in cols), self.dates, self.values[:, cols])


@dataclass(frozen=True, eq=False)
class NormSeries:
    """Landscape ``L^p`` norm per window, dated by each window's last observation."""

    dates: np.ndarray
    values: npt.NDArray[np.float64]
    p: int
    window: int

    def __len__(self) -> int:
        return int(self.values.shape[0])


def _check_window(n: int, w: int) -> None:
    if not isinstance(w, (int, np.integer)) or w < 2:
        raise ValidationError(f"window must be an integer >= 2, got {w!r}")
    if w > n:
        raise InsufficientDataError(f"window {w} exceeds the {n} available observations")


def sliding_windows(series: MultiSeries, w: int) -> list[PointCloud]:
    """Clouds of ``w`` consecutive rows, advancing one row at a time (``n - w + 1`` of them)."""
    _check_window(series.n, w)
    return [PointCloud(series.values[i : i + w]) for i in range(series.n - w + 1)]


def _zscore(block: np.ndarray) -> np.ndarray:
    mean = block.mean(axis=0)
    std = block.std(axis=0, ddof=1)
    out = np.zeros_like(block)
    ok = std > 0
    out[:, ok] = (block[:, ok] - mean[ok]) / std[ok]
    return out


def cloud_norms(points: npt.ArrayLike, ps: Sequence[int] = (1, 2), zscore: bool = False) -> tuple[float, ...]:
    """Degree-1 landscape norms of one cloud under the full-diameter Rips filtration."""
    block = np.asarray(points, dtype=np.float64)
    if zscore:
        block = _zscore(block)
    filt = build_rips_filtration(distance_matrix(PointCloud(block)), max_dim=2)
    land = landscape_from_diagram(compute_persistence(filt, dims=(1,)), dim=1)
    return tuple(lp_norm(land, p) for p in ps)


def _norm_chunk(args) -> list[tuple[float, ...]]:
    blocks, ps, zscore = args
    return [cloud_norms(b, ps, zscore) for b in blocks]


def worker_count(requested: int | None = None) -> int:
    """Explicit request, else ``TDA_THREADS``, else the CPU count."""
    if requested is not None:
        n = int(requested)
    else:
        env = os.environ.get("TDA_THREADS")
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ValidationError(f"TDA_THREADS must be an integer, got {env!r}") from None
        else:
            n = os.cpu_count() or 1
    return max(1, n)


def window_norms(
    clouds: Sequence[npt.ArrayLike],
    ps: Sequence[int] = (1, 2),
    zscore: bool = False,
    workers: int | None = None,
) -> npt.NDArray[np.float64]:
    """``(len(clouds), len(ps))`` norms, computed in parallel and returned in input order."""
    for p in ps:
        if p not in (1, 2):
            raise ValidationError(f"only p = 1 and p = 2 are supported, got {p!r}")
    blocks = [np.asarray(c.points if isinstance(c, PointCloud) else c, dtype=np.float64) for c in clouds]
    nw = min(worker_count(workers), max(1, len(blocks)))
    if nw == 1 or len(blocks) < 8:
        rows = _norm_chunk((blocks, tuple(ps), zscore))
    else:
        size = -(-len(blocks) // (nw * 4))
        chunks = [(blocks[i : i + size], tuple(ps), zscore) for i in range(0, len(blocks), size)]
        with ProcessPoolExecutor(max_workers=nw) as pool:
            rows = [r for part in pool.map(_norm_chunk, chunks) for r in part]
    return np.array(rows, dtype=np.float64).reshape(len(blocks), len(ps))


def norm_table(
    series: MultiSeries,
    w: int,
    ps: Sequence[int] = (1, 2),
    zscore: bool = False,
    workers: int | None = None,
) -> dict[int, NormSeries]:
    """Norm series for several ``p`` from a single pass over the windows."""
    _check_window(series.n, w)
    vals = series.values
    blocks = [vals[i : i + w] for i in range(series.n - w + 1)]
    table = window_norms(blocks, ps, zscore=zscore, workers=workers)
    dates = series.dates[w - 1 :]
    return {p: NormSeries(dates, table[:, k].copy(), p, w) for k, p in enumerate(ps)}


def norm_series(
    series: MultiSeries, w: int, p: int = 1, zscore: bool = False, workers: int | None = None
) -> NormSeries:
    return norm_table(series, w, (p,), zscore=zscore, workers=workers)[p]


def normalize_series(values: npt.ArrayLike, mode: str = "minmax") -> npt.NDArray[np.float64]:
    """Affine map of ``values`` onto ``[0, 1]``; used for plotting only."""
    if mode != "minmax":
        raise ValidationError(f"unknown normalisation mode {mode!r}")
    x = np.asarray(values, dtype=np.float64)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise DegenerateInputError("cannot min-max normalise a constant series")
    return (x - lo) / (hi - lo)
