"""Vietoris-Rips filtrations, persistence pairs in degrees 0 and 1, bottleneck distance.

Simplices of each dimension are kept as index arrays rather than objects so a
window of 100 points (about 160k triangles) stays cheap to build. Degree-0
pairs come from a union-find sweep over the edges. Degree-1 pairs come from
reducing the coboundary matrix over GF(2), edges taken youngest first, with
the edges that kill a component cleared in advance. Over a field this gives
the same pairs as reducing the boundary matrix in filtration order.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import FiltrationOrderError, InputFormatError, UnsupportedDimensionError, ValidationError
from .geometry import DistanceMatrix

__all__ = [
    "FiltrationSimplex",
    "Filtration",
    "PersistenceDiagram",
    "build_rips_filtration",
    "compute_persistence",
    "bottleneck_distance",
    "rips_diagram",
]


@dataclass(frozen=True, order=True)
class FiltrationSimplex:
    vertices: tuple[int, ...]
    appearance: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self) -> tuple:
        return (self.appearance, self.dim, self.vertices)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Filtration:
    """A Rips filtration truncated at dimension ``max_dim``.

    Edges and triangles are stored as sorted index arrays together with their
    appearance values. :attr:`simplices` materialises the merged order
    ``(appearance, dimension, vertices)`` on demand.
    """

    n_vertices: int
    edges: npt.NDArray[np.int64]
    edge_values: npt.NDArray[np.float64]
    triangles: npt.NDArray[np.int64]
    triangle_values: npt.NDArray[np.float64]
    max_value: float
    max_dim: int = 2

    @property
    def simplices(self) -> list[FiltrationSimplex]:
        out = [FiltrationSimplex((v,), 0.0) for v in range(self.n_vertices)]
        out += [FiltrationSimplex(tuple(int(x) for x in e), float(val)) for e, val in zip(self.edges, self.edge_values)]
        out += [
            FiltrationSimplex(tuple(int(x) for x in t), float(val))
            for t, val in zip(self.triangles, self.triangle_values)
        ]
        out.sort(key=FiltrationSimplex.sort_key)
        return out

    def __len__(self) -> int:
        return self.n_vertices + len(self.edges) + len(self.triangles)

    @classmethod
    def from_simplices(cls, simplices: Sequence[FiltrationSimplex], max_value: float | None = None) -> "Filtration":
        """Build from an explicit simplex list, keeping the given order within each dimension.

        No sorting happens here; :func:`compute_persistence` rejects lists that
        are out of filtration order.
        """
        verts = [s for s in simplices if s.dim == 0]
        edges = [s for s in simplices if s.dim == 1]
        tris = [s for s in simplices if s.dim == 2]
        if any(s.dim > 2 for s in simplices):
            raise UnsupportedDimensionError("only simplices of dimension <= 2 are supported")
        n = 1 + max((v for s in simplices for v in s.vertices), default=-1)
        if len(verts) != n:
            raise ValidationError(f"expected {n} vertices, got {len(verts)}")
        for s in verts:
            if s.appearance != 0:
                raise FiltrationOrderError(f"vertex {s.vertices} appears at {s.appearance}, expected 0")
        ev = np.array([s.appearance for s in edges], dtype=np.float64)
        tv = np.array([s.appearance for s in tris], dtype=np.float64)
        if max_value is None:
            max_value = float(max(ev.max(initial=0.0), tv.max(initial=0.0)))
        return cls(
            n_vertices=n,
            edges=_readonly(np.array([s.vertices for s in edges], dtype=np.int64).reshape(-1, 2)),
            edge_values=_readonly(ev),
            triangles=_readonly(np.array([s.vertices for s in tris], dtype=np.int64).reshape(-1, 3)),
            triangle_values=_readonly(tv),
            max_value=float(max_value),
            max_dim=2 if tris else 1,
        )


_TRIPLES_CACHE: dict[int, np.ndarray] = {}


def _triples(n: int) -> np.ndarray:
    """All ``i < j < k`` index triples in lexicographic order."""
    t = _TRIPLES_CACHE.get(n)
    if t is None:
        if n < 3:
            t = np.empty((0, 3), dtype=np.int64)
        else:
            flat = itertools.chain.from_iterable(itertools.combinations(range(n), 3))
            t = np.fromiter(flat, dtype=np.int64, count=3 * math.comb(n, 3)).reshape(-1, 3)
        t.setflags(write=False)
        if n <= 400:
            _TRIPLES_CACHE[n] = t
    return t


def build_rips_filtration(dm: DistanceMatrix, max_dim: int = 2, threshold: float | None = None) -> Filtration:
    """Vietoris-Rips filtration of a distance matrix.

    Parameters
    ----------
    dm : DistanceMatrix
    max_dim : {1, 2}
        Highest simplex dimension to include.
    threshold : float, optional
        Edges enter only when their length is strictly below ``threshold``.
        ``None`` keeps every edge, which is what guarantees every loop a
        finite death.

    Returns
    -------
    Filtration
        Vertices at 0, edges at their length, triangles at their longest edge,
        each sorted by value and then lexicographically by vertices.
    """
    if max_dim not in (1, 2):
        raise UnsupportedDimensionError(f"max_dim must be 1 or 2, got {max_dim!r}")
    if threshold is not None and not (threshold >= 0):
        raise ValidationError(f"threshold must be non-negative, got {threshold!r}")
    d = dm.entries
    n = dm.n
    iu, ju = np.triu_indices(n, k=1)
    ev = d[iu, ju]
    keep = np.ones(ev.shape, dtype=bool) if threshold is None else ev < threshold
    iu, ju, ev = iu[keep], ju[keep], ev[keep]
    # triu_indices is already lexicographic, so a stable sort on the value suffices
    order = np.argsort(ev, kind="stable")
    edges = np.stack([iu[order], ju[order]], axis=1).astype(np.int64)
    edge_values = ev[order]

    if max_dim == 2 and n >= 3:
        t = _triples(n)
        a, b, c = t[:, 0], t[:, 1], t[:, 2]
        tv = np.maximum(np.maximum(d[a, b], d[a, c]), d[b, c])
        if threshold is not None:
            present = tv < threshold
            t, tv = t[present], tv[present]
        order = np.argsort(tv, kind="stable")
        triangles = t[order]
        triangle_values = tv[order]
    else:
        triangles = np.empty((0, 3), dtype=np.int64)
        triangle_values = np.empty(0, dtype=np.float64)

    return Filtration(
        n_vertices=n,
        edges=_readonly(edges),
        edge_values=_readonly(edge_values),
        triangles=_readonly(np.ascontiguousarray(triangles)),
        triangle_values=_readonly(triangle_values),
        max_value=float(d.max()) if n > 1 else 0.0,
        max_dim=max_dim,
    )


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Multiset of ``(dim, birth, death, essential)`` points.

    Multiplicity is represented by repetition and the diagonal is implicit.
    Points are kept sorted by ``(dim, birth, death)``.
    """

    dims: npt.NDArray[np.int64]
    births: npt.NDArray[np.float64]
    deaths: npt.NDArray[np.float64]
    essential: npt.NDArray[np.bool_] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        dims = np.asarray(self.dims, dtype=np.int64).reshape(-1)
        births = np.asarray(self.births, dtype=np.float64).reshape(-1)
        deaths = np.asarray(self.deaths, dtype=np.float64).reshape(-1)
        ess = np.zeros(dims.shape, dtype=bool) if self.essential is None else np.asarray(self.essential, dtype=bool).reshape(-1)
        if not (dims.shape == births.shape == deaths.shape == ess.shape):
            raise ValidationError("diagram arrays must have equal length")
        if not (np.isfinite(births).all() and np.isfinite(deaths).all()):
            raise ValidationError("diagram coordinates must be finite")
        if (births > deaths).any():
            raise ValidationError("every diagram point needs birth <= death")
        order = np.lexsort((deaths, births, dims))
        for name, arr in (("dims", dims), ("births", births), ("deaths", deaths), ("essential", ess)):
            object.__setattr__(self, name, _readonly(arr[order].copy()))

    @classmethod
    def empty(cls) -> "PersistenceDiagram":
        return cls(np.empty(0, np.int64), np.empty(0), np.empty(0), np.empty(0, bool))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], dim: int = 1) -> "PersistenceDiagram":
        arr = np.asarray(list(pairs), dtype=np.float64).reshape(-1, 2)
        return cls(np.full(len(arr), dim, dtype=np.int64), arr[:, 0], arr[:, 1], np.zeros(len(arr), bool))

    def __len__(self) -> int:
        return int(self.dims.shape[0])

    def pairs(self, dim: int, include_essential: bool = False) -> npt.NDArray[np.float64]:
        """``(k, 2)`` array of ``(birth, death)`` in degree ``dim``."""
        mask = self.dims == dim
        if not include_essential:
            mask &= ~self.essential
        return np.stack([self.births[mask], self.deaths[mask]], axis=1)

    def essential_pairs(self, dim: int) -> npt.NDArray[np.float64]:
        mask = (self.dims == dim) & self.essential
        return np.stack([self.births[mask], self.deaths[mask]], axis=1)

    def scaled(self, factor: float) -> "PersistenceDiagram":
        return PersistenceDiagram(self.dims, self.births * factor, self.deaths * factor, self.essential)

    def as_tuples(self) -> list[tuple[int, float, float, bool]]:
        return [
            (int(k), float(b), float(d), bool(e))
            for k, b, d, e in zip(self.dims, self.births, self.deaths, self.essential)
        ]

    def to_csv(self, path: str | Path | None = None) -> str:
        """Write ``dim,birth,death,essential`` with 17 significant digits."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "birth", "death", "essential"])
        for k, b, d, e in self.as_tuples():
            w.writerow([k, f"{b:.17g}", f"{d:.17g}", "true" if e else "false"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "PersistenceDiagram":
        dims, births, deaths, ess = [], [], [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["dim", "birth", "death", "essential"]:
                raise InputFormatError(f"unexpected diagram header {header!r}", path, 1)
            for lineno, row in enumerate(reader, start=2):
                try:
                    dims.append(int(row[0]))
                    births.append(float(row[1]))
                    deaths.append(float(row[2]))
                    ess.append(row[3].strip().lower() in ("true", "1"))
                except (IndexError, ValueError) as exc:
                    raise InputFormatError(f"bad diagram row: {exc}", path, lineno) from None
        return cls(np.array(dims, np.int64), np.array(births), np.array(deaths), np.array(ess, bool))


def _check_order(filt: Filtration) -> None:
    n = filt.n_vertices
    e, ev = filt.edges, filt.edge_values
    t, tv = filt.triangles, filt.triangle_values
    if len(e):
        if (e[:, 0] >= e[:, 1]).any() or e.min() < 0 or e.max() >= n:
            raise FiltrationOrderError("edges must be stored as sorted in-range vertex pairs")
        if (ev < 0).any() or (np.diff(ev) < 0).any():
            raise FiltrationOrderError("edge appearances are not in non-decreasing order")
    if len(t):
        if (t[:, 0] >= t[:, 1]).any() or (t[:, 1] >= t[:, 2]).any() or t.min() < 0 or t.max() >= n:
            raise FiltrationOrderError("triangles must be stored as sorted in-range vertex triples")
        if (np.diff(tv) < 0).any():
            raise FiltrationOrderError("triangle appearances are not in non-decreasing order")
        edge_value = np.full((n, n), np.inf)
        edge_value[e[:, 0], e[:, 1]] = ev
        faces = np.maximum.reduce(
            [edge_value[t[:, 0], t[:, 1]], edge_value[t[:, 0], t[:, 2]], edge_value[t[:, 1], t[:, 2]]]
        )
        if (faces > tv).any():
            raise FiltrationOrderError("a triangle appears before one of its edges")


def _h0_pairs(n: int, edges: np.ndarray, edge_values: np.ndarray) -> tuple[list[float], np.ndarray, int]:
    """Deaths of merging components, a mask of killing edges, and the component count."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    deaths: list[float] = []
    killer = np.zeros(len(edges), dtype=bool)
    components = n
    for idx, (u, v) in enumerate(edges.tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
            deaths.append(float(edge_values[idx]))
            killer[idx] = True
            components -= 1
            if components == 1:
                break
    return deaths, killer, components


def _h1_pairs(filt: Filtration, killer: np.ndarray) -> tuple[list[tuple[float, float]], list[float]]:
    """Reduce edge coboundaries youngest first; return finite pairs and essential births."""
    n = filt.n_vertices
    edges, ev = filt.edges, filt.edge_values
    tris, tv = filt.triangles, filt.triangle_values
    finite: list[tuple[float, float]] = []
    essential: list[float] = []
    n_edges = len(edges)
    if n_edges == 0:
        return finite, essential

    # rank[i, j, k] is the filtration rank of triangle {i, j, k}, -1 if absent
    rank = np.full((n, n, n), -1, dtype=np.int32)
    if len(tris):
        r = np.arange(len(tris), dtype=np.int32)
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        for x, y, z in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
            rank[x, y, z] = r

    owner: dict[int, int] = {}
    stored: dict[int, object] = {}
    edge_list = edges.tolist()
    for e in range(n_edges - 1, -1, -1):
        if killer[e]:
            continue
        u, v = edge_list[e]
        col = rank[u, v]
        col = col[col >= 0]
        if col.size == 0:
            essential.append(float(ev[e]))
            continue
        piv = int(col.min())
        other = owner.get(piv)
        if other is None:
            owner[piv] = e
            stored[e] = col
            finite.append((float(ev[e]), float(tv[piv])))
            continue
        work = set(col.tolist())
        while True:
            prev = stored[other]
            if not isinstance(prev, set):
                prev = set(prev.tolist())
                stored[other] = prev
            work ^= prev
            if not work:
                essential.append(float(ev[e]))
                break
            piv = min(work)
            other = owner.get(piv)
            if other is None:
                owner[piv] = e
                stored[e] = work
                finite.append((float(ev[e]), float(tv[piv])))
                break
    return finite, essential


def compute_persistence(filtration: Filtration, dims: Sequence[int] = (0, 1)) -> PersistenceDiagram:
    """Degree-0 and degree-1 persistence pairs of a Rips filtration.

    Zero-persistence pairs are dropped. Each surviving component is reported
    once as an essential degree-0 point ``(0, max_value)``; loops that never
    die (only possible under a threshold or with ``max_dim=1``) are reported
    as essential degree-1 points with death ``max_value``.
    """
    _check_order(filtration)
    n = filtration.n_vertices
    deaths0, killer, components = _h0_pairs(n, filtration.edges, filtration.edge_values)
    rows_dim: list[int] = []
    rows_b: list[float] = []
    rows_d: list[float] = []
    rows_e: list[bool] = []
    mv = filtration.max_value
    if 0 in dims:
        for d in deaths0:
            if d > 0:
                rows_dim.append(0), rows_b.append(0.0), rows_d.append(d), rows_e.append(False)
        for _ in range(components):
            rows_dim.append(0), rows_b.append(0.0), rows_d.append(mv), rows_e.append(True)
    if 1 in dims:
        finite, essential = _h1_pairs(filtration, killer)
        for b, d in finite:
            if d > b:
                rows_dim.append(1), rows_b.append(b), rows_d.append(d), rows_e.append(False)
        for b in essential:
            rows_dim.append(1), rows_b.append(b), rows_d.append(max(mv, b)), rows_e.append(True)
    return PersistenceDiagram(
        np.array(rows_dim, dtype=np.int64),
        np.array(rows_b, dtype=np.float64),
        np.array(rows_d, dtype=np.float64),
        np.array(rows_e, dtype=bool),
    )


def rips_diagram(dm: DistanceMatrix, dims: Sequence[int] = (0, 1)) -> PersistenceDiagram:
    """Full-diameter Rips persistence of ``dm`` in one call."""
    return compute_persistence(build_rips_filtration(dm, max_dim=2), dims=dims)


def _perfect_matching_exists(a: np.ndarray, b: np.ndarray, cross: np.ndarray, t: float) -> bool:
    m, k = len(a), len(b)
    size = m + k
    # left: a_0..a_{m-1}, diag(b)_0..diag(b)_{k-1}; right: b_0..b_{k-1}, diag(a)_0..diag(a)_{m-1}
    dense = np.zeros((size, size), dtype=bool)
    dense[:m, :k] = cross <= t
    dense[np.arange(m), k + np.arange(m)] = (a[:, 1] - a[:, 0]) / 2 <= t
    dense[m + np.arange(k), np.arange(k)] = (b[:, 1] - b[:, 0]) / 2 <= t
    dense[m:, k:] = True
    match = maximum_bipartite_matching(csr_matrix(dense), perm_type="column")
    return bool((match >= 0).all())


def _bottleneck_finite(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 and len(b) == 0:
        return 0.0
    cross = np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1]))
    cand = np.unique(
        np.concatenate([[0.0], cross.ravel(), (a[:, 1] - a[:, 0]) / 2, (b[:, 1] - b[:, 0]) / 2])
    )
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(a, b, cross, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def bottleneck_distance(a: PersistenceDiagram, b: PersistenceDiagram, dim: int = 1) -> float:
    """Bottleneck (sup-norm) matching distance between two diagrams in degree ``dim``.

    Off-diagonal points may be matched to the diagonal. Essential points are
    matched only among themselves by birth; differing essential counts give
    ``inf``.
    """
    if dim not in (0, 1):
        raise UnsupportedDimensionError(f"dim must be 0 or 1, got {dim!r}")
    ea, eb = a.essential_pairs(dim), b.essential_pairs(dim)
    if len(ea) != len(eb):
        return math.inf
    ess = float(np.abs(np.sort(ea[:, 0]) - np.sort(eb[:, 0])).max()) if len(ea) else 0.0
    return max(ess, _bottleneck_finite(a.pairs(dim), b.pairs(dim)))
