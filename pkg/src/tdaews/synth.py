"""Seeded generators for the three synthetic experiments.

All randomness goes through ``numpy.random.Generator(PCG64)`` seeded from a
``SeedSequence``; independent substreams (one per series or realization) come
from ``SeedSequence.spawn`` so results do not depend on generation order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import ValidationError
from .pipeline import MultiSeries

log = logging.getLogger(__name__)

RNG_IDENTITY = "numpy.random.PCG64 seeded by numpy.random.SeedSequence(seed).spawn"

QUARTET_B_VALUES = (0.27, 0.28, 0.29, 0.30)

# "delayed": y_{n+1} = x_n, the planar Henon map (period doubling up to a ~ 1.06
# at b = 0.3, then chaos). "literal": y_{n+1} = x_{n+1}, which collapses to the
# one-dimensional map x -> 1 + b x - a x^2 and stays periodic for a <= 1.4.
HENON_VARIANTS = ("delayed", "literal")


def substreams(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]


# ---------------------------------------------------------------- Henon


@dataclass(frozen=True)
class HenonConfig:
    b: float = 0.3
    sigma: float = 0.5
    dt: float = 2.8e-4
    a_start: float = 0.0
    a_end: float = 1.4
    seed: int = 0
    x0: float = 0.0
    y0: float = 0.0
    guard: float = 10.0
    independent_noise: bool = False
    variant: str = "delayed"

    def __post_init__(self) -> None:
        if self.variant not in HENON_VARIANTS:
            raise ValidationError(f"variant must be one of {HENON_VARIANTS}, got {self.variant!r}")
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not self.a_start < self.a_end:
            raise ValidationError(f"a_start ({self.a_start}) must be below a_end ({self.a_end})")
        if self.sigma < 0:
            raise ValidationError(f"sigma must be non-negative, got {self.sigma}")
        if not self.guard > 0:
            raise ValidationError(f"guard must be positive, got {self.guard}")

    @property
    def steps(self) -> int:
        # the ramp length is a ratio of decimals; absorb rounding before ceil
        return max(1, math.ceil((self.a_end - self.a_start) / self.dt - 1e-9))


@dataclass(frozen=True, eq=False)
class HenonSeries:
    x: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]
    a: npt.NDArray[np.float64]
    restarts: tuple[int, ...] = ()


def henon_fixed_point(a: float, b: float) -> float:
    """Attracting-branch root of ``a x^2 + (1 - b) x - 1 = 0``."""
    if a == 0:
        return 1.0 / (1.0 - b)
    return (-(1.0 - b) + math.sqrt((1.0 - b) ** 2 + 4.0 * a)) / (2.0 * a)


def _henon_run(cfg: HenonConfig, rng: np.random.Generator) -> HenonSeries:
    n = cfg.steps
    a = cfg.a_start + cfg.dt * np.arange(n)
    noise = rng.standard_normal(n)
    noise_y = rng.standard_normal(n) if cfg.independent_noise else noise
    scale = cfg.sigma * math.sqrt(cfg.dt)
    xs = np.empty(n)
    ys = np.empty(n)
    x, y = float(cfg.x0), float(cfg.y0)
    restarts = []
    delayed = cfg.variant == "delayed"
    for i in range(n):
        # the value recorded at step i is generated with a_i
        x_new = 1.0 - a[i] * x * x + cfg.b * y + scale * noise[i]
        y_new = (x if delayed else x_new) + scale * noise_y[i]
        if not (abs(x_new) <= cfg.guard and abs(y_new) <= cfg.guard):
            x_new, y_new = rng.uniform(-0.1, 0.1, size=2)
            restarts.append(i)
            log.info("henon orbit left |x| <= %g at step %d (a=%.4f, b=%g); restarted", cfg.guard, i, a[i], cfg.b)
        x, y = float(x_new), float(y_new)
        xs[i], ys[i] = x, y
    return HenonSeries(xs, ys, a, tuple(restarts))


def gen_noisy_henon(cfg: HenonConfig) -> HenonSeries:
    """Noisy Henon map with the parameter ``a`` ramped linearly by ``dt`` per step.

    ``x_{n+1} = 1 - a_n x_n^2 + b y_n + sigma W_n sqrt(dt)`` and
    ``y_{n+1} = x_n + sigma W_n sqrt(dt)`` (``x_{n+1}`` in place of ``x_n``
    for ``variant="literal"``), with the same ``W_n`` in both unless
    ``independent_noise`` is set. Orbits leaving ``|x| <= guard``
    restart from a uniform draw in ``[-0.1, 0.1]^2``; restart steps are
    returned in :attr:`HenonSeries.restarts`.
    """
    return _henon_run(cfg, substreams(cfg.seed, 1)[0])


def henon_quartet(
    b_values: Sequence[float] = QUARTET_B_VALUES,
    sigma: float = 0.5,
    dt: float = 2.8e-4,
    a_start: float = 0.0,
    a_end: float = 1.4,
    seed: int = 0,
    independent_noise: bool = False,
    variant: str = "delayed",
) -> tuple[MultiSeries, list[HenonSeries]]:
    """One x-series per ``b``, each with its own noise substream, stacked as a multiseries dated by ``a``."""
    runs = []
    for b, rng in zip(b_values, substreams(seed, len(b_values))):
        cfg = HenonConfig(b=b, sigma=sigma, dt=dt, a_start=a_start, a_end=a_end, seed=seed,
                          independent_noise=independent_noise, variant=variant)
        runs.append(_henon_run(cfg, rng))
    values = np.stack([r.x for r in runs], axis=1)
    labels = tuple(f"b={b:g}" for b in b_values)
    return MultiSeries(labels, runs[0].a, values), runs


# ---------------------------------------------------------------- white noise


@dataclass(frozen=True, eq=False)
class WhiteNoiseDataset:
    """``clouds[r, l]`` is the ``(points, d)`` cloud of realization ``r`` at level ``l``."""

    sigma_levels: npt.NDArray[np.float64]
    clouds: npt.NDArray[np.float64]
    stds: npt.NDArray[np.float64]
    jitter: float
    seed: int


def gen_white_noise_ramp(
    sigma_levels: Sequence[float] = tuple(range(1, 11)),
    points: int = 100,
    d: int = 4,
    jitter: float = 0.1,
    realizations: int = 100,
    seed: int = 0,
) -> WhiteNoiseDataset:
    """Gaussian clouds whose column ``i`` has standard deviation ``sigma + delta_i``.

    A fresh ``delta_i ~ U[-jitter, jitter]`` is drawn for every column of
    every cloud.
    """
    levels = np.asarray(sigma_levels, dtype=np.float64)
    if jitter < 0:
        raise ValidationError(f"jitter must be non-negative, got {jitter}")
    if levels.size == 0 or (levels <= jitter).any():
        raise ValidationError(f"every sigma level must exceed the jitter {jitter}")
    if points < 1 or d < 1 or realizations < 1:
        raise ValidationError("points, d and realizations must be positive")
    clouds = np.empty((realizations, len(levels), points, d))
    stds = np.empty((realizations, len(levels), d))
    for r, rng in enumerate(substreams(seed, realizations)):
        for li, sigma in enumerate(levels):
            std = sigma + rng.uniform(-jitter, jitter, size=d)
            clouds[r, li] = rng.standard_normal((points, d)) * std
            stds[r, li] = std
    return WhiteNoiseDataset(levels, clouds, stds, float(jitter), int(seed))


# ---------------------------------------------------------------- gamma superstatistics


def default_alpha_schedule(steps: int = 100, plateau: int = 75, start: float = 8.0, decrement: float = 0.25) -> tuple[float, ...]:
    """``start`` for the first ``plateau`` steps, then lowered by ``decrement`` each step."""
    return tuple(start if t < plateau else start - decrement * (t - plateau + 1) for t in range(steps))


@dataclass(frozen=True)
class GammaConfig:
    alpha_schedule: tuple[float, ...] = field(default_factory=default_alpha_schedule)
    beta: float = 1.0
    clouds: int = 100
    points_per_cloud: int = 100
    d: int = 4
    pool_size: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_schedule", tuple(float(a) for a in self.alpha_schedule))
        if any(not a > 0 for a in self.alpha_schedule):
            raise ValidationError("every shape parameter in the schedule must be positive")
        if not self.beta > 0:
            raise ValidationError(f"rate beta must be positive, got {self.beta}")
        if self.clouds != len(self.alpha_schedule):
            raise ValidationError(f"{self.clouds} clouds but {len(self.alpha_schedule)} schedule entries")
        if min(self.points_per_cloud, self.d, self.pool_size) < 1:
            raise ValidationError("points_per_cloud, d and pool_size must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class GammaDataset:
    """``clouds[r, t]`` is the cloud at step ``t`` of realization ``r``; ``precisions[r, t]`` its gamma pool."""

    config: GammaConfig
    clouds: npt.NDArray[np.float64]
    precisions: npt.NDArray[np.float64]


def sample_precisions(alpha: float, beta: float, size, rng: np.random.Generator) -> np.ndarray:
    """Gamma(shape ``alpha``, rate ``beta``) draws."""
    return rng.gamma(alpha, 1.0 / beta, size=size)


def gen_gamma_superstat(cfg: GammaConfig, realizations: int = 1) -> GammaDataset:
    """Gaussian clouds with gamma-distributed inverse variance.

    At step ``t`` a pool of ``pool_size`` precisions is drawn from
    ``Gamma(alpha_t, beta)``. Each row of the cloud picks one precision
    ``gamma`` uniformly from the pool and draws its ``d`` coordinates from
    ``N(0, 1/gamma)``.
    """
    if realizations < 1:
        raise ValidationError("realizations must be positive")
    steps, m, d = cfg.clouds, cfg.points_per_cloud, cfg.d
    clouds = np.empty((realizations, steps, m, d))
    pools = np.empty((realizations, steps, cfg.pool_size))
    for r, rng in enumerate(substreams(cfg.seed, realizations)):
        for t, alpha in enumerate(cfg.alpha_schedule):
            pool = sample_precisions(alpha, cfg.beta, cfg.pool_size, rng)
            gamma = pool[rng.integers(0, cfg.pool_size, size=m)]
            clouds[r, t] = rng.standard_normal((m, d)) / np.sqrt(gamma)[:, None]
            pools[r, t] = pool
    return GammaDataset(cfg, clouds, pools)
