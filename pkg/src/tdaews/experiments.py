"""Runners for the synthetic experiments: dataset, norms, and a headline statistic."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .pipeline import NormSeries, norm_table, window_norms
from .synth import QUARTET_B_VALUES, GammaConfig, GammaDataset, WhiteNoiseDataset, gen_gamma_superstat, gen_white_noise_ramp, henon_quartet


def linear_fit(x: npt.ArrayLike, y: npt.ArrayLike) -> tuple[float, float, float]:
    """Least-squares ``slope, intercept, r_squared``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


@dataclass
class WhiteNoiseResult:
    dataset: WhiteNoiseDataset
    norms: npt.NDArray[np.float64]  # (realizations, levels, 2) for p = 1, 2
    mean_l1: npt.NDArray[np.float64]
    mean_l2: npt.NDArray[np.float64]
    fits: dict[str, tuple[float, float, float]] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "experiment": "whitenoise",
            "sigma_levels": self.dataset.sigma_levels.tolist(),
            "mean_l1": self.mean_l1.tolist(),
            "mean_l2": self.mean_l2.tolist(),
            "fit_vs_sigma_squared": {
                k: {"slope": s, "intercept": c, "r_squared": r2} for k, (s, c, r2) in self.fits.items()
            },
            "monotone_l1": bool((np.diff(self.mean_l1) > 0).all()),
            "realizations": int(self.norms.shape[0]),
        }


def whitenoise_experiment(
    sigma_levels: Sequence[float] = tuple(range(1, 11)),
    realizations: int = 100,
    points: int = 100,
    d: int = 4,
    jitter: float = 0.1,
    seed: int = 0,
    workers: int | None = None,
) -> WhiteNoiseResult:
    """Mean landscape norms per noise level and their straight-line fit against ``sigma^2``."""
    ds = gen_white_noise_ramp(sigma_levels, points=points, d=d, jitter=jitter, realizations=realizations, seed=seed)
    r, lv = ds.clouds.shape[:2]
    flat = window_norms(ds.clouds.reshape(r * lv, points, d), (1, 2), workers=workers)
    norms = flat.reshape(r, lv, 2)
    mean = norms.mean(axis=0)
    res = WhiteNoiseResult(ds, norms, mean[:, 0], mean[:, 1])
    var = ds.sigma_levels**2
    res.fits = {"l1": linear_fit(var, res.mean_l1), "l2": linear_fit(var, res.mean_l2)}
    return res


@dataclass
class GammaResult:
    dataset: GammaDataset
    norms: npt.NDArray[np.float64]  # (realizations, steps, 2)
    mean_l1: npt.NDArray[np.float64]
    mean_l2: npt.NDArray[np.float64]
    mean_variance: npt.NDArray[np.float64]
    plateau: int

    @property
    def ratio(self) -> float:
        """Mean L^1 over the ramp steps divided by the mean over the plateau."""
        return float(self.mean_l1[self.plateau :].mean() / self.mean_l1[: self.plateau].mean())

    def summary(self) -> dict:
        return {
            "experiment": "gamma",
            "alpha_schedule": list(self.dataset.config.alpha_schedule),
            "mean_l1": self.mean_l1.tolist(),
            "mean_l2": self.mean_l2.tolist(),
            "mean_variance": self.mean_variance.tolist(),
            "plateau_steps": self.plateau,
            "late_over_early_l1": self.ratio,
            "realizations": int(self.norms.shape[0]),
        }


def _plateau_length(schedule: Sequence[float]) -> int:
    first = schedule[0]
    for t, a in enumerate(schedule):
        if a != first:
            return t
    return len(schedule)


def gamma_experiment(cfg: GammaConfig | None = None, realizations: int = 20, workers: int | None = None) -> GammaResult:
    """Per-step mean norms and mean sample variance across seeded realizations."""
    cfg = cfg or GammaConfig()
    ds = gen_gamma_superstat(cfg, realizations=realizations)
    r, steps, m, d = ds.clouds.shape
    flat = window_norms(ds.clouds.reshape(r * steps, m, d), (1, 2), workers=workers)
    norms = flat.reshape(r, steps, 2)
    mean = norms.mean(axis=0)
    variance = ds.clouds.var(axis=2, ddof=1).mean(axis=(0, 2))
    return GammaResult(ds, norms, mean[:, 0], mean[:, 1], variance, _plateau_length(cfg.alpha_schedule))


@dataclass
class HenonResult:
    a: npt.NDArray[np.float64]
    x: npt.NDArray[np.float64]
    norms: dict[int, NormSeries]
    restarts: list[tuple[int, ...]]
    regular: tuple[float, float] = (0.0, 0.8)
    chaotic: tuple[float, float] = (1.1, 1.4)

    def band_mean(self, band: tuple[float, float], p: int = 1) -> float:
        ns = self.norms[p]
        mask = (ns.dates >= band[0]) & (ns.dates <= band[1])
        return float(ns.values[mask].mean())

    @property
    def ratio(self) -> float:
        return self.band_mean(self.chaotic) / self.band_mean(self.regular)

    def summary(self) -> dict:
        return {
            "experiment": "henon",
            "windows": len(self.norms[1]),
            "mean_l1_regular": self.band_mean(self.regular),
            "mean_l1_chaotic": self.band_mean(self.chaotic),
            "chaotic_over_regular_l1": self.ratio,
            "regular_band": list(self.regular),
            "chaotic_band": list(self.chaotic),
            "restarts": [list(r) for r in self.restarts],
        }


def henon_experiment(
    b_values: Sequence[float] = QUARTET_B_VALUES,
    sigma: float = 0.5,
    dt: float = 2.8e-4,
    window: int = 50,
    seed: int = 0,
    variant: str = "delayed",
    workers: int | None = None,
) -> HenonResult:
    """Norm series of the Henon quartet, windows dated by the ``a`` of their last step."""
    series, runs = henon_quartet(b_values, sigma=sigma, dt=dt, seed=seed, variant=variant)
    norms = norm_table(series, window, (1, 2), workers=workers)
    return HenonResult(series.dates, series.values, norms, [r.restarts for r in runs])
