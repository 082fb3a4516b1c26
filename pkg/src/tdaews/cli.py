"""Command line: ``returns``, ``analyze``, ``synth``, ``ews`` and ``trend``.

Exit codes: 0 success, 2 validation error, 3 I/O or parse error. The
``TDA_THREADS`` environment variable caps the number of worker processes.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import InputFormatError, TDAError, ValidationError
from .ews import INDICATORS, IndicatorSeries, pre_event_trend, rolling_indicators
from .experiments import gamma_experiment, henon_experiment, whitenoise_experiment
from .market import log_returns, read_prices
from .pipeline import MultiSeries, norm_table
from .plotting import write_svg
from .synth import QUARTET_B_VALUES, GammaConfig, default_alpha_schedule
from .tabular import dump_json, fmt_date, read_series_csv, render_table, write_manifest, write_series_csv, write_text

log = logging.getLogger("tdaews")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3


@dataclass
class RunConfig:
    """Settings shared by the commands; the manifest records exactly these."""

    inputs: list[str] = field(default_factory=list)
    out: str = ""
    window: int = 50
    norms: tuple[int, ...] = (1, 2)
    zscore: bool = False
    prices: bool = False
    low_freq_fraction: float = 0.1
    indicator_window: int = 500
    taper: str | None = None
    column: str | None = None
    events: list[str] = field(default_factory=list)
    span: int = 250
    seed: int = 0
    plot: bool = False

    def manifest_config(self, **extra) -> dict:
        cfg = asdict(self)
        cfg["inputs"] = [Path(p).name for p in self.inputs]
        cfg["out"] = Path(self.out).name
        cfg["norms"] = [f"l{p}" for p in self.norms]
        cfg.update(extra)
        return cfg


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def load_multiseries(paths: Sequence[str], prices: bool) -> MultiSeries:
    if prices:
        return log_returns(read_prices(paths))
    if len(paths) != 1:
        raise ValidationError("a returns table must be a single wide CSV; pass --prices for price files")
    dates, cols = read_series_csv(paths[0])
    return MultiSeries(tuple(cols), dates, np.stack(list(cols.values()), axis=1))


def run_returns(cfg: RunConfig) -> list[Path]:
    series = log_returns(read_prices(cfg.inputs))
    out = Path(cfg.out or "returns.csv")
    write_series_csv(out, series.dates, {name: series.values[:, k] for k, name in enumerate(series.labels)})
    manifest = _sibling(out, ".manifest.json")
    write_manifest(manifest, "returns", cfg.manifest_config(rows=series.n), inputs=cfg.inputs, outputs=[out])
    return [out, manifest]


def run_analyze(cfg: RunConfig) -> list[Path]:
    """Norm series of the degree-1 landscapes over sliding windows of the input."""
    series = load_multiseries(cfg.inputs, cfg.prices)
    table = norm_table(series, cfg.window, cfg.norms, zscore=cfg.zscore)
    out = Path(cfg.out or "norms.csv")
    cols = {f"l{p}": table[p].values for p in cfg.norms}
    written = [write_series_csv(out, table[cfg.norms[0]].dates, cols)]
    if cfg.plot:
        written.append(write_svg(_sibling(out, ".svg"), cols, title=f"landscape norms, window {cfg.window}"))
    manifest = _sibling(out, ".manifest.json")
    write_manifest(
        manifest, "analyze", cfg.manifest_config(labels=list(series.labels), rows=len(table[cfg.norms[0]])),
        inputs=cfg.inputs, outputs=written,
    )
    return written + [manifest]


def _indicator_columns(ind: IndicatorSeries) -> dict[str, np.ndarray]:
    return {name: ind.column(name) for name in INDICATORS}


def _trend_records(ind: IndicatorSeries, events: Sequence[str], span: int) -> list[dict]:
    records = []
    for ev in events:
        target = ev if ind.dates.dtype.kind == "M" else float(ev)
        for name, rep in pre_event_trend(ind, target, span).items():
            records.append({
                "indicator": name,
                "tau": rep.tau,
                "s": rep.s_statistic,
                "z": rep.z_score,
                "p_value": rep.p_value,
                "span": rep.span,
                "event_date": ev,
            })
    return records


def run_ews(cfg: RunConfig) -> list[Path]:
    """Rolling indicators of one column of a series CSV, plus trend reports for any events."""
    if len(cfg.inputs) != 1:
        raise ValidationError("ews takes exactly one input series file")
    dates, cols = read_series_csv(cfg.inputs[0])
    column = cfg.column or next(iter(cols))
    if column not in cols:
        raise ValidationError(f"column {column!r} not in {', '.join(cols)}")
    ind = rolling_indicators(cols[column], cfg.indicator_window, cfg.low_freq_fraction, dates=dates, taper=cfg.taper)
    out = Path(cfg.out or "indicators.csv")
    written = [write_series_csv(out, ind.dates, _indicator_columns(ind))]
    if cfg.events:
        written.append(write_text(_sibling(out, ".trend.json"), dump_json(_trend_records(ind, cfg.events, cfg.span))))
    if cfg.plot:
        written.append(write_svg(_sibling(out, ".svg"), _indicator_columns(ind), title=f"indicators of {column}"))
    manifest = _sibling(out, ".manifest.json")
    write_manifest(manifest, "ews", cfg.manifest_config(column=column), inputs=cfg.inputs, outputs=written)
    return written + [manifest]


def read_indicators(path: str) -> IndicatorSeries:
    dates, cols = read_series_csv(path)
    missing = [c for c in INDICATORS if c not in cols]
    if missing:
        raise InputFormatError(f"indicator file lacks column(s) {', '.join(missing)}", path, 1)
    return IndicatorSeries(dates, cols["variance"], cols["low_freq_power"], cols["acf1"], window=0)


def run_trend(cfg: RunConfig) -> list[Path]:
    if len(cfg.inputs) != 1:
        raise ValidationError("trend takes exactly one indicator file")
    if not cfg.events:
        raise ValidationError("trend needs at least one --event DATE")
    ind = read_indicators(cfg.inputs[0])
    out = Path(cfg.out or "trend.json")
    write_text(out, dump_json(_trend_records(ind, cfg.events, cfg.span)))
    manifest = _sibling(out, ".manifest.json")
    write_manifest(manifest, "trend", cfg.manifest_config(), inputs=cfg.inputs, outputs=[out])
    return [out, manifest]


def _write_dataset(outdir: Path, rows: np.ndarray, sidecar: dict) -> list[Path]:
    d = rows.shape[1]
    header = ["step", *[f"series_{k + 1}" for k in range(d)]]
    body = ([i, *map(float, r)] for i, r in enumerate(rows))
    csv_path = write_text(outdir / "dataset.csv", render_table(header, body))
    json_path = write_text(outdir / "dataset.json", dump_json(sidecar))
    return [csv_path, json_path]


def run_synth(experiment: str, cfg: RunConfig, opts: argparse.Namespace) -> list[Path]:
    """Generate one synthetic experiment, its norms, and a headline summary in ``cfg.out``."""
    outdir = Path(cfg.out or f"synth_{experiment}")
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    extra: dict = {"experiment": experiment}
    if experiment == "henon":
        res = henon_experiment(QUARTET_B_VALUES, sigma=opts.sigma, dt=opts.dt, window=cfg.window, seed=cfg.seed,
                               variant=opts.variant)
        extra.update(sigma=opts.sigma, dt=opts.dt, variant=opts.variant, b_values=list(QUARTET_B_VALUES))
        written += _write_dataset(outdir, res.x, {
            "experiment": "henon", "b_values": list(QUARTET_B_VALUES), "sigma": opts.sigma, "dt": opts.dt,
            "a_start": 0.0, "a_end": 1.4, "variant": opts.variant, "seed": cfg.seed,
            "step_to_a": "a = a_start + step * dt", "restarts": [list(r) for r in res.restarts],
        })
        cols = {"l1": res.norms[1].values, "l2": res.norms[2].values}
        written.append(write_series_csv(outdir / "norms.csv", res.norms[1].dates, cols))
        summary = res.summary()
    elif experiment == "whitenoise":
        levels = [float(s) for s in range(1, 11)]
        res = whitenoise_experiment(levels, realizations=opts.realizations, points=opts.points, jitter=opts.jitter,
                                    seed=cfg.seed)
        extra.update(realizations=opts.realizations, points=opts.points, jitter=opts.jitter, sigma_levels=levels)
        r, lv, m, d = res.dataset.clouds.shape
        written += _write_dataset(outdir, res.dataset.clouds.reshape(-1, d), {
            "experiment": "whitenoise", "sigma_levels": levels, "points": m, "d": d, "jitter": opts.jitter,
            "realizations": r, "seed": cfg.seed, "row_order": "realization, sigma level, point",
            "column_std": res.dataset.stds.tolist(),
        })
        rows = ([k, levels[li], float(res.norms[k, li, 0]), float(res.norms[k, li, 1])] for k in range(r) for li in range(lv))
        written.append(write_text(outdir / "norms.csv", render_table(["realization", "sigma", "l1", "l2"], rows)))
        means = ([s, s * s, float(a), float(b)] for s, a, b in zip(levels, res.mean_l1, res.mean_l2))
        written.append(write_text(outdir / "means.csv", render_table(["sigma", "sigma_squared", "mean_l1", "mean_l2"], means)))
        summary = res.summary()
    elif experiment == "gamma":
        gcfg = GammaConfig(alpha_schedule=default_alpha_schedule(), beta=opts.beta, seed=cfg.seed)
        res = gamma_experiment(gcfg, realizations=opts.realizations)
        extra.update(realizations=opts.realizations, beta=opts.beta)
        r, steps, m, d = res.dataset.clouds.shape
        written += _write_dataset(outdir, res.dataset.clouds.reshape(-1, d), {
            "experiment": "gamma", "config": gcfg.to_dict(), "realizations": r,
            "row_order": "realization, cloud step, point",
        })
        alphas = gcfg.alpha_schedule
        rows = ([k, t + 1, alphas[t], float(res.norms[k, t, 0]), float(res.norms[k, t, 1])] for k in range(r) for t in range(steps))
        written.append(write_text(outdir / "norms.csv", render_table(["realization", "step", "alpha", "l1", "l2"], rows)))
        means = ([t + 1, alphas[t], float(res.mean_l1[t]), float(res.mean_l2[t]), float(res.mean_variance[t])] for t in range(steps))
        written.append(write_text(outdir / "means.csv", render_table(["step", "alpha", "mean_l1", "mean_l2", "mean_variance"], means)))
        summary = res.summary()
    else:
        raise ValidationError(f"unknown experiment {experiment!r}")
    written.append(write_text(outdir / "summary.json", dump_json(summary)))
    if cfg.plot:
        if experiment == "henon":
            series = {"l1": res.norms[1].values, "l2": res.norms[2].values}
        elif experiment == "gamma":
            series = {"mean l1": res.mean_l1, "mean variance": res.mean_variance}
        else:
            series = {"mean l1": res.mean_l1, "mean l2": res.mean_l2}
        written.append(write_svg(outdir / "norms.svg", series, title=experiment))
    manifest = outdir / "manifest.json"
    write_manifest(manifest, f"synth {experiment}", cfg.manifest_config(**extra), outputs=written)
    return written + [manifest]


def _norm_list(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        p = part.strip().lower()
        if p not in ("l1", "l2"):
            raise argparse.ArgumentTypeError(f"norm must be l1 or l2, got {part!r}")
        if int(p[1]) not in out:
            out.append(int(p[1]))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="", help="output file (or directory for synth)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--plot", action="store_true", help="also write an SVG line chart")
    common.add_argument("-v", "--verbose", action="store_true")

    windowed = argparse.ArgumentParser(add_help=False)
    windowed.add_argument("--window", type=int, default=50, help="points per sliding-window cloud")
    windowed.add_argument("--norm", type=_norm_list, default=(1, 2), help="comma list of l1,l2")
    windowed.add_argument("--zscore", action="store_true", help="standardise each column within each window")

    indicator = argparse.ArgumentParser(add_help=False)
    indicator.add_argument("--low-freq-frac", type=float, default=0.1, dest="low_freq_fraction")
    indicator.add_argument("--indicator-window", type=int, default=500)
    indicator.add_argument("--taper", choices=("none", "hann"), default="none")
    indicator.add_argument("--event", action="append", default=[], dest="events", metavar="DATE")
    indicator.add_argument("--span", type=int, default=250, help="values before the event fed to Mann-Kendall")

    parser = argparse.ArgumentParser(prog="tdaews", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("returns", parents=[common], help="price CSVs to aligned daily log-returns")
    p.add_argument("--input", nargs="+", required=True)

    p = sub.add_parser("analyze", parents=[common, windowed], help="landscape norm series of a multiseries")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--prices", action="store_true", help="inputs are prices; compute log-returns first")

    p = sub.add_parser("synth", parents=[common, windowed], help="run a synthetic experiment")
    p.add_argument("experiment", choices=("henon", "whitenoise", "gamma"))
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--sigma", type=float, default=0.5, help="henon noise intensity")
    p.add_argument("--dt", type=float, default=2.8e-4, help="henon ramp step")
    p.add_argument("--variant", choices=("delayed", "literal"), default="delayed")
    p.add_argument("--points", type=int, default=100, help="white-noise points per cloud")
    p.add_argument("--jitter", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=1.0, help="gamma rate parameter")

    p = sub.add_parser("ews", parents=[common, indicator], help="rolling early-warning indicators")
    p.add_argument("--input", nargs=1, required=True)
    p.add_argument("--column", default=None, help="series column to analyse (default: first)")

    p = sub.add_parser("trend", parents=[common, indicator], help="Mann-Kendall trend before events")
    p.add_argument("--input", nargs=1, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(inputs=list(getattr(args, "input", None) or []), out=args.out, seed=args.seed, plot=args.plot)
    for name in ("window", "zscore", "prices", "low_freq_fraction", "indicator_window", "events", "span", "column"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "norm"):
        cfg.norms = tuple(args.norm)
    if getattr(args, "taper", "none") != "none":
        cfg.taper = args.taper
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(args)
    try:
        if args.command == "returns":
            written = run_returns(cfg)
        elif args.command == "analyze":
            written = run_analyze(cfg)
        elif args.command == "synth":
            if args.realizations is None:
                args.realizations = 20 if args.experiment == "gamma" else 100
            written = run_synth(args.experiment, cfg, args)
        elif args.command == "ews":
            written = run_ews(cfg)
        else:
            written = run_trend(cfg)
    except ValidationError as exc:
        print(f"tdaews: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InputFormatError, OSError) as exc:
        print(f"tdaews: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TDAError as exc:
        print(f"tdaews: internal error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
