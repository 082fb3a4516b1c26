"""Regenerate the bundled demo price file (synthetic, four correlated indices).

Volatility and cross-correlation rise over the last third so the demo has
something for the indicators to pick up.
"""

from pathlib import Path

import numpy as np

NAMES = ("ALPHA", "BRAVO", "CHARLIE", "DELTA")
DAYS = 301


def main() -> None:
    rng = np.random.Generator(np.random.PCG64(20000103))
    dates = np.busday_offset(np.datetime64("2000-01-03"), np.arange(DAYS), roll="forward")
    steps = DAYS - 1
    ramp = np.clip((np.arange(steps) - 200) / 100.0, 0.0, 1.0)
    vol = 0.008 * (1.0 + 2.0 * ramp)
    common = rng.standard_normal(steps)
    idio = rng.standard_normal((steps, len(NAMES)))
    rho = 0.3 + 0.5 * ramp
    shocks = np.sqrt(rho)[:, None] * common[:, None] + np.sqrt(1.0 - rho)[:, None] * idio
    returns = vol[:, None] * shocks + 0.0002
    prices = 1000.0 * np.exp(np.vstack([np.zeros(len(NAMES)), np.cumsum(returns, axis=0)]))
    out = Path(__file__).resolve().parents[1] / "src" / "tdaews" / "data" / "demo_prices.csv"
    lines = ["date," + ",".join(NAMES)]
    lines += [f"{d}," + ",".join(f"{p:.4f}" for p in row) for d, row in zip(dates, prices)]
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
