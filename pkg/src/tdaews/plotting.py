"""Minimal deterministic SVG line charts of min-max normalised series."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateInputError
from .pipeline import normalize_series
from .tabular import write_text

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e")


def svg_line_chart(series: Mapping[str, Sequence[float]], title: str = "", width: int = 800, height: int = 300) -> str:
    """Overlay each series on a shared ``[0, 1]`` axis after min-max normalisation.

    Constant series are drawn flat at 0 rather than rejected.
    """
    pad = 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#cccccc"/>',
    ]
    if title:
        parts.append(f'<text x="{pad}" y="{pad - 10}" font-family="sans-serif" font-size="12">{title}</text>')
    for k, (name, values) in enumerate(series.items()):
        y = np.asarray(values, dtype=np.float64)
        if len(y) == 0:
            continue
        try:
            y = normalize_series(y)
        except DegenerateInputError:
            y = np.zeros_like(y)
        x = np.linspace(pad, width - pad, len(y)) if len(y) > 1 else np.array([pad + (width - 2 * pad) / 2])
        yy = height - pad - y * (height - 2 * pad)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(x, yy))
        colour = _COLOURS[k % len(_COLOURS)]
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1" points="{pts}"/>')
        parts.append(
            f'<text x="{width - pad - 100}" y="{pad + 14 * (k + 1)}" font-family="sans-serif" font-size="11" fill="{colour}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: str | Path, series: Mapping[str, Sequence[float]], title: str = "") -> Path:
    return write_text(path, svg_line_chart(series, title=title))
