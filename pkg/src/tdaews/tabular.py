"""CSV and manifest I/O shared by the command line.

Floats are written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .errors import InputFormatError

_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def fmt_date(d) -> str:
    if isinstance(d, np.datetime64):
        return str(d.astype("datetime64[D]"))
    if isinstance(d, (int, np.integer)):
        return str(int(d))
    return fmt_float(d)


def parse_date_column(raw: Sequence[str], path=None, first_line: int = 2) -> np.ndarray:
    """ISO dates become ``datetime64[D]``; anything else must be numeric."""
    if raw and all(_ISO_DATE.match(s) for s in raw):
        try:
            return np.array(raw, dtype="datetime64[D]")
        except ValueError as exc:
            raise InputFormatError(f"bad date: {exc}", path) from None
    out = []
    for k, s in enumerate(raw):
        try:
            out.append(float(s))
        except ValueError:
            raise InputFormatError(f"cannot parse date {s!r}", path, first_line + k) from None
    arr = np.array(out)
    if arr.size and np.all(arr == np.round(arr)):
        return arr.astype(np.int64)
    return arr


def render_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt_float(c) if isinstance(c, (float, np.floating)) else str(c) for c in row])
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="") as fh:
        fh.write(text)
    return p


def write_series_csv(path: str | Path, dates: Sequence, columns: Mapping[str, Sequence[float]]) -> Path:
    names = list(columns)
    cols = [np.asarray(columns[n], dtype=np.float64) for n in names]
    rows = ([fmt_date(d)] + [fmt_float(c[i]) for c in cols] for i, d in enumerate(dates))
    return write_text(path, render_table(["date", *names], rows))


def read_series_csv(path: str | Path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Read a ``date,col1,col2,...`` table of numbers."""
    p = Path(path)
    try:
        fh = open(p, newline="")
    except OSError as exc:
        raise InputFormatError(f"cannot open: {exc.strerror}", p) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise InputFormatError("expected a header 'date,<column>,...'", p, 1)
        header = [h.strip() for h in header]
        raw_dates: list[str] = []
        data: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputFormatError(f"expected {len(header)} fields, got {len(row)}", p, lineno)
            try:
                data.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise InputFormatError(str(exc), p, lineno) from None
            raw_dates.append(row[0].strip())
    dates = parse_date_column(raw_dates, p)
    arr = np.array(data, dtype=np.float64).reshape(len(data), len(header) - 1)
    return dates, {name: arr[:, k] for k, name in enumerate(header[1:])}


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_manifest(path: str | Path, command: str, config: Mapping, inputs: Sequence[str | Path] = (),
                   outputs: Sequence[str | Path] = (), rng: str | None = None) -> Path:
    """Everything needed to re-run ``command``; deliberately free of timestamps and host details."""
    from .synth import RNG_IDENTITY

    manifest = {
        "tool": "tdaews",
        "version": __version__,
        "command": command,
        "config": dict(config),
        "rng": rng or RNG_IDENTITY,
        "inputs": [{"path": Path(p).name, "sha256": file_digest(p)} for p in inputs],
        "outputs": [Path(p).name for p in outputs],
    }
    return write_text(path, dump_json(manifest))
