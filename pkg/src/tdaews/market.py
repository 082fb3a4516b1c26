"""Price table ingestion and daily log-returns."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AlignmentError, InputFormatError, InsufficientDataError, ValidationError
from .pipeline import MultiSeries
from .tabular import _ISO_DATE

# single-series headers understood besides the wide `date,name1,...` form
_PRICE_COLUMNS = ("adj_close", "adj close", "adjclose", "adjusted_close")
_MISSING = ("", "null", "nan", "na", "n/a", ".")


@dataclass
class PriceTable:
    """Per-series ``date -> adjusted close`` maps, kept in insertion order."""

    series: dict[str, dict[np.datetime64, float]] = field(default_factory=dict)

    def add(self, name: str, date: np.datetime64, price: float, where: str = "") -> None:
        prices = self.series.setdefault(name, {})
        if date in prices:
            raise ValidationError(f"{where}duplicate date {date} in series {name!r}")
        if not (price > 0) or not np.isfinite(price):
            raise ValidationError(f"{where}non-positive price {price!r} for {name!r} on {date}")
        prices[date] = float(price)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.series)

    def aligned(self) -> tuple[np.ndarray, np.ndarray]:
        """Dates common to every series and the ``(n, d)`` price matrix on them."""
        if not self.series:
            raise ValidationError("price table is empty")
        for name, prices in self.series.items():
            if len(prices) < 2:
                raise InsufficientDataError(f"series {name!r} has {len(prices)} prices, need at least 2")
        common = set.intersection(*(set(p) for p in self.series.values()))
        if not common:
            raise AlignmentError(f"series {', '.join(map(repr, self.labels))} share no trading dates")
        dates = np.array(sorted(common), dtype="datetime64[D]")
        values = np.array([[self.series[n][d] for n in self.labels] for d in dates], dtype=np.float64)
        return dates, values


def _parse_price(cell: str, path: Path, lineno: int) -> float | None:
    c = cell.strip()
    if c.lower() in _MISSING:
        return None
    try:
        return float(c)
    except ValueError:
        raise InputFormatError(f"cannot parse price {cell!r}", path, lineno) from None


def read_prices(paths: Sequence[str | Path], table: PriceTable | None = None) -> PriceTable:
    """Read one wide file or several single-series files into a :class:`PriceTable`.

    A file whose header has an adjusted-close column (``date,adj_close`` or a
    Yahoo-style export with ``Adj Close``) contributes one series named after
    the file stem. Any other ``date,name1,...,nameN`` header is read as a wide
    table; blank or ``null`` cells mean the series has no price that day.
    """
    table = table if table is not None else PriceTable()
    for raw_path in paths:
        path = Path(raw_path)
        try:
            fh = open(path, newline="")
        except OSError as exc:
            raise InputFormatError(f"cannot open: {exc.strerror}", path) from None
        with fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or len(header) < 2:
                raise InputFormatError("expected a header starting with 'date'", path, 1)
            names = [h.strip() for h in header]
            if names[0].lower() != "date":
                raise InputFormatError(f"first column must be 'date', got {names[0]!r}", path, 1)
            lowered = [h.lower() for h in names]
            price_col = next((lowered.index(c) for c in _PRICE_COLUMNS if c in lowered), None)
            if price_col is not None:
                columns = {path.stem: price_col}
            else:
                columns = {names[k]: k for k in range(1, len(names))}
                if len(set(columns)) != len(names) - 1:
                    raise InputFormatError("duplicate column names", path, 1)
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(names):
                    raise InputFormatError(f"expected {len(names)} fields, got {len(row)}", path, lineno)
                ds = row[0].strip()
                if not _ISO_DATE.match(ds):
                    raise InputFormatError(f"date {ds!r} is not YYYY-MM-DD", path, lineno)
                try:
                    date = np.datetime64(ds, "D")
                except ValueError:
                    raise InputFormatError(f"invalid date {ds!r}", path, lineno) from None
                for name, k in columns.items():
                    price = _parse_price(row[k], path, lineno)
                    if price is not None:
                        table.add(name, date, price, where=f"{path}:{lineno}: ")
    return table


def log_returns(prices: PriceTable) -> MultiSeries:
    """``ln(P_i / P_{i-1})`` on the common trading dates; the first date is dropped."""
    dates, values = prices.aligned()
    if len(dates) < 2:
        raise InsufficientDataError(f"only {len(dates)} common trading date(s); need at least 2")
    return MultiSeries(prices.labels, dates[1:], np.diff(np.log(values), axis=0))


def demo_prices_path() -> Path:
    """Bundled synthetic four-index price file (301 trading days)."""
    return Path(__file__).with_name("data") / "demo_prices.csv"
