import math

import numpy as np
import pytest

from tdaews import AlignmentError, InputFormatError, InsufficientDataError, ValidationError
from tdaews.market import PriceTable, demo_prices_path, log_returns, read_prices
from tdaews.tabular import dump_json, fmt_float, parse_date_column, read_series_csv, write_manifest, write_series_csv


def write(path, text):
    path.write_text(text)
    return path


def test_single_return():
    t = PriceTable()
    t.add("X", np.datetime64("2000-01-03"), 100.0)
    t.add("X", np.datetime64("2000-01-04"), 105.0)
    t.add("Y", np.datetime64("2000-01-03"), 1.0)
    t.add("Y", np.datetime64("2000-01-04"), 1.0)
    r = log_returns(t)
    assert r.values.shape == (1, 2)
    assert r.values[0, 0] == pytest.approx(0.0487902, abs=1e-7)
    assert r.values[0, 0] == math.log(105.0) - math.log(100.0)
    assert r.values[0, 1] == 0.0
    assert r.dates[0] == np.datetime64("2000-01-04")


def test_disjoint_dates_alignment_error():
    t = PriceTable()
    for d in ("2000-01-03", "2000-01-04"):
        t.add("X", np.datetime64(d), 1.0)
    for d in ("2001-01-03", "2001-01-04"):
        t.add("Y", np.datetime64(d), 1.0)
    with pytest.raises(AlignmentError):
        log_returns(t)


def test_price_validation():
    t = PriceTable()
    t.add("X", np.datetime64("2000-01-03"), 1.0)
    with pytest.raises(ValidationError, match="duplicate"):
        t.add("X", np.datetime64("2000-01-03"), 2.0)
    with pytest.raises(ValidationError, match="2000-01-04"):
        t.add("X", np.datetime64("2000-01-04"), 0.0)
    t.add("Y", np.datetime64("2000-01-03"), 1.0)
    with pytest.raises(InsufficientDataError):
        t.aligned()


def test_wide_and_single_files_agree(tmp_path):
    wide = write(tmp_path / "wide.csv", "date,A,B\n2000-01-03,10,20\n2000-01-04,11,19\n2000-01-05,12,\n2000-01-06,13,21\n")
    a = write(tmp_path / "A.csv", "Date,Open,Close,Adj Close\n2000-01-03,0,0,10\n2000-01-04,0,0,11\n2000-01-05,0,0,12\n2000-01-06,0,0,13\n")
    b = write(tmp_path / "B.csv", "date,adj_close\n2000-01-03,20\n2000-01-04,19\n2000-01-06,22\n2000-01-06,21\n")
    rw = log_returns(read_prices([wide]))
    with pytest.raises(ValidationError, match="B.csv:5"):
        read_prices([a, b])
    write(b, "date,adj_close\n2000-01-03,20\n2000-01-04,19\n2000-01-06,21\n")
    rs = log_returns(read_prices([a, b]))
    assert rs.labels == ("A", "B")
    np.testing.assert_array_equal(rs.dates, rw.dates)
    np.testing.assert_array_equal(rs.values, rw.values)
    # the gap on 2000-01-05 in B removes that day everywhere
    assert list(rs.dates.astype(str)) == ["2000-01-04", "2000-01-06"]


def test_parse_errors_carry_line_numbers(tmp_path):
    p = write(tmp_path / "bad.csv", "date,A,B\n2000-01-03,1,2\n2000-01-04,x,2\n")
    with pytest.raises(InputFormatError, match="bad.csv:3"):
        read_prices([p])
    p = write(tmp_path / "bad2.csv", "date,A,B\n2000-13-03,1,2\n")
    with pytest.raises(InputFormatError, match=":2"):
        read_prices([p])
    p = write(tmp_path / "bad3.csv", "when,A\n")
    with pytest.raises(InputFormatError, match=":1"):
        read_prices([p])
    with pytest.raises(InputFormatError):
        read_prices([tmp_path / "missing.csv"])


def test_demo_file():
    t = read_prices([demo_prices_path()])
    assert t.labels == ("ALPHA", "BRAVO", "CHARLIE", "DELTA")
    r = log_returns(t)
    assert r.values.shape == (300, 4)


def test_series_csv_roundtrip(tmp_path, rng):
    vals = rng.normal(size=(5, 2)) * 1e-7
    dates = np.arange(np.datetime64("2001-05-01"), np.datetime64("2001-05-06"))
    p = write_series_csv(tmp_path / "s.csv", dates, {"a": vals[:, 0], "b": vals[:, 1]})
    d, cols = read_series_csv(p)
    np.testing.assert_array_equal(d, dates)
    assert cols["a"].tobytes() == vals[:, 0].tobytes()


def test_float_format_round_trips(rng):
    for x in rng.normal(size=100) * 10.0 ** rng.integers(-20, 20, size=100):
        assert float(fmt_float(x)) == x


def test_date_column_parsing():
    assert parse_date_column(["1", "2"]).dtype == np.int64
    assert parse_date_column(["0.5", "2"]).dtype == np.float64
    assert parse_date_column(["2000-01-01"]).dtype == np.dtype("datetime64[D]")
    with pytest.raises(InputFormatError):
        parse_date_column(["2000-01-01", "soon"])


def test_manifest_contents(tmp_path):
    src = write(tmp_path / "in.csv", "date,a\n1,2\n")
    m = write_manifest(tmp_path / "m.json", "analyze", {"window": 5}, inputs=[src], outputs=[tmp_path / "o.csv"])
    text = m.read_text()
    assert '"sha256"' in text and '"window": 5' in text and "PCG64" in text
    assert dump_json({"b": 1, "a": 2}).index('"a"') < dump_json({"b": 1, "a": 2}).index('"b"')
