"""Tests for trace file parsing and writing."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from permsig.core.errors import ParameterError, SeriesLengthError, TraceParseError
from permsig.core.models import SignatureTrace
from permsig.dataio.traces import dump_trace, format_float, load_trace, parse_csv_txy, parse_mcyt_like, write_trace


class TestParseCsvTxy:
    """Tests for parse_csv_txy."""

    def test_parses_rows(self) -> None:
        """Should read x and y and ignore the time column."""
        xs, ys = parse_csv_txy("t,x,y\n0,1.5,2\n1,-3e2,4.25\n\n")
        assert xs == [1.5, -300.0]
        assert ys == [2.0, 4.25]

    def test_header_case_and_spacing(self) -> None:
        """Should accept a header with spaces and capitals."""
        assert parse_csv_txy(" T , X , Y \n0,1,2\n") == ([1.0], [2.0])

    def test_wrong_header(self) -> None:
        """Should report a missing header on line 1."""
        with pytest.raises(TraceParseError) as excinfo:
            parse_csv_txy("0,1,2\n", "sig.csv")
        assert excinfo.value.line == 1
        assert str(excinfo.value).startswith("sig.csv:1:")

    def test_bad_number_line(self) -> None:
        """Should report the line of a malformed value."""
        with pytest.raises(TraceParseError) as excinfo:
            parse_csv_txy("t,x,y\n0,1,2\n1,oops,3\n")
        assert excinfo.value.line == 3

    @pytest.mark.parametrize("text", ["t,x,y\n0,1\n", "t,x,y\n0,nan,1\n", ""])
    def test_rejects(self, text: str) -> None:
        """Should reject short rows, non-finite values and empty files."""
        with pytest.raises(TraceParseError):
            parse_csv_txy(text)


class TestParseMcytLike:
    """Tests for parse_mcyt_like."""

    def test_keeps_first_two_columns(self) -> None:
        """Should read x and y and drop pressure and angles."""
        text = "# x y p az al\n10 20 512 900 450\n\n11 22 600 880 460  # pen down\n"
        assert parse_mcyt_like(text) == ([10.0, 11.0], [20.0, 22.0])

    def test_short_row(self) -> None:
        """Should reject a row with a single column."""
        with pytest.raises(TraceParseError) as excinfo:
            parse_mcyt_like("1 2\n3\n")
        assert excinfo.value.line == 2


class TestLoadTrace:
    """Tests for load_trace, dump_trace and write_trace."""

    @pytest.mark.parametrize(("fmt", "suffix"), [("csv_txy", ".csv"), ("mcyt_like", ".txt")])
    def test_exact_values_on_disk(self, tmp_path: Path, raw_trace: SignatureTrace, fmt: str, suffix: str) -> None:
        """Should read back bit-identical coordinates."""
        path = write_trace(raw_trace, tmp_path / "nested" / f"g000{suffix}", fmt)  # type: ignore[arg-type]
        loaded = load_trace(path, fmt, subject_id="s001", label="genuine", sample_index=0)  # type: ignore[arg-type]
        np.testing.assert_array_equal(loaded.x, raw_trace.x)
        np.testing.assert_array_equal(loaded.y, raw_trace.y)
        assert loaded.key == raw_trace.key
        assert not loaded.preprocessed

    def test_csv_layout(self) -> None:
        """Should write a t,x,y header and a sample counter."""
        trace = SignatureTrace(x=np.array([0.5, 1.0]), y=np.array([2.0, 3.0]))
        assert dump_trace(trace) == "t,x,y\n0,0.5,2\n1,1,3\n"

    def test_single_row(self, tmp_path: Path) -> None:
        """Should reject a file with one sample."""
        path = tmp_path / "one.csv"
        path.write_text("t,x,y\n0,1,2\n", encoding="utf-8")
        with pytest.raises(SeriesLengthError):
            load_trace(path)

    @pytest.mark.parametrize("fmt", ["csv_txy", "mcyt_like"])
    def test_undecodable_bytes(self, tmp_path: Path, fmt: str) -> None:
        """Should report bytes that are not UTF-8 as a parse error naming the file."""
        path = tmp_path / "g.csv"
        path.write_bytes(b"\xff\xfet,x,y\n0,1,2\n1,2,3\n")
        with pytest.raises(TraceParseError) as excinfo:
            load_trace(path, fmt)  # type: ignore[arg-type]
        assert excinfo.value.path == str(path)
        assert "UTF-8" in str(excinfo.value)

    def test_unknown_format(self, tmp_path: Path, raw_trace: SignatureTrace) -> None:
        """Should reject unknown layouts."""
        path = write_trace(raw_trace, tmp_path / "g.csv")
        with pytest.raises(ParameterError):
            load_trace(path, "binary")  # type: ignore[arg-type]
        with pytest.raises(ParameterError):
            dump_trace(raw_trace, "binary")  # type: ignore[arg-type]

    def test_format_float_is_exact(self, rng: np.random.Generator) -> None:
        """Should give text that reads back to the same double."""
        for value in rng.normal(scale=1e3, size=100):
            assert float(format_float(value)) == value
