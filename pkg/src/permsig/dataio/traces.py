"""Trace file readers and writers.

Two textual layouts are understood:

``csv_txy``
    Comma-separated with the header ``t,x,y`` and one sample per row.

``mcyt_like``
    Whitespace-separated columns ``x y p azimuth altitude`` as exported from
    a tablet, one sample per line. Only the first two columns are read;
    pressure and pen angles are ignored. Blank lines and ``#`` comments are
    skipped. This is a textual convention, not the binary corpus format.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path
from typing import Literal

import numpy as np

from permsig.core.errors import ParameterError, SeriesLengthError, TraceParseError
from permsig.core.models import Label, SignatureTrace

logger = logging.getLogger(__name__)

TraceFormat = Literal["csv_txy", "mcyt_like"]
TRACE_FORMATS: tuple[TraceFormat, ...] = ("csv_txy", "mcyt_like")
CSV_HEADER = ("t", "x", "y")
FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """Shortest-safe decimal text that reads back to the same double."""
    return format(float(value), FLOAT_FORMAT)


def read_text(path: Path) -> str:
    """Read a UTF-8 text file.

    Raises:
        TraceParseError: If the bytes are not valid UTF-8.
    """
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        msg = f"not valid UTF-8 text (byte {e.start}: {e.reason})"
        raise TraceParseError(msg, path=str(path)) from e


def _parse_float(text: str, path: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError as e:
        msg = f"not a number: {text!r}"
        raise TraceParseError(msg, path=path, line=line) from e
    if not math.isfinite(value):
        msg = f"non-finite value: {text!r}"
        raise TraceParseError(msg, path=path, line=line)
    return value


def parse_csv_txy(text: str, source: str = "<csv>") -> tuple[list[float], list[float]]:
    """Parse ``t,x,y`` text into x and y lists.

    Raises:
        TraceParseError: On a missing or wrong header, or a malformed row.
    """
    reader = csv.reader(io.StringIO(text))
    xs: list[float] = []
    ys: list[float] = []
    header_seen = False
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if not header_seen:
            if tuple(cell.strip().lower() for cell in row) != CSV_HEADER:
                msg = f"expected header {','.join(CSV_HEADER)!r}, got {','.join(row)!r}"
                raise TraceParseError(msg, path=source, line=line)
            header_seen = True
            continue
        if len(row) != len(CSV_HEADER):
            msg = f"expected {len(CSV_HEADER)} columns, got {len(row)}"
            raise TraceParseError(msg, path=source, line=line)
        _parse_float(row[0], source, line)
        xs.append(_parse_float(row[1], source, line))
        ys.append(_parse_float(row[2], source, line))
    if not header_seen:
        msg = "empty file"
        raise TraceParseError(msg, path=source)
    return xs, ys


def parse_mcyt_like(text: str, source: str = "<table>") -> tuple[list[float], list[float]]:
    """Parse a whitespace table, keeping the first two columns.

    Raises:
        TraceParseError: On a row with fewer than two numeric columns.
    """
    xs: list[float] = []
    ys: list[float] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        fields = content.split()
        if len(fields) < 2:
            msg = f"expected at least 2 columns, got {len(fields)}"
            raise TraceParseError(msg, path=source, line=line_number)
        xs.append(_parse_float(fields[0], source, line_number))
        ys.append(_parse_float(fields[1], source, line_number))
    return xs, ys


def load_trace(
    path: str | Path,
    fmt: TraceFormat = "csv_txy",
    *,
    subject_id: str = "",
    label: Label = "genuine",
    sample_index: int = 0,
) -> SignatureTrace:
    """Read a raw trace from disk.

    Args:
        path: File to read.
        fmt: ``csv_txy`` or ``mcyt_like``.
        subject_id: Writer recorded on the trace.
        label: ``genuine`` or ``forgery``.
        sample_index: Index within the writer's set.

    Returns:
        A raw (not preprocessed) trace with one point per data row.

    Raises:
        TraceParseError: On malformed content, with the line number, or undecodable bytes.
        SeriesLengthError: If fewer than 2 rows were read.
        ParameterError: On an unknown format.
    """
    path = Path(path)
    source = str(path)
    text = read_text(path)
    if fmt == "csv_txy":
        xs, ys = parse_csv_txy(text, source)
    elif fmt == "mcyt_like":
        xs, ys = parse_mcyt_like(text, source)
    else:
        msg = f"unknown trace format {fmt!r}; expected one of {TRACE_FORMATS}"
        raise ParameterError(msg)
    if len(xs) < 2:
        msg = f"{source}: a trace needs at least 2 rows, got {len(xs)}"
        raise SeriesLengthError(msg)
    logger.debug("loaded %d points from %s", len(xs), source)
    return SignatureTrace(
        x=np.array(xs, dtype=np.float64),
        y=np.array(ys, dtype=np.float64),
        subject_id=subject_id,
        label=label,
        sample_index=sample_index,
    )


def dump_trace(trace: SignatureTrace, fmt: TraceFormat = "csv_txy") -> str:
    """Serialise a trace with full double precision."""
    if fmt == "csv_txy":
        lines = [",".join(CSV_HEADER)]
        lines += [
            f"{t},{format_float(x)},{format_float(y)}"
            for t, (x, y) in enumerate(zip(trace.x, trace.y, strict=True))
        ]
    elif fmt == "mcyt_like":
        lines = [f"{format_float(x)} {format_float(y)}" for x, y in zip(trace.x, trace.y, strict=True)]
    else:
        msg = f"unknown trace format {fmt!r}; expected one of {TRACE_FORMATS}"
        raise ParameterError(msg)
    return "\n".join(lines) + "\n"


def write_trace(trace: SignatureTrace, path: str | Path, fmt: TraceFormat = "csv_txy") -> Path:
    """Write a trace so that :func:`load_trace` reads back identical values."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_trace(trace, fmt), encoding="utf-8")
    return path
