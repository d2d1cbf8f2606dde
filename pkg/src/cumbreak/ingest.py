"""CSV input and output.

Input files carry exactly two columns under the header ``period,value``.
Annual periods are written ``1962``, quarterly ones ``1962Q1``. Values are
written with :func:`repr`, the shortest decimal string that reads back to the
same double, so a written series loads back bit for bit.
"""
from __future__ import annotations

import math
import os
from typing import Optional, Union

import numpy as np

from .errors import FrequencyMismatchError, IngestError, OutputError
from .series import Frequency, Period, Series, align, cumulative_sum

HEADER = "period,value"
CURVE_HEADER = "period,observed,predicted,residual"

PathLike = Union[str, "os.PathLike[str]"]


def _read_text(path: PathLike) -> str:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror or exc}", path) from None
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise IngestError(f"not valid UTF-8 (byte offset {exc.start})", path) from None


def parse_csv(text: str, frequency: Optional[Frequency] = None, path: Optional[PathLike] = None) -> Series:
    """Parse CSV text into a contiguous series.

    Blank lines are ignored; every other row must follow its predecessor by
    exactly one period.
    """
    if frequency is not None:
        frequency = Frequency.parse(frequency)
    lines = text.splitlines()
    lineno = 0
    header = None
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip():
            header = raw
            break
    if header is None:
        raise IngestError("empty file", path)
    if header.replace(" ", "").lower() != HEADER:
        raise IngestError(f"expected header {HEADER!r}, found {header.strip()!r}", path, lineno)

    start = None
    prev = None
    values = []
    for num in range(lineno + 1, len(lines) + 1):
        raw = lines[num - 1]
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 2:
            raise IngestError(f"expected 2 fields, found {len(fields)}", path, num)
        try:
            period = Period.parse(fields[0])
        except ValueError:
            raise IngestError(f"unparsable period {fields[0].strip()!r}", path, num) from None
        if frequency is None:
            frequency = period.frequency
        if period.frequency is not frequency:
            raise IngestError(
                f"period {period} is {period.frequency.value} but the series is {frequency.value}", path, num
            )
        try:
            value = float(fields[1])
        except ValueError:
            raise IngestError(f"unparsable value {fields[1].strip()!r}", path, num) from None
        if not math.isfinite(value):
            raise IngestError(f"non-finite value {fields[1].strip()!r}", path, num)
        if prev is not None:
            step = period.minus(prev)
            if step == 0:
                raise IngestError(f"duplicate period {period}", path, num)
            if step < 0:
                raise IngestError(f"period {period} out of order after {prev}", path, num)
            if step > 1:
                raise IngestError(f"gap: expected {prev.advance(1)}, found {period}", path, num)
        else:
            start = period
        prev = period
        values.append(value)
    if start is None:
        raise IngestError("no data rows", path)
    return Series(frequency, start, np.array(values))


def load_csv(path: PathLike, frequency=None) -> Series:
    """Load and validate a ``period,value`` file.

    With ``frequency`` given, rows of the other frequency are rejected;
    otherwise it is taken from the first row.
    """
    text = _read_text(path)
    try:
        return parse_csv(text, frequency, path)
    except FrequencyMismatchError as exc:
        raise IngestError(str(exc), path) from None


def _fmt(v: float) -> str:
    return repr(float(v))


def _write(path: PathLike, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {os.fspath(path)}: {exc.strerror or exc}") from None


def format_series_csv(s: Series) -> str:
    rows = [HEADER]
    rows.extend(f"{p},{_fmt(v)}" for p, v in zip(s.periods(), s.values))
    return "\n".join(rows) + "\n"


def write_series_csv(s: Series, path: PathLike) -> None:
    _write(path, format_series_csv(s))


def format_curves(observed: Series, predicted: Series, kind: str = "dynamic") -> str:
    if kind not in ("dynamic", "cumulative"):
        raise ValueError(f"curve kind must be 'dynamic' or 'cumulative', got {kind!r}")
    a, b = align(observed, predicted)
    if len(a) != len(observed) or len(b) != len(predicted):
        raise ValueError(
            f"observed ({observed.start}..{observed.end}) and predicted "
            f"({predicted.start}..{predicted.end}) must cover the same periods"
        )
    if kind == "cumulative":
        a, b = cumulative_sum(a), cumulative_sum(b)
    rows = [CURVE_HEADER]
    for p, o, q in zip(a.periods(), a.values, b.values):
        rows.append(f"{p},{_fmt(o)},{_fmt(q)},{_fmt(o - q)}")
    return "\n".join(rows) + "\n"


def emit_curves(observed: Series, predicted: Series, kind: str, path: PathLike) -> None:
    """Write observed, predicted and residual columns; ``cumulative`` sums both first."""
    _write(path, format_curves(observed, predicted, kind))
