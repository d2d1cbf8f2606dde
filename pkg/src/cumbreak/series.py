"""Frequency-tagged time series and the deterministic transforms built on them.

A :class:`Series` is contiguous by construction: element ``k`` belongs to the
period ``start + k``. Every transform returns a new, read-only series.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import DomainError, FrequencyMismatchError, InsufficientDataError


class Frequency(str, enum.Enum):
    ANNUAL = "annual"
    QUARTERLY = "quarterly"

    @property
    def periods_per_year(self) -> int:
        return 1 if self is Frequency.ANNUAL else 4

    @classmethod
    def parse(cls, value) -> "Frequency":
        if isinstance(value, Frequency):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown frequency {value!r}; expected 'annual' or 'quarterly'") from None


_PERIOD_RE = re.compile(r"^\s*(-?\d{1,4})(?:\s*[Qq]([1-4]))?\s*$")


@dataclass(frozen=True, order=True)
class Period:
    """A year, optionally refined to a quarter (1..4)."""

    year: int
    quarter: Optional[int] = None

    def __post_init__(self):
        if self.quarter is not None and not 1 <= self.quarter <= 4:
            raise ValueError(f"quarter must be in 1..4, got {self.quarter}")

    @property
    def frequency(self) -> Frequency:
        return Frequency.ANNUAL if self.quarter is None else Frequency.QUARTERLY

    @property
    def ordinal(self) -> int:
        if self.quarter is None:
            return self.year
        return self.year * 4 + self.quarter - 1

    @classmethod
    def from_ordinal(cls, ordinal: int, frequency: Frequency) -> "Period":
        if frequency is Frequency.ANNUAL:
            return cls(int(ordinal))
        year, q = divmod(int(ordinal), 4)
        return cls(year, q + 1)

    @classmethod
    def parse(cls, text: str) -> "Period":
        m = _PERIOD_RE.match(str(text))
        if m is None:
            raise ValueError(f"cannot parse period {text!r}")
        year = int(m.group(1))
        quarter = int(m.group(2)) if m.group(2) else None
        return cls(year, quarter)

    def advance(self, k: int) -> "Period":
        return Period.from_ordinal(self.ordinal + k, self.frequency)

    def minus(self, other: "Period") -> int:
        """Number of periods from ``other`` to ``self``."""
        _check_same_frequency(self.frequency, other.frequency)
        return self.ordinal - other.ordinal

    def as_decimal_year(self) -> float:
        if self.quarter is None:
            return float(self.year)
        return self.year + (self.quarter - 1) / 4.0

    def __str__(self) -> str:
        if self.quarter is None:
            return f"{self.year}"
        return f"{self.year}Q{self.quarter}"


def _check_same_frequency(a: Frequency, b: Frequency) -> None:
    if a is not b:
        raise FrequencyMismatchError(f"frequency mismatch: {a.value} vs {b.value}")


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Series:
    """Contiguous sequence of finite values starting at ``start``.

    ``cumulative`` marks curves produced by :func:`cumulative_sum`; tests that
    assume at most one unit root refuse them.
    """

    frequency: Frequency
    start: Period
    values: np.ndarray = field(repr=False)
    cumulative: bool = False

    def __post_init__(self):
        freq = Frequency.parse(self.frequency)
        object.__setattr__(self, "frequency", freq)
        start = self.start if isinstance(self.start, Period) else Period.parse(self.start)
        _check_same_frequency(start.frequency, freq)
        object.__setattr__(self, "start", start)
        values = _readonly(self.values)
        if values.size and not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DomainError(f"non-finite value at period {start.advance(bad)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def annual(cls, start_year: int, values: Iterable[float]) -> "Series":
        return cls(Frequency.ANNUAL, Period(start_year), values)

    @classmethod
    def quarterly(cls, start_year: int, start_quarter: int, values: Iterable[float]) -> "Series":
        return cls(Frequency.QUARTERLY, Period(start_year, start_quarter), values)

    def __len__(self) -> int:
        return int(self.values.size)

    def __repr__(self) -> str:
        return f"Series({self.frequency.value}, {self.start}..{self.end}, n={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.frequency is other.frequency
            and self.start == other.start
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def end(self) -> Period:
        """Last period; for an empty series this is the period before ``start``."""
        return self.start.advance(len(self) - 1)

    def period_at(self, k: int) -> Period:
        return self.start.advance(k)

    def periods(self) -> Tuple[Period, ...]:
        return tuple(self.start.advance(k) for k in range(len(self)))

    def index_of(self, period: Period) -> int:
        _check_same_frequency(self.frequency, period.frequency)
        return period.ordinal - self.start.ordinal

    def covers(self, first: Period, last: Period) -> bool:
        return len(self) > 0 and self.index_of(first) >= 0 and self.index_of(last) < len(self)

    def value_at(self, period: Period) -> float:
        k = self.index_of(period)
        if not 0 <= k < len(self):
            raise KeyError(str(period))
        return float(self.values[k])

    def window(self, first: Period, last: Period) -> "Series":
        """Sub-series over ``first..last`` (inclusive), clipped to the data."""
        lo = max(self.index_of(first), 0)
        hi = min(self.index_of(last), len(self) - 1)
        if hi < lo:
            return Series(self.frequency, self.start.advance(max(lo, 0)), [], self.cumulative)
        return Series(self.frequency, self.start.advance(lo), self.values[lo : hi + 1], self.cumulative)

    def with_values(self, values) -> "Series":
        return Series(self.frequency, self.start, values)

    def decimal_years(self) -> np.ndarray:
        return np.array([p.as_decimal_year() for p in self.periods()])

    def __add__(self, other):
        return _binary(self, other, np.add)

    def __sub__(self, other):
        return _binary(self, other, np.subtract)

    def __mul__(self, scalar: float) -> "Series":
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__


def _binary(a: Series, b, op) -> Series:
    if isinstance(b, Series):
        a, b = align(a, b)
        return a.with_values(op(a.values, b.values))
    return a.with_values(op(a.values, float(b)))


def log_growth_rate(level: Series) -> Series:
    """Backward log difference, annualized for quarterly data.

    Element ``t`` is ``ln(X_t) - ln(X_{t-1})``, multiplied by 4 for quarterly
    input. The result starts one period after ``level``.
    """
    if len(level) < 2:
        raise InsufficientDataError("log growth rate needs at least 2 observations")
    v = level.values
    nonpos = np.flatnonzero(v <= 0)
    if nonpos.size:
        raise DomainError(f"non-positive level {v[nonpos[0]]!r} at period {level.period_at(int(nonpos[0]))}")
    rate = np.diff(np.log(v)) * level.frequency.periods_per_year
    return Series(level.frequency, level.start.advance(1), rate)


def cumulative_sum(s: Series) -> Series:
    return Series(s.frequency, s.start, np.cumsum(s.values), cumulative=True)


def moving_average(s: Series, k: int) -> Series:
    """Trailing mean over windows of ``k`` values (right-aligned)."""
    if k < 1:
        raise ValueError("moving average window must be >= 1")
    if k > len(s):
        raise InsufficientDataError(f"moving average window {k} exceeds series length {len(s)}")
    if k == 1:
        return s
    windows = np.lib.stride_tricks.sliding_window_view(s.values, k)
    # offset by each window's first value so constant windows average exactly
    ref = windows[:, 0]
    out = ref + (windows - ref[:, None]).sum(axis=1) / k
    return Series(s.frequency, s.start.advance(k - 1), out)


def lag_shift(s: Series, k: int) -> Series:
    """Relabel ``s`` ``k`` periods later, so period ``t`` reads the value of ``t - k``."""
    if k < 0:
        raise ValueError("lag must be non-negative")
    if k == 0:
        return s
    return Series(s.frequency, s.start.advance(k), s.values, s.cumulative)


def align(a: Series, b: Series) -> Tuple[Series, Series]:
    """Trim both series to their common period span."""
    _check_same_frequency(a.frequency, b.frequency)
    if len(a) == 0 or len(b) == 0:
        return _empty_like(a), _empty_like(b)
    first = max(a.start.ordinal, b.start.ordinal)
    last = min(a.end.ordinal, b.end.ordinal)
    if last < first:
        return _empty_like(a), _empty_like(b)
    p0 = Period.from_ordinal(first, a.frequency)
    p1 = Period.from_ordinal(last, a.frequency)
    return a.window(p0, p1), b.window(p0, p1)


def align_many(*series: Series) -> Tuple[Series, ...]:
    if not series:
        return ()
    first = max(s.start.ordinal for s in series)
    last = min(s.end.ordinal for s in series)
    freq = series[0].frequency
    for s in series[1:]:
        _check_same_frequency(freq, s.frequency)
    if last < first or any(len(s) == 0 for s in series):
        return tuple(_empty_like(s) for s in series)
    p0 = Period.from_ordinal(first, freq)
    p1 = Period.from_ordinal(last, freq)
    return tuple(s.window(p0, p1) for s in series)


def _empty_like(s: Series) -> Series:
    return Series(s.frequency, s.start, [], s.cumulative)


def first_difference(s: Series) -> Series:
    if len(s) < 2:
        raise InsufficientDataError("first difference needs at least 2 observations")
    return Series(s.frequency, s.start.advance(1), np.diff(s.values))
