"""Lagged linear models driven by labour-force growth.

Two families are represented:

* :class:`PiecewiseLinearModel` -- ``y_t = slope(t) * l_{t-lag} + intercept(t)``
  where the (slope, intercept) pair switches at one or more break periods.
  A period ``t`` belongs to the last segment whose break is ``<= t``.
* :class:`GeneralizedModel` -- ``pi_t = c1 * l_{t-i} + c2 * u_{t-k} + c3``,
  the inflation/unemployment balance with a single coefficient set.

Predictions are raw linear values; nothing is clamped.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import CoverageError, InsufficientDataError
from .series import Period, Series, align, lag_shift


class ResponseKind(str, enum.Enum):
    INFLATION = "inflation"
    UNEMPLOYMENT = "unemployment"


@dataclass(frozen=True)
class Segment:
    break_start: Optional[Period]
    slope: float
    intercept: float


@dataclass(frozen=True)
class PiecewiseLinearModel:
    lag: int
    segments: Tuple[Segment, ...]
    response_kind: ResponseKind = ResponseKind.INFLATION

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "response_kind", ResponseKind(self.response_kind))
        if self.lag < 0:
            raise ValueError("lag must be non-negative")
        if not segs:
            raise ValueError("a model needs at least one segment")
        if segs[0].break_start is not None:
            raise ValueError("the first segment cannot have a break period")
        breaks = [s.break_start for s in segs[1:]]
        if any(b is None for b in breaks):
            raise ValueError("every segment after the first needs a break period")
        for a, b in zip(breaks, breaks[1:]):
            if not b.minus(a) > 0:
                raise ValueError("break periods must be strictly increasing")

    @classmethod
    def single(cls, slope, intercept, lag=0, response_kind=ResponseKind.INFLATION):
        return cls(lag, (Segment(None, float(slope), float(intercept)),), response_kind)

    @classmethod
    def with_break(cls, pre, post, break_start, lag=0, response_kind=ResponseKind.INFLATION):
        """Two-segment model from ``(slope, intercept)`` pairs."""
        return cls(
            lag,
            (Segment(None, float(pre[0]), float(pre[1])), Segment(break_start, float(post[0]), float(post[1]))),
            response_kind,
        )

    @property
    def breaks(self) -> Tuple[Period, ...]:
        return tuple(s.break_start for s in self.segments[1:])

    def segment_index(self, period: Period) -> int:
        idx = 0
        for k, b in enumerate(self.breaks, start=1):
            if period.minus(b) >= 0:
                idx = k
        return idx

    def segment_for(self, period: Period) -> Segment:
        return self.segments[self.segment_index(period)]

    def pre_break(self) -> "PiecewiseLinearModel":
        """The first segment applied to every period (the counterfactual model)."""
        return PiecewiseLinearModel(self.lag, self.segments[:1], self.response_kind)

    def coefficient_arrays(self, first: Period, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Per-period slope and intercept over ``n`` periods from ``first``."""
        slopes = np.full(n, self.segments[0].slope)
        intercepts = np.full(n, self.segments[0].intercept)
        for seg in self.segments[1:]:
            k = max(seg.break_start.minus(first), 0)
            slopes[k:] = seg.slope
            intercepts[k:] = seg.intercept
        return slopes, intercepts

    def to_text(self) -> str:
        lines = ["model = piecewise", f"response_kind = {self.response_kind.value}", f"lag = {self.lag}"]
        for seg in self.segments:
            brk = "-" if seg.break_start is None else str(seg.break_start)
            lines.append(f"segment = {brk},{seg.slope!r},{seg.intercept!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PiecewiseLinearModel":
        kv = _parse_kv(text)
        if kv.get("model", ["piecewise"])[0] != "piecewise":
            raise ValueError("not a piecewise model document")
        segments = []
        for item in kv.get("segment", []):
            brk, slope, intercept = (p.strip() for p in item.split(","))
            segments.append(Segment(None if brk in ("-", "") else Period.parse(brk), float(slope), float(intercept)))
        return cls(int(kv["lag"][0]), tuple(segments), ResponseKind(kv["response_kind"][0]))


@dataclass(frozen=True)
class GeneralizedModel:
    """``pi_t = c1 * l_{t - driver_lag} + c2 * u_{t - unemployment_lag} + c3``.

    ``unemployment_lag`` equals ``i - j`` in the balance form
    ``u_{t + j - i}``; only backward shifts (``>= 0``) are supported.
    """

    c1: float
    c2: float
    c3: float
    driver_lag: int = 0
    unemployment_lag: int = 0

    def __post_init__(self):
        if self.driver_lag < 0:
            raise ValueError("driver_lag must be non-negative")
        if self.unemployment_lag < 0:
            raise ValueError("forward unemployment shifts are not supported (unemployment_lag < 0)")

    def to_text(self) -> str:
        return (
            "model = generalized\n"
            f"c1 = {self.c1!r}\nc2 = {self.c2!r}\nc3 = {self.c3!r}\n"
            f"driver_lag = {self.driver_lag}\nunemployment_lag = {self.unemployment_lag}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "GeneralizedModel":
        kv = _parse_kv(text)
        if kv.get("model", [""])[0] != "generalized":
            raise ValueError("not a generalized model document")
        return cls(
            float(kv["c1"][0]),
            float(kv["c2"][0]),
            float(kv["c3"][0]),
            int(kv["driver_lag"][0]),
            int(kv["unemployment_lag"][0]),
        )


@dataclass(frozen=True)
class GapSeries:
    gap: Series
    window: Tuple[Period, Period]
    window_mean: float


def _parse_kv(text: str):
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out.setdefault(key.strip(), []).append(value.strip())
    return out


def _resolve_span(available: Series, first: Optional[Period], last: Optional[Period]) -> Tuple[Period, Period]:
    if first is None:
        first = available.start
    if last is None:
        last = available.end
    if len(available) == 0 or not available.covers(first, last):
        raise CoverageError(
            f"driver does not cover {first}..{last} after lagging "
            f"(available {available.start}..{available.end})"
        )
    return first, last


def predict_univariate(model: PiecewiseLinearModel, l: Series, first: Period = None, last: Period = None) -> Series:
    """Evaluate ``slope(t) * l_{t-lag} + intercept(t)``.

    Without an explicit span the prediction covers every period for which the
    lagged driver exists.
    """
    lagged = lag_shift(l, model.lag)
    first, last = _resolve_span(lagged, first, last)
    x = lagged.window(first, last)
    slopes, intercepts = model.coefficient_arrays(first, len(x))
    return Series(l.frequency, first, slopes * x.values + intercepts)


def predict_generalized(model: GeneralizedModel, l: Series, u: Series, first: Period = None, last: Period = None) -> Series:
    ll, uu = align(lag_shift(l, model.driver_lag), lag_shift(u, model.unemployment_lag))
    first, last = _resolve_span(ll, first, last)
    ll = ll.window(first, last)
    uu = uu.window(first, last)
    return Series(l.frequency, first, model.c1 * ll.values + model.c2 * uu.values + model.c3)


def balance_sum(m_pi: PiecewiseLinearModel, m_u: PiecewiseLinearModel, l: Series, first=None, last=None) -> Series:
    """Sum of the inflation and unemployment predictions over their shared span."""
    a = lag_shift(l, m_pi.lag)
    b = lag_shift(l, m_u.lag)
    a, _ = align(a, b)
    first, last = _resolve_span(a, first, last)
    return predict_univariate(m_pi, l, first, last) + predict_univariate(m_u, l, first, last)


def counterfactual_gap(
    observed: Series,
    model: PiecewiseLinearModel,
    l: Series,
    window: Sequence[Period],
) -> GapSeries:
    """Observed minus the prediction of ``model``'s pre-break segment.

    The pre-break relation is extended over the whole observed span; the gap
    mean is taken over the inclusive ``window``.
    """
    counter = model.pre_break()
    lagged = lag_shift(l, counter.lag)
    obs, lagged = align(observed, lagged)
    if len(obs) == 0:
        raise CoverageError("observed series and lagged driver do not overlap")
    predicted = predict_univariate(counter, l, obs.start, obs.end)
    gap = obs.with_values(obs.values - predicted.values)
    lo, hi = window
    sub = gap.window(lo, hi)
    if len(sub) == 0:
        raise InsufficientDataError(f"gap window {lo}..{hi} does not overlap the data")
    return GapSeries(gap, (lo, hi), float(np.mean(sub.values)))
