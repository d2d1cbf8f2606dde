"""Least-squares calibration on cumulative curves.

Coefficients are chosen to minimise the L2 distance between the running sum
of the observed response and the running sum of the model prediction, both
anchored at the first fitted period. For a piecewise model the predicted
cumulative curve is linear in the coefficients, with design columns

* running sum of the lagged driver inside each segment, and
* running count of periods inside each segment (the accumulated intercept).

A single cumulative curve spans the break, so the integral stays continuous.
:func:`search` scans break periods around a candidate and a range of lags and
keeps the fit with the lowest cumulative RMS residual.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import _backend
from .errors import CoverageError, DegenerateFitError, FrequencyMismatchError, InsufficientDataError
from .models import GeneralizedModel, PiecewiseLinearModel, ResponseKind, predict_generalized, predict_univariate
from .series import Frequency, Period, Series, align, align_many, cumulative_sum, lag_shift, moving_average

MIN_SEGMENT = 3
MIN_GENERALIZED = 5
# relative RMS difference treated as an exact tie in search
TIE_RTOL = 1e-9


class Metric(str, enum.Enum):
    L2 = "L2"
    L1 = "L1"


@dataclass(frozen=True)
class CalibrationConfig:
    """Search grid for :func:`search`.

    ``lag_range`` is inclusive. ``metric`` only changes which norm is used to
    rank candidates in reports; fitting is always L2. ``smoothing`` applies a
    trailing moving average of that window to driver and response first.
    """

    break_candidate: Optional[Period] = None
    break_window: int = 4
    lag_range: Tuple[int, int] = (0, 5)
    metric: Metric = Metric.L2
    smoothing: Optional[int] = None
    include_no_break: bool = True

    def __post_init__(self):
        object.__setattr__(self, "metric", Metric(self.metric))
        lo, hi = self.lag_range
        if self.break_window < 0:
            raise ValueError("break_window must be >= 0")
        if lo < 0 or hi < lo:
            raise ValueError(f"invalid lag range {lo}..{hi}")
        if self.smoothing is not None and self.smoothing < 1:
            raise ValueError("smoothing window must be >= 1")

    @classmethod
    def default(cls, frequency: Frequency, break_candidate: Optional[Period] = None, **kw) -> "CalibrationConfig":
        lags = (0, 5) if Frequency.parse(frequency) is Frequency.ANNUAL else (0, 12)
        kw.setdefault("lag_range", lags)
        return cls(break_candidate=break_candidate, **kw)

    def lags(self) -> range:
        return range(self.lag_range[0], self.lag_range[1] + 1)

    def break_periods(self) -> Tuple[Period, ...]:
        if self.break_candidate is None:
            return ()
        w = self.break_window
        return tuple(self.break_candidate.advance(k) for k in range(-w, w + 1))


@dataclass(frozen=True)
class CandidateFit:
    break_start: Optional[Period]
    lag: int
    rms_cumulative: float


@dataclass(frozen=True)
class CalibrationResult:
    model: Union[PiecewiseLinearModel, GeneralizedModel]
    break_year: Optional[Period]
    lag: int
    observed: Series
    predicted: Series
    residual_dynamic: Series
    residual_cumulative: Series
    rms_cumulative: float
    rms_dynamic: float
    r2_dynamic: float
    r2_cumulative: float
    l1_cumulative: float
    l1_dynamic: float
    candidates: Tuple[CandidateFit, ...] = field(default=())

    @property
    def first(self) -> Period:
        return self.observed.start

    @property
    def last(self) -> Period:
        return self.observed.end

    @property
    def nobs(self) -> int:
        return len(self.observed)


@dataclass(frozen=True)
class ForecastEvaluation:
    horizon: int
    model_rmsfe: float
    naive_rmsfe: float
    nobs: int
    first: Period
    last: Period


def r_squared(observed: Series, predicted: Series) -> float:
    """``1 - SSR/SST`` about the observed mean; negative when worse than the mean."""
    a, b = align(observed, predicted)
    if len(a) != len(observed) or len(b) != len(predicted):
        raise ValueError("r_squared needs series over identical spans")
    y = a.values
    sst = float(np.sum((y - y.mean()) ** 2))
    if not sst > 0.0:
        raise InsufficientDataError("observed series has zero variance")
    ssr = float(np.sum((y - b.values) ** 2))
    return 1.0 - ssr / sst


def _r2_or_nan(observed: Series, predicted: Series) -> float:
    try:
        return r_squared(observed, predicted)
    except InsufficientDataError:
        return math.nan


def rmsfe(observed: Series, predicted: Series, horizon: int = 1) -> float:
    """Root-mean-square difference over the common span."""
    if horizon < 1:
        raise ValueError("forecast horizon must be >= 1")
    a, b = align(observed, predicted)
    if len(a) == 0:
        raise InsufficientDataError("observed and predicted series do not overlap")
    d = a.values - b.values
    return float(np.sqrt(np.mean(d * d)))


def naive_forecast(series: Series, horizon: int) -> Series:
    """No-change forecast: the value observed ``horizon`` periods earlier."""
    if horizon < 1:
        raise ValueError("forecast horizon must be >= 1")
    if horizon >= len(series):
        raise InsufficientDataError(f"horizon {horizon} leaves no forecasts for a series of length {len(series)}")
    return Series(series.frequency, series.start.advance(horizon), series.values[:-horizon])


def evaluate_forecast(
    model: Union[PiecewiseLinearModel, GeneralizedModel],
    observed: Series,
    l: Series,
    horizon: int,
    u: Optional[Series] = None,
) -> ForecastEvaluation:
    """Compare the model forecast with the naive forecast at ``horizon``.

    The model prediction at ``t`` only uses data from ``t - lag``, so it is a
    genuine forecast when the lag is at least the horizon.
    """
    lag = model.lag if isinstance(model, PiecewiseLinearModel) else min(model.driver_lag, model.unemployment_lag)
    if lag < horizon:
        raise ValueError(f"model lag {lag} is shorter than the forecast horizon {horizon}")
    if isinstance(model, PiecewiseLinearModel):
        pred = predict_univariate(model, l)
    else:
        if u is None:
            raise ValueError("a generalized model needs the unemployment series")
        pred = predict_generalized(model, l, u)
    naive = naive_forecast(observed, horizon)
    obs, pred, naive = align_many(observed, pred, naive)
    if len(obs) == 0:
        raise InsufficientDataError("no common span for forecast evaluation")
    return ForecastEvaluation(
        horizon,
        rmsfe(obs, pred, horizon),
        rmsfe(obs, naive, horizon),
        len(obs),
        obs.start,
        obs.end,
    )


def _metrics(observed: Series, predicted: Series):
    resid = observed.with_values(observed.values - predicted.values)
    cum_obs = cumulative_sum(observed)
    cum_pred = cumulative_sum(predicted)
    cum_resid = Series(observed.frequency, observed.start, cum_obs.values - cum_pred.values, cumulative=True)
    return dict(
        residual_dynamic=resid,
        residual_cumulative=cum_resid,
        rms_cumulative=float(np.sqrt(np.mean(cum_resid.values**2))),
        rms_dynamic=float(np.sqrt(np.mean(resid.values**2))),
        r2_dynamic=_r2_or_nan(observed, predicted),
        r2_cumulative=_r2_or_nan(cum_obs, cum_pred),
        l1_cumulative=float(np.mean(np.abs(cum_resid.values))),
        l1_dynamic=float(np.mean(np.abs(resid.values))),
    )


def _fit_window(driver: Series, response: Series, lag: int, first: Optional[Period], last: Optional[Period]):
    if driver.frequency is not response.frequency:
        raise FrequencyMismatchError("driver and response frequencies differ")
    resp, x = align(response, lag_shift(driver, lag))
    if len(resp) == 0:
        raise CoverageError("response and lagged driver do not overlap")
    if first is not None or last is not None:
        first = resp.start if first is None else first
        last = resp.end if last is None else last
        if not resp.covers(first, last):
            raise CoverageError(f"requested span {first}..{last} not covered (available {resp.start}..{resp.end})")
        resp = resp.window(first, last)
        x = x.window(first, last)
    return resp, x


def fit_cumulative_lsq(
    driver: Series,
    response: Series,
    break_start: Optional[Period] = None,
    lag: int = 0,
    first: Optional[Period] = None,
    last: Optional[Period] = None,
    response_kind: ResponseKind = ResponseKind.INFLATION,
) -> CalibrationResult:
    """Fit one (break, lag) configuration on cumulative curves.

    Without ``first``/``last`` the fit uses every period where the response and
    the lagged driver overlap.
    """
    if lag < 0:
        raise ValueError("lag must be non-negative")
    resp, x = _fit_window(driver, response, lag, first, last)
    n = len(resp)
    brk = 0
    if break_start is not None:
        brk = break_start.minus(resp.start)
        if brk < MIN_SEGMENT or n - brk < MIN_SEGMENT:
            raise InsufficientDataError(
                f"break {break_start} leaves a segment shorter than {MIN_SEGMENT} periods in {resp.start}..{resp.end}"
            )
    elif n < MIN_SEGMENT:
        raise InsufficientDataError(f"need at least {MIN_SEGMENT} periods, got {n}")
    coef, _, status = _backend.cumfit(x.values, resp.values, brk)
    if status != _backend.OK:
        raise DegenerateFitError(
            "cumulative design is rank deficient: the driver has no variation "
            "independent of the intercept in at least one segment"
        )
    if brk:
        model = PiecewiseLinearModel.with_break(coef[:2], coef[2:], break_start, lag, response_kind)
    else:
        model = PiecewiseLinearModel.single(coef[0], coef[1], lag, response_kind)
    predicted = predict_univariate(model, driver, resp.start, resp.end)
    return CalibrationResult(model, break_start, lag, resp, predicted, **_metrics(resp, predicted))


def _search_span(config: CalibrationConfig, driver: Series, response: Series) -> Tuple[Period, Period]:
    lags = config.lags()
    first = max(response.start.ordinal, driver.start.ordinal + lags[-1])
    last = min(response.end.ordinal, driver.end.ordinal + lags[0])
    if last - first + 1 < 2 * MIN_SEGMENT:
        raise InsufficientDataError("response and lagged driver overlap too little for the lag range")
    return Period.from_ordinal(first, response.frequency), Period.from_ordinal(last, response.frequency)


def _pick(candidates: Sequence[CandidateFit], tol: float) -> CandidateFit:
    finite = [c for c in candidates if math.isfinite(c.rms_cumulative)]
    if not finite:
        raise DegenerateFitError("every candidate fit is degenerate")
    best = min(c.rms_cumulative for c in finite)
    tied = [c for c in finite if c.rms_cumulative <= best + tol]

    def order(c):
        if c.break_start is None:
            return (c.lag, 0, 0)
        return (c.lag, 1, c.break_start.ordinal)

    return min(tied, key=order)


def search(
    config: CalibrationConfig,
    driver: Series,
    response: Series,
    response_kind: ResponseKind = ResponseKind.INFLATION,
) -> CalibrationResult:
    """Exhaustive (break, lag) search minimising the cumulative RMS residual.

    All candidates are fitted over one common span (the periods where the
    driver exists at every lag in range) so their residuals are comparable.
    Exact ties go to the smaller lag, then to the no-break model, then to the
    earlier break.
    """
    if driver.frequency is not response.frequency:
        raise FrequencyMismatchError("driver and response frequencies differ")
    if config.break_candidate is not None and config.break_candidate.frequency is not response.frequency:
        raise FrequencyMismatchError("break candidate frequency differs from the data")
    if config.smoothing and config.smoothing > 1:
        driver = moving_average(driver, config.smoothing)
        response = moving_average(response, config.smoothing)
    first, last = _search_span(config, driver, response)
    n = last.minus(first) + 1
    breaks = config.break_periods()
    idx = np.array([b.minus(first) for b in breaks], dtype=np.int64)
    if idx.size and (idx.min() < MIN_SEGMENT or idx.max() > n - MIN_SEGMENT):
        raise InsufficientDataError(
            f"break window {breaks[0]}..{breaks[-1]} does not fit inside the fitted span {first}..{last} "
            f"with at least {MIN_SEGMENT} periods per segment"
        )
    y = response.window(first, last).values
    lags = list(config.lags())
    xs = np.vstack([lag_shift(driver, k).window(first, last).values for k in lags])
    ssr = _backend.cumfit_grid(xs, y, idx)
    rms = np.sqrt(ssr / n)

    candidates = []
    for i, k in enumerate(lags):
        if config.include_no_break or not breaks:
            candidates.append(CandidateFit(None, k, float(rms[i, 0])))
        for j, b in enumerate(breaks):
            candidates.append(CandidateFit(b, k, float(rms[i, j + 1])))
    scale = float(np.sqrt(np.mean(np.cumsum(y) ** 2)))
    best = _pick(candidates, TIE_RTOL * max(scale, np.finfo(float).tiny))
    result = fit_cumulative_lsq(driver, response, best.break_start, best.lag, first, last, response_kind)
    return replace(result, candidates=tuple(candidates))


def fit_generalized(
    l: Series,
    u: Series,
    pi: Series,
    driver_lag: int = 0,
    unemployment_lag: int = 0,
    first: Optional[Period] = None,
    last: Optional[Period] = None,
) -> CalibrationResult:
    """Fit ``pi_t = c1 l_{t-i} + c2 u_{t-k} + c3`` on cumulative curves.

    When labour force and unemployment are themselves exactly linked the three
    columns are collinear; the minimum-norm solution (in column-equilibrated
    coordinates) is returned in that case.
    """
    if driver_lag < 0 or unemployment_lag < 0:
        raise ValueError("lags must be non-negative")
    obs, ll, uu = align_many(pi, lag_shift(l, driver_lag), lag_shift(u, unemployment_lag))
    if first is not None or last is not None:
        first = obs.start if first is None else first
        last = obs.end if last is None else last
        if not obs.covers(first, last):
            raise CoverageError(f"requested span {first}..{last} not covered")
        obs, ll, uu = (s.window(first, last) for s in (obs, ll, uu))
    n = len(obs)
    if n < MIN_GENERALIZED:
        raise InsufficientDataError(f"generalized fit needs at least {MIN_GENERALIZED} periods, got {n}")
    design = np.column_stack((np.cumsum(ll.values), np.cumsum(uu.values), np.arange(1.0, n + 1)))
    target = np.cumsum(obs.values)
    norms = np.linalg.norm(design, axis=0)
    scale = np.where(norms > 0, norms, 1.0)
    z, _, rank, _ = np.linalg.lstsq(design / scale, target, rcond=1e-10)
    if rank < 2:
        raise DegenerateFitError("generalized design has fewer than two identifiable columns")
    c = z / scale
    model = GeneralizedModel(float(c[0]), float(c[1]), float(c[2]), driver_lag, unemployment_lag)
    predicted = predict_generalized(model, l, u, obs.start, obs.end)
    return CalibrationResult(model, None, driver_lag, obs, predicted, **_metrics(obs, predicted))


def divergence_rate(gap: Series, start: Period) -> float:
    """Least-squares slope of the cumulative gap from ``start`` onwards.

    ``gap`` is a dynamic residual; it is cumulated from its first period, and
    the slope per period of that curve is estimated over ``start..end``.
    """
    cum = cumulative_sum(gap).window(start, gap.end)
    if len(cum) < 2:
        raise InsufficientDataError("need at least two post-break periods")
    t = np.arange(len(cum), dtype=float)
    return float(np.polyfit(t, cum.values, 1)[0])
