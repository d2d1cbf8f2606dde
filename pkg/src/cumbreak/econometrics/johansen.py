"""Johansen trace test for the cointegration rank of two or three series."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import CollinearityError, CumbreakError, InsufficientDataError
from ..series import Series, align_many
from . import tables
from .unitroot import TrendSpec

COLLINEAR_RTOL = 1e-10


@dataclass(frozen=True)
class RankReport:
    trace_statistics: Tuple[float, ...]
    eigenvalues: Tuple[float, ...]
    critical_values: Tuple[Mapping[str, float], ...]
    selected_rank: int
    maxlag: int
    trend: TrendSpec
    nobs: int
    level: str = "5%"


def _partial_out(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    if z.shape[1] == 0:
        return a
    coef = np.linalg.lstsq(z, a, rcond=None)[0]
    return a - z @ coef


def johansen_trace(series_list: Sequence[Series], maxlag: int = 1, trend=TrendSpec.NONE, level: str = "5%") -> RankReport:
    """Trace statistics ``-T * sum_{i>r} ln(1 - lambda_i)`` for ``r = 0..n-1``.

    ``maxlag`` is the number of lagged differences in the VECM. ``trend``
    selects which deterministic terms are partialled out of both the
    differences and the lagged levels: nothing, a constant, or a constant and
    a linear trend. The selected rank is the smallest ``r`` whose statistic
    does not exceed its critical value at ``level``.
    """
    trend = TrendSpec.parse(trend)
    n = len(series_list)
    if not 2 <= n <= 3:
        raise ValueError("johansen_trace supports 2 or 3 series")
    if any(s.cumulative for s in series_list):
        raise CumbreakError("Johansen test refused on cumulative curves (integrated of order 2)")
    if maxlag < 0:
        raise ValueError("maxlag must be non-negative")
    aligned = align_many(*series_list)
    Y = np.column_stack([s.values for s in aligned]) if len(aligned[0]) else np.empty((0, n))
    if Y.shape[0] < 10 * n or Y.shape[0] - 1 - maxlag <= n * (maxlag + 1) + 2:
        raise InsufficientDataError(f"common span of {Y.shape[0]} periods is too short for {n} series")
    sv = np.linalg.svd(Y - Y.mean(axis=0), compute_uv=False)
    if sv[-1] <= COLLINEAR_RTOL * sv[0]:
        raise CollinearityError("input series are (numerically) collinear")

    dY = np.diff(Y, axis=0)
    T = dY.shape[0] - maxlag
    d0 = dY[maxlag:]
    y1 = Y[maxlag:-1]
    z = [dY[maxlag - k : dY.shape[0] - k] for k in range(1, maxlag + 1)]
    if trend is not TrendSpec.NONE:
        z.append(np.ones((T, 1)))
    if trend is TrendSpec.CONSTANT_AND_TREND:
        z.append(np.arange(1.0, T + 1)[:, None])
    Z = np.column_stack(z) if z else np.empty((T, 0))
    r0 = _partial_out(d0, Z)
    r1 = _partial_out(y1, Z)
    s00 = r0.T @ r0 / T
    s01 = r0.T @ r1 / T
    s11 = r1.T @ r1 / T
    try:
        lam = linalg.eigh(s01.T @ linalg.solve(s00, s01, assume_a="pos"), s11, eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise CollinearityError(f"moment matrices are singular: {exc}") from None
    lam = np.clip(np.sort(lam)[::-1], 0.0, 1.0 - 1e-15)
    logs = np.log1p(-lam)
    trace = tuple(float(-T * np.sum(logs[r:])) for r in range(n))
    cvs = tuple(tables.johansen_trace_critical_values(trend.value, n - r) for r in range(n))
    rank = n
    for r in range(n):
        if not trace[r] > cvs[r][level]:
            rank = r
            break
    return RankReport(trace, tuple(float(v) for v in lam), cvs, rank, maxlag, trend, T, level)
