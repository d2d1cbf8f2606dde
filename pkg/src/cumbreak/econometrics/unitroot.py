"""Unit-root tests: augmented Dickey-Fuller, Phillips-Perron and DF-GLS.

All tests share :class:`TestReport`. A regression whose residuals vanish
(e.g. an exactly geometric series, or an all-zero residual) has an unbounded
t-ratio; such cases are reported with ``degenerate=True`` and no statistic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional

import numpy as np

from .. import _backend
from ..errors import InsufficientDataError, RankDeficiencyError
from ..series import Series
from . import tables
from .ols import ols

# residual sum of squares below this fraction of sum(dy**2) counts as a perfect fit
PERFECT_FIT_RTOL = 1e-20


class TrendSpec(str, enum.Enum):
    NONE = "none"
    CONSTANT = "constant"
    CONSTANT_AND_TREND = "constant_and_trend"

    @classmethod
    def parse(cls, value) -> "TrendSpec":
        if isinstance(value, TrendSpec):
            return value
        aliases = {"n": "none", "nc": "none", "c": "constant", "ct": "constant_and_trend", "trend": "constant_and_trend"}
        v = str(value).strip().lower()
        return cls(aliases.get(v, v))


@dataclass(frozen=True)
class TestReport:
    """Outcome of a unit-root test.

    ``statistics`` holds every statistic the test produces, ``primary`` names
    the one used for the verdict, and ``critical_values`` maps statistic name
    to ``{"1%": .., "5%": .., "10%": ..}``.
    """

    __test__ = False  # not a pytest class

    test_name: str
    statistics: Mapping[str, float]
    primary: str
    lag_or_bandwidth: int
    trend: TrendSpec
    critical_values: Mapping[str, Mapping[str, float]]
    nobs: int
    degenerate: bool = False
    extra: Mapping[str, float] = field(default_factory=dict)

    @property
    def statistic(self) -> Optional[float]:
        if self.degenerate:
            return None
        return self.statistics[self.primary]

    def reject_at_for(self, name: str) -> Optional[str]:
        """Smallest tabulated level at which ``name`` falls below its critical value."""
        if self.degenerate:
            return None
        stat = self.statistics[name]
        for level in tables.LEVELS:
            if stat < self.critical_values[name][level]:
                return level
        return None

    @property
    def reject_at(self) -> Optional[str]:
        return self.reject_at_for(self.primary)

    def rejects(self, level: str = "5%", name: Optional[str] = None) -> bool:
        at = self.reject_at_for(name or self.primary)
        return at is not None and tables.LEVELS.index(at) <= tables.LEVELS.index(level)


def _values(s) -> np.ndarray:
    if isinstance(s, Series):
        return s.values
    return np.asarray(s, dtype=np.float64).reshape(-1)


def _deterministic(trend: TrendSpec, nobs: int, offset: int):
    cols, names = [], []
    if trend is not TrendSpec.NONE:
        cols.append(np.ones(nobs))
        names.append("const")
    if trend is TrendSpec.CONSTANT_AND_TREND:
        cols.append(np.arange(offset + 1, offset + nobs + 1, dtype=float))
        names.append("trend")
    return cols, names


def df_regression(y: np.ndarray, lags: int, trend: TrendSpec):
    """Design of ``dy_t = det + rho*y_{t-1} + sum_k g_k dy_{t-k}``.

    Returns ``(dependent, design, names)``; the lagged level is column 0.
    """
    dy = np.diff(y)
    nobs = dy.shape[0] - lags
    dep = dy[lags:]
    cols = [y[lags:-1]]
    names = ["y.l1"]
    for k in range(1, lags + 1):
        cols.append(dy[lags - k : dy.shape[0] - k])
        names.append(f"dy.l{k}")
    det, det_names = _deterministic(trend, nobs, lags + 1)
    return dep, np.column_stack(cols + det), names + det_names


def _t_on_level(y: np.ndarray, lags: int, trend: TrendSpec):
    dep, X, names = df_regression(y, lags, trend)
    scale = float(dep @ dep)
    if scale == 0.0:
        return None, dep.shape[0]
    try:
        res = ols(dep, X, names)
    except RankDeficiencyError:
        return None, dep.shape[0]
    if res.ssr <= PERFECT_FIT_RTOL * scale:
        return None, dep.shape[0]
    return res, dep.shape[0]


def adf_test(s, lags: int = 1, trend=TrendSpec.CONSTANT) -> TestReport:
    """Augmented Dickey-Fuller t-test on the lagged level coefficient."""
    trend = TrendSpec.parse(trend)
    y = _values(s)
    if lags < 0:
        raise ValueError("lags must be non-negative")
    if y.shape[0] < lags + 10:
        raise InsufficientDataError(f"ADF with {lags} lags needs at least {lags + 10} observations, got {y.shape[0]}")
    res, nobs = _t_on_level(y, lags, trend)
    cv = {"t": tables.tau_critical_values(trend.value, nobs)}
    if res is None:
        return TestReport("ADF", {"t": math.nan}, "t", lags, trend, cv, nobs, degenerate=True)
    return TestReport("ADF", {"t": float(res.tvalues[0])}, "t", lags, trend, cv, nobs, extra={"rho": float(res.params[0])})


def default_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


def pp_test(s, trend=TrendSpec.CONSTANT, bandwidth: Optional[int] = None) -> TestReport:
    """Phillips-Perron z(rho) and z(t) with a Bartlett long-run variance.

    The lag-0 Dickey-Fuller regression is corrected non-parametrically:

        z(rho) = T*rho - 0.5 * (T**2 * se**2 / s2) * (lrv - g0)
        z(t)   = sqrt(g0 / lrv) * t - 0.5 * (lrv - g0) / sqrt(lrv) * T * se / sqrt(s2)

    where ``rho`` is the coefficient on ``y_{t-1}`` in the differenced form.
    """
    trend = TrendSpec.parse(trend)
    y = _values(s)
    if y.shape[0] < 15:
        raise InsufficientDataError(f"Phillips-Perron needs at least 15 observations, got {y.shape[0]}")
    nobs = y.shape[0] - 1
    q = default_bandwidth(nobs) if bandwidth is None else int(bandwidth)
    if q < 0:
        raise ValueError("bandwidth must be non-negative")
    cv = {
        "z_t": tables.tau_critical_values(trend.value, nobs),
        "z_rho": tables.z_rho_critical_values(trend.value, nobs),
    }
    res, _ = _t_on_level(y, 0, trend)
    if res is None:
        return TestReport("PP", {"z_t": math.nan, "z_rho": math.nan}, "z_t", q, trend, cv, nobs, degenerate=True)
    rho = float(res.params[0])
    se = float(res.bse[0])
    s2 = res.sigma2
    g0 = res.ssr / nobs
    lrv = _backend.bartlett_lrv(res.resid, q)
    z_rho = nobs * rho - 0.5 * (nobs**2 * se**2 / s2) * (lrv - g0)
    z_t = math.sqrt(g0 / lrv) * (rho / se) - 0.5 * (lrv - g0) / math.sqrt(lrv) * nobs * se / math.sqrt(s2)
    return TestReport(
        "PP",
        {"z_t": z_t, "z_rho": z_rho},
        "z_t",
        q,
        trend,
        cv,
        nobs,
        extra={"rho": rho, "long_run_variance": lrv, "short_run_variance": g0},
    )


_CBAR = {TrendSpec.CONSTANT: -7.0, TrendSpec.CONSTANT_AND_TREND: -13.5}


def gls_detrend(y: np.ndarray, trend: TrendSpec) -> np.ndarray:
    """Local-to-unity GLS detrending with ``cbar = -7`` (constant) or ``-13.5`` (trend)."""
    n = y.shape[0]
    alpha = 1.0 + _CBAR[trend] / n
    z = np.ones((n, 1)) if trend is TrendSpec.CONSTANT else np.column_stack((np.ones(n), np.arange(1.0, n + 1)))
    yq = np.concatenate(([y[0]], y[1:] - alpha * y[:-1]))
    zq = np.vstack((z[:1], z[1:] - alpha * z[:-1]))
    beta = np.linalg.lstsq(zq, yq, rcond=None)[0]
    return y - z @ beta


def dfgls_test(s, lags: int = 1, trend=TrendSpec.CONSTANT) -> TestReport:
    """Elliott-Rothenberg-Stock DF-GLS test."""
    trend = TrendSpec.parse(trend)
    if trend is TrendSpec.NONE:
        raise ValueError("DF-GLS requires a constant or constant_and_trend specification")
    y = _values(s)
    if lags < 0:
        raise ValueError("lags must be non-negative")
    if y.shape[0] < lags + 15:
        raise InsufficientDataError(f"DF-GLS with {lags} lags needs at least {lags + 15} observations, got {y.shape[0]}")
    yd = gls_detrend(y, trend)
    res, nobs = _t_on_level(yd, lags, TrendSpec.NONE)
    cv = {"t": tables.dfgls_critical_values(trend.value, y.shape[0])}
    if res is None:
        return TestReport("DF-GLS", {"t": math.nan}, "t", lags, trend, cv, nobs, degenerate=True)
    return TestReport("DF-GLS", {"t": float(res.tvalues[0])}, "t", lags, trend, cv, nobs)


def residual_cointegration_test(residual, lags: int = 1, method: str = "adf", trend=TrendSpec.CONSTANT) -> TestReport:
    """Unit-root test on a model residual; rejection indicates cointegration
    between the observed and predicted series."""
    method = method.lower()
    y = _values(residual)
    if method == "adf":
        rep = adf_test(y, lags, trend)
    elif method == "pp":
        rep = pp_test(y, trend)
    elif method in ("dfgls", "df-gls"):
        rep = dfgls_test(y, lags, trend)
    else:
        raise ValueError(f"unknown residual test {method!r}")
    return replace(rep, test_name=f"residual-{rep.test_name}")


def unit_root_battery(s, lags: int = 1, trend=TrendSpec.CONSTANT, dfgls_lags: int = 2) -> Dict[str, TestReport]:
    """ADF, DF-GLS and PP on a series, as tabulated for levels and differences."""
    return {
        "ADF": adf_test(s, lags, trend),
        "DF-GLS": dfgls_test(s, dfgls_lags, trend if TrendSpec.parse(trend) is not TrendSpec.NONE else TrendSpec.CONSTANT),
        "PP": pp_test(s, trend),
    }
