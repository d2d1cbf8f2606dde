"""Unit-root, cointegration and regression tools used to validate model links."""
from .johansen import RankReport, johansen_trace
from .ols import OLSResult, ols
from .unitroot import (
    TestReport,
    TrendSpec,
    adf_test,
    default_bandwidth,
    dfgls_test,
    pp_test,
    residual_cointegration_test,
    unit_root_battery,
)

__all__ = [
    "OLSResult",
    "RankReport",
    "TestReport",
    "TrendSpec",
    "adf_test",
    "default_bandwidth",
    "dfgls_test",
    "johansen_trace",
    "ols",
    "pp_test",
    "residual_cointegration_test",
    "unit_root_battery",
]
