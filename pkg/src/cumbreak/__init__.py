"""Cumulative-curve calibration of lagged, piecewise-linear macro models.

The core modules are :mod:`cumbreak.series`, :mod:`cumbreak.models`,
:mod:`cumbreak.calibrate` and :mod:`cumbreak.econometrics`; the command-line
pipeline lives in :mod:`cumbreak.pipeline` and :mod:`cumbreak.cli`.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .calibrate import (
    CalibrationConfig,
    CalibrationResult,
    ForecastEvaluation,
    Metric,
    evaluate_forecast,
    fit_cumulative_lsq,
    fit_generalized,
    naive_forecast,
    r_squared,
    rmsfe,
    search,
)
from .errors import (
    CollinearityError,
    ConfigError,
    CoverageError,
    CumbreakError,
    DegenerateFitError,
    DomainError,
    FrequencyMismatchError,
    IngestError,
    InsufficientDataError,
    OutputError,
    RankDeficiencyError,
)
from .models import (
    GapSeries,
    GeneralizedModel,
    PiecewiseLinearModel,
    ResponseKind,
    Segment,
    balance_sum,
    counterfactual_gap,
    predict_generalized,
    predict_univariate,
)
from .series import (
    Frequency,
    Period,
    Series,
    align,
    align_many,
    cumulative_sum,
    first_difference,
    lag_shift,
    log_growth_rate,
    moving_average,
)

__all__ = [
    "BACKEND",
    "CalibrationConfig",
    "CalibrationResult",
    "ForecastEvaluation",
    "Metric",
    "evaluate_forecast",
    "fit_cumulative_lsq",
    "fit_generalized",
    "naive_forecast",
    "r_squared",
    "rmsfe",
    "search",
    "CollinearityError",
    "ConfigError",
    "CoverageError",
    "CumbreakError",
    "DegenerateFitError",
    "DomainError",
    "FrequencyMismatchError",
    "IngestError",
    "InsufficientDataError",
    "OutputError",
    "RankDeficiencyError",
    "GapSeries",
    "GeneralizedModel",
    "PiecewiseLinearModel",
    "ResponseKind",
    "Segment",
    "balance_sum",
    "counterfactual_gap",
    "predict_generalized",
    "predict_univariate",
    "Frequency",
    "Period",
    "Series",
    "align",
    "align_many",
    "cumulative_sum",
    "first_difference",
    "lag_shift",
    "log_growth_rate",
    "moving_average",
]
