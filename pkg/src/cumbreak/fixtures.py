"""Seeded synthetic data sets shipped as the demo fixtures.

The labour-force level is built from a growth rate that drifts down from 3%
to 1.3% a year around which a stationary AR(1) disturbance moves. Responses
are then generated from fixed coefficient sets plus Gaussian noise:

========================  ==========================================  =====
file                      generator                                   seed
========================  ==========================================  =====
``labour_force.csv``      levels, 1950-2010, ``LF_1950 = 8000``       1
``unemployment.csv``      break 1990, lag 0, sigma 0.005              105
``dgdp.csv``              break 1990, lag 1, sigma 0.005              106
``cpi.csv``               ``3.40 l_{t-3} + 0.55 u_{t-3} - 0.073``,    108
                          sigma 0.005
========================  ==========================================  =====

Run ``python -m cumbreak.fixtures DIR`` to regenerate the files.
"""
from __future__ import annotations

import os
import sys
from typing import Dict

import numpy as np

from .ingest import format_series_csv
from .models import GeneralizedModel, PiecewiseLinearModel, ResponseKind, predict_generalized, predict_univariate
from .series import Period, Series, log_growth_rate

FIRST_YEAR = 1950
LAST_YEAR = 2010
RESPONSE_FIRST = 1962
LF_START = 8000.0

DRIVER_SEED = 1
DRIVER_PHI = 0.7
DRIVER_SD = 0.014
DRIVER_MEAN = (0.030, 0.013)
# milder disturbance, closer to observed labour-force growth swings
CALM_PHI = 0.8
CALM_SD = 0.006

NOISE_SIGMA = 0.005
SEEDS = {"unemployment": 105, "dgdp": 106, "cpi": 108}

UNEMPLOYMENT_MODEL = PiecewiseLinearModel.with_break(
    (-2.574, 0.155), (-2.852, 0.122), Period(1990), 0, ResponseKind.UNEMPLOYMENT
)
DGDP_MODEL = PiecewiseLinearModel.with_break((2.453, 0.0052), (0.842, -0.0085), Period(1990), 1, ResponseKind.INFLATION)
DGDP_GENERALIZED = GeneralizedModel(3.70, 0.55, -0.076, 1, 1)
CPI_GENERALIZED = GeneralizedModel(3.40, 0.55, -0.073, 3, 3)


def growth_path(seed: int = DRIVER_SEED, first: int = FIRST_YEAR, last: int = LAST_YEAR,
                phi: float = DRIVER_PHI, sd: float = DRIVER_SD) -> Series:
    """Annual growth rates for ``first+1 .. last``."""
    rng = np.random.default_rng(seed)
    n = last - first
    mean = np.linspace(DRIVER_MEAN[0], DRIVER_MEAN[1], n)
    e = np.empty(n)
    e[0] = sd / np.sqrt(1.0 - phi * phi) * rng.standard_normal()
    for t in range(1, n):
        e[t] = phi * e[t - 1] + sd * rng.standard_normal()
    return Series.annual(first + 1, mean + e)


def calm_growth_path(seed: int = DRIVER_SEED) -> Series:
    return growth_path(seed, phi=CALM_PHI, sd=CALM_SD)


def labour_force(seed: int = DRIVER_SEED) -> Series:
    rates = growth_path(seed)
    levels = LF_START * np.exp(np.concatenate(([0.0], np.cumsum(rates.values))))
    return Series.annual(FIRST_YEAR, levels)


def noisy(s: Series, sigma: float, seed: int) -> Series:
    rng = np.random.default_rng(seed)
    return s.with_values(s.values + sigma * rng.standard_normal(len(s)))


def demo_series() -> Dict[str, Series]:
    """The four demo inputs keyed by source role."""
    lf = labour_force()
    l = log_growth_rate(lf)
    first, last = Period(RESPONSE_FIRST), Period(LAST_YEAR)
    u = noisy(predict_univariate(UNEMPLOYMENT_MODEL, l, first, last), NOISE_SIGMA, SEEDS["unemployment"])
    dgdp = noisy(predict_univariate(DGDP_MODEL, l, first, last), NOISE_SIGMA, SEEDS["dgdp"])
    cpi_first = first.advance(CPI_GENERALIZED.unemployment_lag)
    cpi = noisy(predict_generalized(CPI_GENERALIZED, l, u, cpi_first, last), NOISE_SIGMA, SEEDS["cpi"])
    return {"labour_force": lf, "unemployment": u, "dgdp": dgdp, "cpi": cpi}


DEMO_CONFIG = """\
# Demo pipeline over the bundled synthetic fixtures.

source labour_force { path = labour_force.csv;  frequency = annual }
source unemployment { path = unemployment.csv;  frequency = annual }
source dgdp         { path = dgdp.csv;          frequency = annual }
source cpi          { path = cpi.csv;           frequency = annual }

task fit_univariate unemployment_fit {
    response = unemployment
    break = 1991
    window = 4
    lags = 0..5
    counterfactual = 1990..2009
}

task fit_univariate dgdp_fit {
    response = dgdp
    break = 1991
    window = 4
    lags = 0..5
    counterfactual = 1990..2009
}

task fit_generalized cpi_fit {
    response = cpi
    driver_lag = 3
    unemployment_lag = 3
}

task unitroot dgdp_levels {
    series = dgdp
    tests = adf, dfgls, pp
    lags = 1
    dfgls_lags = 2
}

task unitroot dgdp_differences {
    series = dgdp
    transform = difference
    tests = adf, dfgls, pp
}

task cointegration dgdp_coint {
    fit = dgdp_fit
    method = adf
    lags = 1
    johansen_maxlag = 1
    johansen_trend = none
}

task forecast_eval cpi_forecast {
    fit = cpi_fit
    horizon = 3
}

task figure dgdp_cumulative {
    fit = dgdp_fit
    kind = cumulative
    title = Cumulative inflation: observed and predicted
}

task figure unemployment_gap {
    fit = unemployment_fit
    kind = gap
    title = Unemployment minus the pre-break relation
}
"""


def render_demo() -> Dict[str, str]:
    """File name to file content for every demo fixture."""
    files = {f"{role}.csv": format_series_csv(s) for role, s in demo_series().items()}
    files["demo.cfg"] = DEMO_CONFIG
    return files


def write_demo(directory) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, text in render_demo().items():
        with open(os.path.join(directory, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def demo_directory() -> str:
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "demo")


if __name__ == "__main__":
    write_demo(sys.argv[1] if len(sys.argv) > 1 else demo_directory())
