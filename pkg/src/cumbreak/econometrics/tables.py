"""Static critical-value tables.

* Dickey-Fuller t (ADF, PP z(t)): MacKinnon (2010) response surfaces,
  ``cv(T) = b0 + b1/T + b2/T**2 + b3/T**3``; the no-constant case uses the
  1996 coefficients.
* PP z(rho): Fuller (1976) normalized-bias table, interpolated linearly in 1/T.
* DF-GLS: finite-sample response surface in the MacKinnon form, simulated
  for the ``cbar = -7`` (constant) and ``cbar = -13.5`` (trend) detrending.
* Johansen trace: MacKinnon, Haug and Michelis (1999) values for n - r = 1..3.
"""
import math

import numpy as np

LEVELS = ("1%", "5%", "10%")

# rows: 1%, 5%, 10%; columns: b0..b3
TAU = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "constant": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "constant_and_trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}

# sample sizes, then per level the tabulated values (inf last)
_FULLER_T = (25, 50, 100, 250, 500, math.inf)
Z_RHO = {
    "none": {
        "1%": (-11.9, -12.9, -13.3, -13.6, -13.7, -13.8),
        "5%": (-7.3, -7.7, -7.9, -8.0, -8.0, -8.1),
        "10%": (-5.3, -5.5, -5.6, -5.7, -5.7, -5.7),
    },
    "constant": {
        "1%": (-17.2, -18.9, -19.8, -20.3, -20.5, -20.7),
        "5%": (-12.5, -13.3, -13.7, -14.0, -14.0, -14.1),
        "10%": (-10.2, -10.7, -11.0, -11.2, -11.2, -11.3),
    },
    "constant_and_trend": {
        "1%": (-22.5, -25.7, -27.4, -28.4, -28.9, -29.5),
        "5%": (-17.9, -19.8, -20.7, -21.3, -21.5, -21.8),
        "10%": (-15.6, -16.8, -17.5, -18.0, -18.1, -18.3),
    },
}

# DF-GLS finite-sample response surface, same form as TAU; T is the series
# length. Fitted to 200,000 replications per size (scripts/dfgls_response_surface.py).
DFGLS = {
    "constant": (
        (-2.56711, -20.34697, 259.81643, -2989.42091),
        (-1.93553, -22.74336, 365.38393, -3729.16439),
        (-1.61596, -23.61127, 362.64657, -3342.10444),
    ),
    "constant_and_trend": (
        (-3.40926, -19.83217, 20.39868, -957.02428),
        (-2.84569, -18.57662, 99.51851, -1155.49426),
        (-2.55525, -18.65479, 135.33217, -1142.92532),
    ),
}

# index n - r - 1; columns 10%, 5%, 1%
JOHANSEN_TRACE = {
    "none": ((2.9762, 4.1296, 6.9406), (10.4741, 12.3212, 16.3640), (21.7781, 24.2761, 29.5147)),
    "constant": ((2.7055, 3.8415, 6.6349), (13.4294, 15.4943, 19.9349), (27.0669, 29.7961, 35.4628)),
    "constant_and_trend": ((2.7055, 3.8415, 6.6349), (16.1619, 18.3985, 23.1485), (32.0645, 35.0116, 41.0815)),
}


def _surface(rows, nobs: int) -> dict:
    inv = 1.0 / nobs
    return {level: b0 + b1 * inv + b2 * inv**2 + b3 * inv**3 for level, (b0, b1, b2, b3) in zip(LEVELS, rows)}


def tau_critical_values(trend: str, nobs: int) -> dict:
    return _surface(TAU[trend], nobs)


def _interp_inverse(sizes, values, nobs):
    x = np.array([0.0 if math.isinf(s) else 1.0 / s for s in sizes])
    inv = 1.0 / nobs
    # clamp outside the tabulated range
    inv = min(max(inv, x.min()), x.max())
    order = np.argsort(x)
    return float(np.interp(inv, x[order], np.asarray(values)[order]))


def z_rho_critical_values(trend: str, nobs: int) -> dict:
    return {lvl: _interp_inverse(_FULLER_T, Z_RHO[trend][lvl], nobs) for lvl in LEVELS}


def dfgls_critical_values(trend: str, nobs: int) -> dict:
    return _surface(DFGLS[trend], nobs)


def johansen_trace_critical_values(trend: str, n_minus_r: int) -> dict:
    if not 1 <= n_minus_r <= 3:
        raise ValueError("trace critical values tabulated for n - r in 1..3 only")
    c10, c5, c1 = JOHANSEN_TRACE[trend][n_minus_r - 1]
    return {"1%": c1, "5%": c5, "10%": c10}
