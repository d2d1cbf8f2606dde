"""Classical least squares shared by the unit-root and cointegration tests."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import RankDeficiencyError

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class OLSResult:
    params: np.ndarray
    bse: np.ndarray
    resid: np.ndarray
    sigma2: float
    ssr: float
    nobs: int
    df_resid: int

    @property
    def tvalues(self) -> np.ndarray:
        return self.params / self.bse


def ols(y, X, names: Optional[Sequence[str]] = None) -> OLSResult:
    """OLS with standard errors from the unbiased residual variance.

    Raises :class:`RankDeficiencyError` naming the columns involved in an
    exact linear dependence.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if n != y.shape[0]:
        raise ValueError(f"design has {n} rows but y has {y.shape[0]} values")
    if n <= k:
        raise ValueError(f"need more observations ({n}) than regressors ({k})")
    names = list(names) if names is not None else [f"x{i}" for i in range(k)]
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise RankDeficiencyError(f"all-zero column(s): {', '.join(names[i] for i in zero)}", [names[i] for i in zero])
    Xs = X / norms
    u, s, vt = np.linalg.svd(Xs, full_matrices=False)
    if s[-1] < RANK_RTOL * s[0]:
        null = vt[-1]
        cols = [names[i] for i in np.flatnonzero(np.abs(null) > 1e-6)]
        raise RankDeficiencyError(f"design is rank deficient; dependent columns: {', '.join(cols)}", cols)
    # solve via the SVD of the equilibrated design
    beta = (vt.T @ ((u.T @ y) / s)) / norms
    resid = y - X @ beta
    ssr = float(resid @ resid)
    df = n - k
    sigma2 = ssr / df
    cov_scaled = (vt.T / s**2) @ vt
    bse = np.sqrt(np.diag(cov_scaled) * sigma2) / norms
    return OLSResult(beta, bse, resid, sigma2, ssr, n, df)
