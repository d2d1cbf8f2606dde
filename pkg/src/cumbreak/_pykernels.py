"""Pure numpy implementation of the hot kernels.

Mirrors ``_ckernels.pyx`` exactly, including the degeneracy rule, so the two
backends can be swapped without changing results beyond rounding.
"""
import numpy as np

# pivot threshold on the unit-diagonal (equilibrated) Gram matrix
PIVOT_TOL = 1e-12

OK = 0
DEGENERATE = 1


def chol_solve(gram, rhs):
    """Solve ``gram @ x = rhs`` for a small SPD matrix after equilibration.

    Returns ``(x, status)``; ``status`` is ``DEGENERATE`` when a column is
    (numerically) a linear combination of the previous ones.
    """
    p = len(rhs)
    diag = [gram[i][i] for i in range(p)]
    for d in diag:
        if not d > 0.0:
            return np.full(p, np.nan), DEGENERATE
    scale = [1.0 / np.sqrt(d) for d in diag]
    a = [[gram[i][j] * scale[i] * scale[j] for j in range(p)] for i in range(p)]
    b = [rhs[i] * scale[i] for i in range(p)]
    low = [[0.0] * p for _ in range(p)]
    for j in range(p):
        s = a[j][j]
        for k in range(j):
            s -= low[j][k] * low[j][k]
        if s < PIVOT_TOL:
            return np.full(p, np.nan), DEGENERATE
        low[j][j] = np.sqrt(s)
        for i in range(j + 1, p):
            s = a[i][j]
            for k in range(j):
                s -= low[i][k] * low[j][k]
            low[i][j] = s / low[j][j]
    z = [0.0] * p
    for i in range(p):
        s = b[i]
        for k in range(i):
            s -= low[i][k] * z[k]
        z[i] = s / low[i][i]
    x = [0.0] * p
    for i in reversed(range(p)):
        s = z[i]
        for k in range(i + 1, p):
            s -= low[k][i] * x[k]
        x[i] = s / low[i][i]
    return np.array([x[i] * scale[i] for i in range(p)]), OK


def cumulative_design(x, brk):
    """Columns: running driver sum and period count per segment.

    ``brk`` is the index of the first post-break element, or 0 for no break.
    """
    n = x.shape[0]
    if brk <= 0:
        return np.column_stack((np.cumsum(x), np.arange(1.0, n + 1)))
    pre = np.zeros(n)
    pre[:brk] = 1.0
    post = 1.0 - pre
    return np.column_stack((np.cumsum(x * pre), np.cumsum(pre), np.cumsum(x * post), np.cumsum(post)))


def cumfit(x, y, brk):
    """Least squares of ``cumsum(y)`` on the cumulative design.

    Returns ``(coef, ssr, status)`` where ``ssr`` is the squared L2 norm of the
    cumulative residual.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    design = cumulative_design(x, brk)
    target = np.cumsum(y)
    gram = design.T @ design
    coef, status = chol_solve(gram.tolist(), (design.T @ target).tolist())
    if status != OK:
        return coef, np.nan, status
    resid = target - design @ coef
    return coef, float(resid @ resid), OK


def cumfit_grid(xs, y, breaks):
    """SSR for every (lag row, break) pair.

    ``xs`` has one lagged-driver row per lag; column 0 of the output is the
    no-break fit, column ``j + 1`` uses ``breaks[j]``. Degenerate fits are NaN.
    """
    xs = np.asarray(xs, dtype=np.float64)
    breaks = np.asarray(breaks, dtype=np.int64)
    out = np.full((xs.shape[0], breaks.shape[0] + 1), np.nan)
    for i in range(xs.shape[0]):
        _, out[i, 0], _ = cumfit(xs[i], y, 0)
        for j, b in enumerate(breaks):
            _, out[i, j + 1], _ = cumfit(xs[i], y, int(b))
    return out


def bartlett_lrv(e, bandwidth):
    """Bartlett-weighted long-run variance ``g0 + 2 sum (1 - j/(q+1)) g_j``."""
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]
    total = float(e @ e) / n
    for j in range(1, int(bandwidth) + 1):
        if j >= n:
            break
        w = 1.0 - j / (bandwidth + 1.0)
        total += 2.0 * w * float(e[j:] @ e[:-j]) / n
    return total
