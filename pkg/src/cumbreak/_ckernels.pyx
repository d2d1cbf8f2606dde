# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the cumulative-fit grid and Bartlett long-run variance.

Same contracts as ``_pykernels``; selected at import by ``cumbreak._backend``.
"""
import numpy as np
from libc.math cimport sqrt, NAN

DEF MAXP = 4
cdef double PIVOT_TOL = 1e-12

OK = 0
DEGENERATE = 1


cdef int _chol_solve(double[:, ::1] gram, double* rhs, int p, double* out) nogil:
    cdef double scale[MAXP]
    cdef double a[MAXP][MAXP]
    cdef double low[MAXP][MAXP]
    cdef double z[MAXP]
    cdef double s
    cdef int i, j, k
    for i in range(p):
        if not gram[i, i] > 0.0:
            return 1
        scale[i] = 1.0 / sqrt(gram[i, i])
    for i in range(p):
        for j in range(p):
            a[i][j] = gram[i, j] * scale[i] * scale[j]
            low[i][j] = 0.0
    for j in range(p):
        s = a[j][j]
        for k in range(j):
            s -= low[j][k] * low[j][k]
        if s < PIVOT_TOL:
            return 1
        low[j][j] = sqrt(s)
        for i in range(j + 1, p):
            s = a[i][j]
            for k in range(j):
                s -= low[i][k] * low[j][k]
            low[i][j] = s / low[j][j]
    for i in range(p):
        s = rhs[i] * scale[i]
        for k in range(i):
            s -= low[i][k] * z[k]
        z[i] = s / low[i][i]
    for i in range(p - 1, -1, -1):
        s = z[i]
        for k in range(i + 1, p):
            s -= low[k][i] * out[k]
        out[i] = s / low[i][i]
    for i in range(p):
        out[i] = out[i] * scale[i]
    return 0


cdef int _cumfit(const double[::1] x, const double[::1] y, Py_ssize_t brk,
                 double[:, ::1] gram, double* coef, double* ssr) nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t t
    cdef int p = 2 if brk <= 0 else 4
    cdef double col[MAXP]
    cdef double rhs[MAXP]
    cdef double target = 0.0
    cdef double r
    cdef int i, j, status
    for i in range(MAXP):
        col[i] = 0.0
        rhs[i] = 0.0
        for j in range(MAXP):
            gram[i, j] = 0.0
    for t in range(n):
        target += y[t]
        if brk <= 0 or t < brk:
            col[0] += x[t]
            col[1] += 1.0
        else:
            col[2] += x[t]
            col[3] += 1.0
        for i in range(p):
            rhs[i] += col[i] * target
            for j in range(i + 1):
                gram[i, j] += col[i] * col[j]
    for i in range(p):
        for j in range(i + 1, p):
            gram[i, j] = gram[j, i]
    status = _chol_solve(gram, rhs, p, coef)
    if status != 0:
        ssr[0] = NAN
        return status
    target = 0.0
    for i in range(MAXP):
        col[i] = 0.0
    ssr[0] = 0.0
    for t in range(n):
        target += y[t]
        if brk <= 0 or t < brk:
            col[0] += x[t]
            col[1] += 1.0
        else:
            col[2] += x[t]
            col[3] += 1.0
        r = target
        for i in range(p):
            r -= col[i] * coef[i]
        ssr[0] += r * r
    return 0


def cumfit(x, y, Py_ssize_t brk):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[:, ::1] gram = np.zeros((MAXP, MAXP))
    cdef int p = 2 if brk <= 0 else 4
    coef_arr = np.full(p, np.nan)
    cdef double[::1] coef = coef_arr
    cdef double buf[MAXP]
    cdef double ssr
    cdef int status, i
    with nogil:
        status = _cumfit(xv, yv, brk, gram, buf, &ssr)
    if status != 0:
        return coef_arr, float("nan"), DEGENERATE
    for i in range(p):
        coef[i] = buf[i]
    return coef_arr, ssr, OK


def cumfit_grid(xs, y, breaks):
    cdef const double[:, ::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const long long[::1] bv = np.ascontiguousarray(breaks, dtype=np.int64)
    cdef Py_ssize_t nl = xv.shape[0]
    cdef Py_ssize_t nb = bv.shape[0]
    out_arr = np.full((nl, nb + 1), np.nan)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] gram = np.zeros((MAXP, MAXP))
    cdef double coef[MAXP]
    cdef double ssr
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(nl):
            if _cumfit(xv[i], yv, 0, gram, coef, &ssr) == 0:
                out[i, 0] = ssr
            for j in range(nb):
                if _cumfit(xv[i], yv, bv[j], gram, coef, &ssr) == 0:
                    out[i, j + 1] = ssr
    return out_arr


def bartlett_lrv(e, bandwidth):
    cdef const double[::1] ev = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t n = ev.shape[0]
    cdef Py_ssize_t q = int(bandwidth)
    cdef Py_ssize_t j, t
    cdef double total = 0.0
    cdef double g, w
    with nogil:
        for t in range(n):
            total += ev[t] * ev[t]
        total /= n
        for j in range(1, q + 1):
            if j >= n:
                break
            g = 0.0
            for t in range(j, n):
                g += ev[t] * ev[t - j]
            w = 1.0 - j / (q + 1.0)
            total += 2.0 * w * g / n
    return total
