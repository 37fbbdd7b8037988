# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_kernels_py`` for the reference versions.

Matrices are C-contiguous. LAPACK sees a C array as its transpose, so the
"upper" C triangle is what Fortran calls lower.
"""

import numpy as np

from libc.math cimport exp, log
from scipy.linalg.cython_blas cimport dtrsv
from scipy.linalg.cython_lapack cimport dpotrf

BACKEND = "compiled"


def sq_dist_cache(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] x = X
    cdef Py_ssize_t n = x.shape[0], p = x.shape[1], i, k, j
    out = np.empty((p, n, n))
    cdef double[:, :, ::1] D = out
    cdef double d
    for j in range(p):
        for i in range(n):
            D[j, i, i] = 0.0
            for k in range(i + 1, n):
                d = x[i, j] - x[k, j]
                D[j, i, k] = d * d
                D[j, k, i] = d * d
    return out


def exponent_sum(double[:, :, ::1] D, double[::1] kappa, double[:, ::1] out):
    cdef Py_ssize_t p = D.shape[0], n = D.shape[1], i, k, j
    cdef double acc, kj
    for i in range(n):
        for k in range(n):
            out[i, k] = 0.0
    for j in range(p):
        kj = kappa[j]
        if kj == 0.0:
            continue
        for i in range(n):
            for k in range(n):
                out[i, k] += kj * D[j, i, k]


def shift_exponent(double[:, ::1] S, double[:, ::1] Dj, double delta, double[:, ::1] out):
    cdef Py_ssize_t n = S.shape[0], i, k
    for i in range(n):
        for k in range(n):
            out[i, k] = delta * Dj[i, k] + S[i, k]


cdef double _factor_solve(double[:, ::1] work, double[::1] r, int* info):
    # work holds A in its C-upper triangle; factor and return the log marginal
    cdef int n = <int>work.shape[0], one = 1
    cdef char lo = b'L', nt = b'N', nd = b'N'
    cdef Py_ssize_t i
    cdef double quad = 0.0, logdet = 0.0
    dpotrf(&lo, &n, &work[0, 0], &n, info)
    if info[0] != 0:
        return 0.0
    z = np.empty(n)
    cdef double[::1] zv = z
    for i in range(n):
        zv[i] = r[i]
    dtrsv(&lo, &nt, &nd, &n, &work[0, 0], &n, &zv[0], &one)
    for i in range(n):
        quad += zv[i] * zv[i]
        logdet += log(work[i, i])
    return -0.5 * quad - logdet


def logmarg_from_exponent(double[:, ::1] S, double[::1] r, double shift, double[:, ::1] work):
    cdef Py_ssize_t n = S.shape[0], i, k
    cdef int info = 0
    cdef double value
    for i in range(n):
        work[i, i] = exp(-S[i, i]) + shift
        for k in range(i + 1, n):
            work[i, k] = exp(-S[i, k])
    value = _factor_solve(work, r, &info)
    if info != 0:
        return float("nan"), info
    return value, 0


def propose_logmarg(double[:, ::1] S, double[:, ::1] Dj, double delta, double[::1] r,
                    double shift, double[:, ::1] S_out, double[:, ::1] work):
    """Write ``S + delta*Dj`` into ``S_out`` and evaluate the log marginal there."""
    cdef Py_ssize_t n = S.shape[0], i, k
    cdef int info = 0
    cdef double v, value
    for i in range(n):
        v = delta * Dj[i, i] + S[i, i]
        S_out[i, i] = v
        work[i, i] = exp(-v) + shift
        for k in range(i + 1, n):
            v = delta * Dj[i, k] + S[i, k]
            S_out[i, k] = v
            S_out[k, i] = v
            work[i, k] = exp(-v)
    value = _factor_solve(work, r, &info)
    if info != 0:
        return float("nan"), info
    return value, 0


def best_split(sorted_vals):
    v_arr = np.ascontiguousarray(sorted_vals, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef Py_ssize_t m = v.shape[0], s, best = 0
    cdef double mean, c = 0.0, b, best_b = -1.0
    if m < 2:
        return 0, 0.0
    mean = np.mean(v_arr)
    for s in range(1, m):
        c += v[s - 1] - mean
        b = m * c * c / (<double>s * (m - s))
        if b > best_b:
            best_b = b
            best = s
    return int(best), float(best_b)
