"""Pure numpy implementations of the hot kernels.

Every function here has a twin of the same name and signature in the
compiled ``_kernels`` extension. Buffers passed as ``out``/``work`` are
overwritten.
"""

import numpy as np
from scipy.linalg import lapack

BACKEND = "python"


def sq_dist_cache(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    diff = X.T[:, :, None] - X.T[:, None, :]
    return np.ascontiguousarray(diff * diff)


def exponent_sum(D, kappa, out):
    out[...] = 0.0
    for j in range(D.shape[0]):
        if kappa[j] != 0.0:
            out += kappa[j] * D[j]
    return out


def shift_exponent(S, Dj, delta, out):
    # out may alias S, so form the product first
    np.add(Dj * delta, S, out=out)
    return out


def _chol_logmarg(work, r, shift):
    n = work.shape[0]
    work.flat[:: n + 1] += shift
    L, info = lapack.dpotrf(work, lower=1, clean=0, overwrite_a=1)
    if info != 0:
        return np.nan, int(info)
    z, info = lapack.dtrtrs(L, r, lower=1)
    logdet = np.sum(np.log(np.diagonal(L)))
    return -0.5 * float(z @ z) - float(logdet), 0


def logmarg_from_exponent(S, r, shift, work):
    """-1/2 r'A^-1 r - 1/2 log|A| with A = exp(-S) + shift*I.

    Returns ``(value, info)``; ``info > 0`` means the factorization failed.
    """
    np.negative(S, out=work)
    np.exp(work, out=work)
    return _chol_logmarg(work, r, shift)


def propose_logmarg(S, Dj, delta, r, shift, S_out, work):
    shift_exponent(S, Dj, delta, S_out)
    return logmarg_from_exponent(S_out, r, shift, work)


def best_split(sorted_vals):
    """Split index maximising between-cluster sum of squares.

    Equivalent to minimising the within-cluster sum of squares. Returns
    ``(s, between)`` with clusters ``sorted_vals[:s]`` and
    ``sorted_vals[s:]``; ``s == 0`` when fewer than two values.
    """
    v = np.asarray(sorted_vals, dtype=np.float64)
    m = v.shape[0]
    if m < 2:
        return 0, 0.0
    c = np.cumsum(v - v.mean())
    s = np.arange(1, m)
    left = c[:-1]
    # with centred data, between-SS = m * left_sum^2 / (s * (m - s))
    between = m * left * left / (s * (m - s))
    best = int(np.argmax(between))
    return best + 1, float(between[best])
