"""ARD squared-exponential kernel, distance caching and Cholesky solves."""

import logging

import numpy as np
from scipy import linalg

from . import _backend

log = logging.getLogger(__name__)

# relative to the mean diagonal; the first attempt is always unjittered
JITTER_START = 1e-10
JITTER_MAX = 1e-4


class NumericalError(RuntimeError):
    """Factorization failed even at the largest jitter."""


def jitter_levels(mean_diag):
    """Diagonal shifts tried in order: 0, then 1e-10..1e-4 times ``mean_diag``."""
    levels = [0.0]
    rel = JITTER_START
    while rel <= JITTER_MAX * (1 + 1e-9):
        levels.append(rel * mean_diag)
        rel *= 10.0
    return levels


def ard_kernel(x, x2, kappa):
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if not (x.shape == x2.shape == kappa.shape) or x.ndim != 1:
        raise ValueError(
            f"dimension mismatch: x {x.shape}, x' {x2.shape}, scales {kappa.shape}"
        )
    d = x - x2
    return float(np.exp(-np.dot(kappa, d * d)))


def build_distance_cache(X):
    """Per-dimension squared distances, shape ``(p, n, n)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _backend.kernels.sq_dist_cache(X)


def cross_sq_dist(Xa, Xb):
    """Per-dimension squared distances between two point sets, ``(p, m, n)``."""
    Xa = np.atleast_2d(np.asarray(Xa, dtype=float))
    Xb = np.atleast_2d(np.asarray(Xb, dtype=float))
    diff = Xa.T[:, :, None] - Xb.T[:, None, :]
    return diff * diff


def kernel_matrix(cache, kappa):
    kappa = np.asarray(kappa, dtype=float)
    if cache.shape[0] != kappa.shape[0]:
        raise ValueError(f"cache has {cache.shape[0]} dimensions, scales have {kappa.shape[0]}")
    S = np.empty(cache.shape[1:])
    _backend.kernels.exponent_sum(cache, kappa, S)
    return np.exp(-S)


class ExponentCache:
    """Running exponent sum ``S = sum_j kappa_j D_j`` for one component.

    Changing a single scale costs one O(n^2) axpy instead of a full
    O(n^2 p) rebuild.
    """

    def __init__(self, cache, kappa):
        self.D = cache
        self.kappa = np.array(kappa, dtype=float)
        if self.kappa.shape != (cache.shape[0],):
            raise ValueError("scale vector length does not match the cache")
        self.S = np.empty(cache.shape[1:])
        self.rebuild()

    def rebuild(self):
        _backend.kernels.exponent_sum(self.D, self.kappa, self.S)

    def set(self, j, value):
        delta = value - self.kappa[j]
        if delta != 0.0:
            _backend.kernels.shift_exponent(self.S, self.D[j], delta, self.S)
            self.kappa[j] = value

    def accept(self, j, value, S_new):
        """Adopt a proposal whose exponent was already computed into ``S_new``."""
        self.kappa[j] = value
        self.S, S_new = S_new, self.S
        return S_new

    def kernel(self):
        return np.exp(-self.S)


def cholesky(A):
    """Lower Cholesky factor of ``A`` with jitter escalation.

    Returns ``(L, jitter)``. Raises `NumericalError` when every level fails.
    """
    A = np.asarray(A, dtype=float)
    mean_diag = float(np.mean(np.diag(A))) if A.size else 0.0
    n = A.shape[0]
    for jitter in jitter_levels(abs(mean_diag)):
        try:
            L = linalg.cholesky(A + jitter * np.eye(n), lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
        if jitter > 0:
            log.debug("cholesky needed jitter %.3g", jitter)
        return L, jitter
    raise NumericalError(f"matrix not positive definite even with jitter {JITTER_MAX:g} x mean diagonal")


def log_marginal(r, K, sigma2, kappa=None):
    """``-1/2 r'(K + s2 I)^-1 r - 1/2 log|K + s2 I|`` without the 2*pi term."""
    r = np.asarray(r, dtype=float)
    K = np.asarray(K, dtype=float)
    A = K + sigma2 * np.eye(K.shape[0])
    try:
        L, _ = cholesky(A)
    except NumericalError as exc:
        where = "" if kappa is None else f" at scales {np.array2string(np.asarray(kappa), precision=4)}"
        raise NumericalError(f"{exc}{where}") from None
    z = linalg.solve_triangular(L, r, lower=True, check_finite=False)
    return -0.5 * float(z @ z) - float(np.sum(np.log(np.diag(L))))


def log_marginal_exponent(S, r, sigma2, work=None):
    """`log_marginal` evaluated straight from an exponent sum via the fast kernel.

    Returns ``(value, jitter)``; raises `NumericalError` on failure.
    """
    if work is None:
        work = np.empty_like(S)
    k = _backend.kernels
    for jitter in jitter_levels(1.0 + sigma2):
        value, info = k.logmarg_from_exponent(S, r, sigma2 + jitter, work)
        if info == 0:
            return value, jitter
    raise NumericalError("kernel matrix not positive definite after jitter escalation")
