"""Per-component GP conditionals and additive prediction."""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .kernel import NumericalError, cholesky, cross_sq_dist, jitter_levels


@dataclass
class ComponentState:
    index: int
    kappa: np.ndarray
    f_train: np.ndarray
    weight: float = 1.0
    sign: float = 1.0

    @property
    def contribution(self):
        return self.sign * self.weight * self.f_train


@dataclass
class AdditiveModel:
    """Current sampler state: k components on the (centred, scaled) response."""

    y: np.ndarray
    components: list = field(default_factory=list)
    sigma2: float = 0.02

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")

    @property
    def k(self):
        return len(self.components)

    def fitted(self):
        F = np.zeros_like(self.y)
        for c in self.components:
            if c.weight != 0.0:
                F += c.contribution
        return F


def partial_residual(model, l):
    """``y`` minus every other component's weighted contribution."""
    r = np.array(model.y, dtype=float)
    for c in model.components:
        if c.index != l and c.weight != 0.0:
            r -= c.contribution
    return r


def predictive_moments(r, K, K_star, K_ss, sigma2):
    """GP predictive mean and covariance given residual ``r``.

    mean = K_star (K + s2 I)^-1 r and
    cov = K_ss - K_star (K + s2 I)^-1 K_star', symmetrised.
    """
    r = np.asarray(r, dtype=float)
    K = np.atleast_2d(np.asarray(K, dtype=float))
    K_star = np.atleast_2d(np.asarray(K_star, dtype=float))
    K_ss = np.atleast_2d(np.asarray(K_ss, dtype=float))
    n = K.shape[0]
    L, _ = cholesky(K + sigma2 * np.eye(n))
    alpha = linalg.cho_solve((L, True), r, check_finite=False)
    V = linalg.solve_triangular(L, K_star.T, lower=True, check_finite=False)
    mean = K_star @ alpha
    cov = K_ss - V.T @ V
    return mean, 0.5 * (cov + cov.T)


def sample_component(moments, rng):
    """Draw from N(mean, cov) through a jittered Cholesky factor."""
    mean, cov = moments
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    m = mean.shape[0]
    scale = float(np.mean(np.abs(np.diag(cov)))) if m else 0.0
    if scale == 0.0:
        return mean.copy()
    eye = np.eye(m)
    for jitter in jitter_levels(scale)[1:]:
        try:
            L = linalg.cholesky(cov + jitter * eye, lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
        return mean + L @ rng.standard_normal(m)
    raise NumericalError("predictive covariance not positive semi-definite after jitter escalation")


def resample_training(r, K, sigma2, rng):
    """Steps 1-3 at the training inputs themselves (K_star = K_ss = K)."""
    return sample_component(predictive_moments(r, K, K, K, sigma2), rng)


def predict(trace, X_train, y_train, X_new, y_center=0.0, y_scale=1.0):
    """Posterior-mean prediction averaged over the retained iterations.

    ``trace`` must expose per-iteration ``kappa (T, k, p)``, ``f (T, k, n)``,
    ``weight``/``sign (T, k)`` and ``sigma2 (T,)``; ``y_train`` is on the
    centred/scaled sampler scale. Output is in original response units.
    """
    X_new = np.atleast_2d(np.asarray(X_new, dtype=float))
    X_train = np.asarray(X_train, dtype=float)
    p = X_train.shape[1]
    if X_new.size == 0:
        return np.empty(0)
    if X_new.shape[1] != p:
        raise ValueError(f"expected {p} columns, got {X_new.shape[1]}")
    D = cross_sq_dist(X_train, X_train)
    D_star = cross_sq_dist(X_new, X_train)
    n = X_train.shape[0]
    out = np.zeros(X_new.shape[0])
    T = trace.kappa.shape[0]
    for t in range(T):
        contrib = trace.sign[t][:, None] * trace.weight[t][:, None] * trace.f[t]
        total = contrib.sum(axis=0)
        s2 = float(trace.sigma2[t])
        for l in range(trace.kappa.shape[1]):
            w = trace.weight[t, l]
            if w == 0.0:
                continue
            kappa = trace.kappa[t, l]
            r = y_train - (total - contrib[l])
            K = np.exp(-np.tensordot(kappa, D, axes=1))
            K_star = np.exp(-np.tensordot(kappa, D_star, axes=1))
            L, _ = cholesky(K + s2 * np.eye(n))
            alpha = linalg.cho_solve((L, True), r, check_finite=False)
            out += trace.sign[t, l] * w * (K_star @ alpha)
    out /= max(T, 1)
    return out * y_scale + y_center
