"""L1-penalised component weights: LARS path plus 5-fold CV.

The lasso objective is ``(1/2n)||y - Z b||^2 + lam ||b||_1`` on columns
standardised to zero mean and unit (population) variance; no intercept is
fitted because the response is centred once up front.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import lars_path as _sk_lars_path

N_GRID = 100
GRID_FLOOR = 1e-4
CONSTANT_TOL = 1e-12


@dataclass
class ComponentDesign:
    Z: np.ndarray  # standardised, constant columns zeroed
    mean: np.ndarray
    scale: np.ndarray
    active: np.ndarray  # columns with non-zero spread

    @classmethod
    def from_columns(cls, F, mean=None, scale=None):
        F = np.asarray(F, dtype=float)
        if mean is None:
            mean = F.mean(axis=0)
            scale = F.std(axis=0)
        active = scale > CONSTANT_TOL * (1.0 + np.abs(mean))
        safe = np.where(active, scale, 1.0)
        Z = (F - mean) / safe
        Z[:, ~active] = 0.0
        return cls(Z=Z, mean=mean, scale=safe, active=active)


@dataclass
class WeightVector:
    weights: np.ndarray
    signs: np.ndarray
    lambda_selected: float
    coef_std: np.ndarray


def lambda_max(Z, y):
    n = Z.shape[0]
    return float(np.max(np.abs(Z.T @ y)) / n) if Z.size else 0.0


def lars_path(Z, y):
    """Full lasso path on standardised ``Z``.

    Returns ``(lambdas, coefs)`` with ``lambdas`` decreasing from
    ``lambda_max`` and ``coefs`` of shape ``(k, len(lambdas))``.
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    k = Z.shape[1]
    keep = np.flatnonzero(np.any(Z != 0.0, axis=0))
    if keep.size == 0 or not np.any(y):
        return np.array([0.0]), np.zeros((k, 1))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        alphas, _, coefs = _sk_lars_path(Z[:, keep], y, method="lasso", return_path=True)
    full = np.zeros((k, alphas.shape[0]))
    full[keep] = coefs
    return alphas, full


def coef_at(lambdas, coefs, lam):
    """Interpolate the piecewise-linear path at one or more ``lam`` values."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    x = lambdas[::-1]
    out = np.empty((coefs.shape[0], lam.shape[0]))
    for j in range(coefs.shape[0]):
        out[j] = np.interp(lam, x, coefs[j, ::-1])
    return out


def lambda_grid(lmax):
    if lmax <= 0:
        return np.zeros(1)
    return np.logspace(np.log10(GRID_FLOOR * lmax), np.log10(lmax), N_GRID)


def fold_blocks(n, folds, rng):
    return np.array_split(rng.permutation(n), folds)


def cv_select(F, y, rng, folds=5):
    """λ minimising pooled held-out squared error over a 100-point log grid.

    ``F`` holds the raw component columns; standardisation is refit on
    each training split. Ties go to the larger λ.
    """
    F = np.asarray(F, dtype=float)
    y = np.asarray(y, dtype=float)
    n = F.shape[0]
    design = ComponentDesign.from_columns(F)
    grid = lambda_grid(lambda_max(design.Z, y))
    if grid[-1] == 0.0:
        return 0.0
    sse = np.zeros(grid.shape[0])
    for test in fold_blocks(n, folds, rng):
        train = np.ones(n, dtype=bool)
        train[test] = False
        d_tr = ComponentDesign.from_columns(F[train])
        lambdas, coefs = lars_path(d_tr.Z, y[train])
        B = coef_at(lambdas, coefs, grid)  # (k, G)
        Z_te = (F[test] - d_tr.mean) / d_tr.scale
        Z_te[:, ~d_tr.active] = 0.0
        resid = y[test][:, None] - Z_te @ B
        sse += np.sum(resid * resid, axis=0)
    mse = sse / n
    best = np.flatnonzero(mse <= mse.min() * (1 + 1e-12))
    return float(grid[best[-1]])


def fit_at(F, y, lam):
    """Lasso coefficients at ``lam``: ``(design, standardised coefs)``."""
    design = ComponentDesign.from_columns(F)
    lambdas, coefs = lars_path(design.Z, y)
    return design, coef_at(lambdas, coefs, lam)[:, 0]


def update_weights(F, y, lam):
    """Map the lasso fit at ``lam`` to component weights and signs.

    Raw-scale coefficient ``b_l = beta_l / scale_l`` becomes
    ``weight = |b_l|`` and ``sign = sign(b_l)`` (zero keeps sign +1).
    """
    design, beta = fit_at(F, y, lam)
    raw = np.where(design.active, beta / design.scale, 0.0)
    signs = np.where(raw < 0, -1.0, 1.0)
    return WeightVector(weights=np.abs(raw), signs=signs, lambda_selected=float(lam), coef_std=beta)
