"""Synthetic benchmark datasets: uniform inputs, sparse additive truths."""

from dataclasses import dataclass

import numpy as np

DEFAULT_SIZES = {1: (100, 10), 2: (100, 100), 3: (100, 20), 4: (100, 100)}


@dataclass
class SimSpec:
    dataset_id: int
    interaction: bool = False
    n: int = None
    p: int = None
    sigma2: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.dataset_id not in DEFAULT_SIZES:
            raise ValueError(f"dataset must be one of 1-4, got {self.dataset_id}")
        n0, p0 = DEFAULT_SIZES[self.dataset_id]
        self.n = n0 if self.n is None else int(self.n)
        self.p = p0 if self.p is None else int(self.p)
        need = n_signals(self.dataset_id)
        if self.p < need:
            raise ValueError(f"dataset {self.dataset_id} needs p >= {need}, got {self.p}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")


def n_signals(dataset_id):
    return 3 if dataset_id in (1, 2) else 5


def mean_function(X, dataset_id, interaction=False):
    X = np.atleast_2d(X)
    x = [X[:, j] for j in range(n_signals(dataset_id))]
    f = x[0] + x[1] ** 2 + x[2]
    if dataset_id in (3, 4):
        f = f + x[3] ** 2 + x[4]
    if interaction:
        if dataset_id in (1, 2):
            f = f + x[0] * x[1] + x[1] * x[2] + x[2] * x[0]
        else:
            f = f + x[0] * x[1] + x[1] * x[2] + x[2] * x[3]
    return f


def truth(dataset_id, interaction=False):
    """Zero-based true variables and interacting pairs."""
    vars_ = list(range(n_signals(dataset_id)))
    if not interaction:
        return vars_, []
    if dataset_id in (1, 2):
        return vars_, [(0, 1), (1, 2), (0, 2)]
    return vars_, [(0, 1), (1, 2), (2, 3)]


def generate(spec):
    """Returns ``(X, y, f, true_vars, true_pairs)``."""
    rng = np.random.default_rng(spec.seed)
    X = rng.uniform(0.0, 1.0, size=(spec.n, spec.p))
    f = mean_function(X, spec.dataset_id, spec.interaction)
    y = f + rng.normal(0.0, np.sqrt(spec.sigma2), size=spec.n)
    tv, tp = truth(spec.dataset_id, spec.interaction)
    return X, y, f, tv, tp


def replicate_specs(base, replicates):
    """Replicate ``r`` uses ``seed = base.seed + r``."""
    return [
        SimSpec(base.dataset_id, base.interaction, base.n, base.p, base.sigma2, base.seed + r)
        for r in range(replicates)
    ]
