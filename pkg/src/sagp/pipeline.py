"""Dataset-level entry points shared by the CLI and the acceptance suite."""

from dataclasses import dataclass, replace

import numpy as np

from .component import predict
from .data import Dataset
from .sampler import RunConfig, fit
from .selection import ErrorRates, InteractionReport, analyse, fpr_fnr


def working_sigma2(sigma2, y_scale):
    """Noise variance in original units mapped onto the standardised response."""
    return sigma2 / (y_scale * y_scale)


def _post_burn_in(trace, config):
    # a trace shorter than the burn-in (hand-built or truncated) is used whole
    return trace.retained(config.burn_in) if len(trace) > config.burn_in else trace


def fit_dataset(ds, config, progress=None):
    """Fit on a `Dataset`; ``config.sigma2`` is read in original response units."""
    cfg = replace(config, sigma2=working_sigma2(config.sigma2, ds.y_scale))
    res = fit(ds.X, ds.y_scaled, cfg, progress=progress)
    res.config = config
    return res


def predict_dataset(trace, config, ds, X_new):
    """Posterior-mean predictions in original response units."""
    post = _post_burn_in(trace, config)
    return predict(post, ds.X, ds.y_scaled, X_new, ds.y_center, ds.y_scale)


def split_rows(n, fraction, seed):
    """Seeded permutation split; returns ``(train, held_out)`` sorted row indices."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("split fraction must lie strictly between 0 and 1")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(fraction * n))
    if n_train < 2 or n_train >= n:
        raise ValueError(f"split {fraction} of {n} rows leaves an empty side")
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


@dataclass
class Report:
    analysis: InteractionReport
    inclusion_threshold: float
    interaction_threshold: float
    rates: ErrorRates = None

    @property
    def selected(self):
        return np.flatnonzero(self.analysis.inclusion > self.inclusion_threshold)

    @property
    def pairs(self):
        """Pairs at or above the interaction threshold (0 marks all, >1 none)."""
        M = self.analysis.interaction
        i, j = np.triu_indices(M.shape[0], 1)
        keep = M[i, j] >= self.interaction_threshold
        return list(zip(i[keep].tolist(), j[keep].tolist()))


def build_report(
    trace, config, truth=None, statistic=None, inclusion_threshold=None, interaction_threshold=None, scale=None
):
    """Selection summary over the post-burn-in part of ``trace``.

    ``truth`` holds 0-based signal indices; when given, FPR/FNR are filled in.
    Threshold overrides are not range-checked, so a value above 1 is legal.
    """
    post = _post_burn_in(trace, config)
    res = analyse(post.kappa, post.weight, statistic or config.ranking_statistic, scale or config.selection_scale)
    rep = Report(
        res,
        config.inclusion_threshold if inclusion_threshold is None else inclusion_threshold,
        config.interaction_threshold if interaction_threshold is None else interaction_threshold,
    )
    if truth is not None:
        rep.rates = fpr_fnr(rep.selected, truth, trace.kappa.shape[2])
    return rep


__all__ = [
    "Dataset",
    "Report",
    "RunConfig",
    "build_report",
    "fit_dataset",
    "predict_dataset",
    "split_rows",
    "working_sigma2",
]
