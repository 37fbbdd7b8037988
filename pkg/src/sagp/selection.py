"""Signal detection from posterior traces.

Each retained iteration is split into two clusters with exact 1-D
2-means; the size of the smaller cluster is that iteration's signal
count. The mode of those counts fixes how many coordinates to keep, and
the coordinates with the largest posterior median (or mean) are kept.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend

log = logging.getLogger(__name__)

SEPARATION_TOL = 1e-8

# Per-component variable selection clusters sqrt(kappa), the inverse
# length-scale, by default; "raw" clusters kappa itself.
SELECTION_SCALES = {"sqrt": np.sqrt, "raw": lambda v: v}


def kappa_statistic(kappa, scale="sqrt"):
    """Map bandwidths onto the scale used for signal detection."""
    try:
        fn = SELECTION_SCALES[scale]
    except KeyError:
        raise ValueError(f"unknown selection scale {scale!r}") from None
    return fn(np.asarray(kappa, dtype=float))


@dataclass
class SelectionResult:
    H: int
    selected: np.ndarray  # sorted indices
    counts: np.ndarray  # h per iteration


def two_means_1d(values):
    """Exact two-cluster split of scalars.

    Returns ``(h, threshold)``: ``h`` is the size of the smaller cluster
    (0 when the centroids are not separated) and values ``>= threshold``
    form the upper cluster.
    """
    v = np.sort(np.asarray(values, dtype=float))
    m = v.shape[0]
    if m < 2:
        return 0, np.inf
    s, _ = _backend.kernels.best_split(v)
    lo = v[:s].mean()
    hi = v[s:].mean()
    if hi - lo < SEPARATION_TOL * (v[-1] + 1e-12):
        return 0, np.inf
    return min(s, m - s), float(v[s])


def _mode_smallest(counts):
    vals, freq = np.unique(counts, return_counts=True)
    return int(vals[np.argmax(freq)])  # unique sorts ascending, argmax takes first


def select_signals(trace, statistic="median"):
    trace = np.abs(np.atleast_2d(np.asarray(trace, dtype=float)))
    if trace.shape[0] < 1:
        raise ValueError("trace needs at least one retained iteration")
    counts = np.array([two_means_1d(row)[0] for row in trace], dtype=int)
    H = _mode_smallest(counts)
    if statistic == "median":
        centre = np.median(trace, axis=0)
    elif statistic == "mean":
        centre = trace.mean(axis=0)
    else:
        raise ValueError(f"unknown ranking statistic {statistic!r}")
    order = np.argsort(-centre, kind="stable")
    return SelectionResult(H=H, selected=np.sort(order[:H]), counts=counts)


def inclusion_probabilities(selections, p):
    """Fraction of the k components whose selected set contains each variable."""
    k = len(selections)
    if k < 1:
        raise ValueError("need at least one component")
    counts = np.zeros(p)
    for sel in selections:
        counts[np.asarray(sel, dtype=int)] += 1
    return counts / k


def interaction_probabilities(selections, active, p):
    """Co-selection frequency of each variable pair over the active components.

    Diagonal is reported as 1.
    """
    active = list(active)
    M = np.zeros((p, p))
    if not active:
        warnings.warn("no active components; interaction matrix is all zero", RuntimeWarning)
        return M
    for l in active:
        idx = np.asarray(selections[l], dtype=int)
        M[np.ix_(idx, idx)] += 1
    M /= len(active)
    np.fill_diagonal(M, 1.0)
    return M


@dataclass
class ErrorRates:
    fpr: float
    fnr: float
    fnr_defined: bool = True


def fpr_fnr(selected, truth, p):
    """Standard-orientation rates: noise variables picked, true signals missed."""
    selected = set(int(i) for i in selected)
    truth = set(int(i) for i in truth)
    if not truth <= set(range(p)):
        raise ValueError("truth indices outside 0..p-1")
    n_noise = p - len(truth)
    fpr = len(selected - truth) / n_noise if n_noise else 0.0
    if not truth:
        return ErrorRates(fpr, 0.0, fnr_defined=False)
    return ErrorRates(fpr, len(truth - selected) / len(truth))


@dataclass
class InteractionReport:
    inclusion: np.ndarray
    interaction: np.ndarray
    active_functions: np.ndarray
    component_selections: list
    weight_selection: SelectionResult


def analyse(kappa_trace, weight_trace, statistic="median", scale="sqrt"):
    """Full post-burn-in analysis from ``kappa (T, k, p)`` and ``weight (T, k)``.

    ``scale`` picks the transform of kappa fed to `select_signals`; the
    weight trace is used as is.
    """
    kappa_trace = kappa_statistic(kappa_trace, scale)
    T, k, p = kappa_trace.shape
    comps = [select_signals(kappa_trace[:, l, :], statistic).selected for l in range(k)]
    wsel = select_signals(weight_trace, statistic)
    return InteractionReport(
        inclusion=inclusion_probabilities(comps, p),
        interaction=interaction_probabilities(comps, wsel.selected, p),
        active_functions=wsel.selected,
        component_selections=comps,
        weight_selection=wsel,
    )
