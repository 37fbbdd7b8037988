"""Horseshoe-type global-local prior on the inverse bandwidths and its
Metropolis-Hastings updates.

Each inverse bandwidth ``kappa_lj`` is half-normal with variance
``psi_lj * tau_l``; both scales have ``sqrt(scale) ~ C+(0, 1)``. All moves
are Gaussian random walks on the log scale, so the log-Jacobian ``log x``
is added to every target.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .kernel import jitter_levels

log = logging.getLogger(__name__)

LOG2 = math.log(2.0)
LOG_2PI = math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)

ADAPT_EVERY = 50
ADAPT_LOW, ADAPT_HIGH = 0.2, 0.4


@dataclass
class ShrinkageState:
    tau: np.ndarray  # (k,)
    psi: np.ndarray  # (k, p)

    @classmethod
    def initial(cls, k, p):
        return cls(tau=np.ones(k), psi=np.ones((k, p)))


class ProposalTuner:
    """Per-parameter log-scale step sizes with windowed acceptance counts."""

    def __init__(self, shape, log_step=1.0):
        self.log_step = np.full(shape, float(log_step))
        self.accept = np.zeros(shape, dtype=np.int64)
        self.propose = np.zeros(shape, dtype=np.int64)
        self.total_accept = np.zeros(shape, dtype=np.int64)
        self.total_propose = np.zeros(shape, dtype=np.int64)

    def record(self, idx, accepted):
        self.propose[idx] += 1
        self.total_propose[idx] += 1
        if accepted:
            self.accept[idx] += 1
            self.total_accept[idx] += 1

    def reset_totals(self):
        self.total_accept[...] = 0
        self.total_propose[...] = 0

    def rates(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.total_accept / self.total_propose

    def adapt(self):
        """Close the current window: rescale steps, then zero the counts."""
        self.log_step = adapt(self.log_step, self.accept, self.propose)
        self.accept[...] = 0
        self.propose[...] = 0


def adapt(log_step, accept, propose):
    log_step = np.array(log_step, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = np.asarray(accept) / np.asarray(propose)
    rate = np.where(np.asarray(propose) > 0, rate, 0.3)
    log_step = np.where(rate > ADAPT_HIGH, log_step * 1.1, log_step)
    log_step = np.where(rate < ADAPT_LOW, log_step * 0.9, log_step)
    return log_step


def log_prior_kappa(kappa, psi, tau):
    """Half-normal log density with variance ``psi * tau`` on [0, inf)."""
    v = psi * tau
    return LOG2 - 0.5 * (LOG_2PI + np.log(v)) - kappa * kappa / (2.0 * v)


def log_prior_scale(s):
    """Log density of ``s`` when ``sqrt(s)`` is standard half-Cauchy."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("scale must be positive")
    out = -LOG_PI - 0.5 * np.log(s) - np.log1p(s)
    return float(out) if out.ndim == 0 else out


def metropolis_accept(log_ratio, rng):
    """Accept with probability ``min(1, exp(log_ratio))``; NaN rejects."""
    u = rng.random()
    if math.isnan(log_ratio):
        return False
    if log_ratio >= 0.0:
        return True
    return u < math.exp(log_ratio)


def mh_update_scale(value, log_target, log_step, rng):
    """One log-normal random-walk step for a positive scale.

    ``log_target(x)`` is the unnormalised log conditional of ``x``; the
    log-Jacobian is added here. Returns ``(new_value, accepted)``.
    """
    proposal = value * math.exp(log_step * rng.standard_normal())
    if not (0.0 < proposal < math.inf):
        rng.random()
        return value, False
    log_ratio = (log_target(proposal) + math.log(proposal)) - (log_target(value) + math.log(value))
    if metropolis_accept(log_ratio, rng):
        return proposal, True
    return value, False


def tau_target(kappa_row, psi_row):
    def target(tau):
        return float(np.sum(log_prior_kappa(kappa_row, psi_row, tau))) + log_prior_scale(tau)

    return target


def psi_target(kappa, tau):
    def target(psi):
        return float(log_prior_kappa(kappa, psi, tau)) + log_prior_scale(psi)

    return target


class KappaUpdater:
    """MH moves for the inverse bandwidths of one component.

    Holds the component's exponent cache, its partial residual and the
    cached log marginal at the current scales, so each proposal costs one
    O(n^2) exponent shift plus one Cholesky.
    """

    def __init__(self, ecache, r, sigma2):
        self.ecache = ecache
        self.r = np.ascontiguousarray(r, dtype=float)
        self.sigma2 = float(sigma2)
        n = ecache.S.shape[0]
        self._S_new = np.empty((n, n))
        self._work = np.empty((n, n))
        self.failures = 0
        self.logmarg = self._logmarg(ecache.S)

    def _logmarg(self, S):
        k = _backend.kernels
        for jitter in jitter_levels(1.0 + self.sigma2):
            value, info = k.logmarg_from_exponent(S, self.r, self.sigma2 + jitter, self._work)
            if info == 0:
                return value
        return math.nan

    def _propose_logmarg(self, j, delta):
        k = _backend.kernels
        ec = self.ecache
        value, info = k.propose_logmarg(
            ec.S, ec.D[j], delta, self.r, self.sigma2, self._S_new, self._work
        )
        if info == 0:
            return value
        for jitter in jitter_levels(1.0 + self.sigma2)[1:]:
            value, info = k.logmarg_from_exponent(self._S_new, self.r, self.sigma2 + jitter, self._work)
            if info == 0:
                return value
        return math.nan

    def update(self, j, psi, tau, log_step, rng):
        """Returns True when the proposal for coordinate ``j`` is accepted."""
        ec = self.ecache
        kappa = ec.kappa[j]
        proposal = kappa * math.exp(log_step * rng.standard_normal())
        if not (0.0 < proposal < math.inf):
            rng.random()
            return False
        new_lm = self._propose_logmarg(j, proposal - kappa)
        if math.isnan(new_lm):
            self.failures += 1
            log.warning("log marginal failed for proposal kappa[%d]=%g; rejected", j, proposal)
            rng.random()
            return False
        log_ratio = (
            new_lm + float(log_prior_kappa(proposal, psi, tau)) + math.log(proposal)
        ) - (self.logmarg + float(log_prior_kappa(kappa, psi, tau)) + math.log(kappa))
        if metropolis_accept(log_ratio, rng):
            self._S_new = ec.accept(j, proposal, self._S_new)
            self.logmarg = new_lm
            return True
        return False


def mh_update_kappa(updater, j, psi, tau, log_step, rng):
    return updater.update(j, psi, tau, log_step, rng)
