"""The hybrid sweep: GP backfitting + MH on the bandwidths + lasso weights."""

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import _backend
from .component import AdditiveModel, ComponentState, partial_residual, resample_training
from .kernel import ExponentCache, NumericalError, build_distance_cache
from .lasso import cv_select, update_weights
from .selection import SELECTION_SCALES, kappa_statistic, two_means_1d
from .shrinkage import (
    ADAPT_EVERY,
    KappaUpdater,
    ProposalTuner,
    ShrinkageState,
    mh_update_scale,
    psi_target,
    tau_target,
)

log = logging.getLogger(__name__)

SIGMA2_FLOOR = 1e-6


@dataclass
class RunConfig:
    k: int = 10
    iterations: int = 5000
    burn_in: int = 2000
    sigma2: float = 0.02
    sigma2_mode: str = "fixed"
    cv_every: int = 25
    seed: int = 0
    thread_count: int = 1
    inclusion_threshold: float = 0.1
    interaction_threshold: float = 0.5
    ranking_statistic: str = "median"
    kappa_log_step: float = 2.0
    scale_log_step: float = 2.0
    kappa_target: str = "response"
    selection_scale: str = "sqrt"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("need 0 <= burn_in < iterations")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.sigma2_mode not in ("fixed", "empirical"):
            raise ValueError("sigma2_mode must be 'fixed' or 'empirical'")
        if self.ranking_statistic not in ("median", "mean"):
            raise ValueError("ranking_statistic must be 'median' or 'mean'")
        for name in ("inclusion_threshold", "interaction_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.kappa_target not in ("residual", "response"):
            raise ValueError("kappa_target must be 'residual' or 'response'")
        if self.selection_scale not in SELECTION_SCALES:
            raise ValueError(f"selection_scale must be one of {sorted(SELECTION_SCALES)}")
        if self.kappa_log_step <= 0 or self.scale_log_step <= 0:
            raise ValueError("initial log steps must be positive")
        if self.cv_every < 1 or self.thread_count < 1:
            raise ValueError("cv_every and thread_count must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass
class Trace:
    """Per-iteration sampler records; arrays indexed by iteration first."""

    kappa: np.ndarray  # (T, k, p)
    tau: np.ndarray  # (T, k)
    psi: np.ndarray  # (T, k, p)
    weight: np.ndarray  # (T, k)
    sign: np.ndarray  # (T, k)
    sigma2: np.ndarray  # (T,)
    lam: np.ndarray  # (T,)
    signals: np.ndarray  # (T, k) per-iteration 2-means count of each kappa row (selection scale)
    f: np.ndarray  # (T, k, n)

    @classmethod
    def empty(cls, T, k, p, n):
        return cls(
            kappa=np.zeros((T, k, p)),
            tau=np.zeros((T, k)),
            psi=np.zeros((T, k, p)),
            weight=np.zeros((T, k)),
            sign=np.ones((T, k)),
            sigma2=np.zeros(T),
            lam=np.zeros(T),
            signals=np.zeros((T, k), dtype=np.int64),
            f=np.zeros((T, k, n)),
        )

    def __len__(self):
        return self.kappa.shape[0]

    def retained(self, burn_in):
        return Trace(**{name: getattr(self, name)[burn_in:] for name in self.__dataclass_fields__})


@dataclass
class FitResult:
    trace: Trace
    config: RunConfig
    kappa_accept: np.ndarray  # post-burn-in acceptance rate per (l, j)
    psi_accept: np.ndarray
    tau_accept: np.ndarray
    kappa_log_step: np.ndarray
    failures: int
    seconds: float
    extra: dict = field(default_factory=dict)


def fit(X, y, config, progress=None):
    """Run the sampler on predictors ``X (n, p)`` and a centred, scaled ``y``."""
    with threadpool_limits(limits=config.thread_count):
        return _fit(np.asarray(X, dtype=float), np.asarray(y, dtype=float), config, progress)


def _fit(X, y, cfg, progress):
    n, p = X.shape
    k = cfg.k
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()

    D = build_distance_cache(X)
    init_weight = 1.0 / math.sqrt(k)
    model = AdditiveModel(
        y=y,
        components=[
            ComponentState(index=l, kappa=np.full(p, 1.0 / p), f_train=np.zeros(n), weight=init_weight)
            for l in range(k)
        ],
        sigma2=cfg.sigma2,
    )
    ecaches = [ExponentCache(D, c.kappa) for c in model.components]
    for c, ec in zip(model.components, ecaches):
        c.kappa = ec.kappa  # shared view: MH moves update both
    shrink = ShrinkageState.initial(k, p)
    k_tuner = ProposalTuner((k, p), cfg.kappa_log_step)
    psi_tuner = ProposalTuner((k, p), cfg.scale_log_step)
    tau_tuner = ProposalTuner((k,), cfg.scale_log_step)
    tuners = (k_tuner, psi_tuner, tau_tuner)

    trace = Trace.empty(cfg.iterations, k, p, n)
    lam = 0.0
    failures = 0

    for t in range(cfg.iterations):
        sigma2 = model.sigma2
        for l, comp in enumerate(model.components):
            ec = ecaches[l]
            r = partial_residual(model, l)
            try:
                comp.f_train = resample_training(r, ec.kernel(), sigma2, rng)
            except NumericalError as exc:
                raise NumericalError(f"component {l}, iteration {t}: {exc}") from None
            upd = KappaUpdater(ec, r if cfg.kappa_target == "residual" else y, sigma2)
            tau_l = shrink.tau[l]
            for j in range(p):
                acc = upd.update(j, shrink.psi[l, j], tau_l, k_tuner.log_step[l, j], rng)
                k_tuner.record((l, j), acc)
            failures += upd.failures
            for j in range(p):
                shrink.psi[l, j], acc = mh_update_scale(
                    shrink.psi[l, j], psi_target(ec.kappa[j], tau_l), psi_tuner.log_step[l, j], rng
                )
                psi_tuner.record((l, j), acc)
            shrink.tau[l], acc = mh_update_scale(
                tau_l, tau_target(ec.kappa, shrink.psi[l]), tau_tuner.log_step[l], rng
            )
            tau_tuner.record(l, acc)

        F_cols = np.column_stack([c.f_train for c in model.components])
        if t % cfg.cv_every == 0:
            lam = cv_select(F_cols, y, rng)
        wv = update_weights(F_cols, y, lam)
        for l, c in enumerate(model.components):
            c.weight = float(wv.weights[l])
            c.sign = float(wv.signs[l])
        if cfg.sigma2_mode == "empirical":
            model.sigma2 = max(float(np.var(y - model.fitted())), SIGMA2_FLOOR)

        if t < cfg.burn_in and (t + 1) % ADAPT_EVERY == 0:
            for tu in tuners:
                tu.adapt()
        if t + 1 == cfg.burn_in:
            for tu in tuners:
                tu.reset_totals()

        for l, c in enumerate(model.components):
            trace.kappa[t, l] = c.kappa
            trace.f[t, l] = c.f_train
            trace.weight[t, l] = c.weight
            trace.sign[t, l] = c.sign
            trace.signals[t, l] = two_means_1d(kappa_statistic(c.kappa, cfg.selection_scale))[0]
        trace.tau[t] = shrink.tau
        trace.psi[t] = shrink.psi
        trace.sigma2[t] = sigma2
        trace.lam[t] = lam
        if progress is not None:
            progress(t)

    return FitResult(
        trace=trace,
        config=cfg,
        kappa_accept=k_tuner.rates(),
        psi_accept=psi_tuner.rates(),
        tau_accept=tau_tuner.rates(),
        kappa_log_step=k_tuner.log_step.copy(),
        failures=failures,
        seconds=time.perf_counter() - t0,
        extra={"backend": _backend.current()},
    )
