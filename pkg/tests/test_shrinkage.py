import math

import numpy as np
import pytest
from scipy import integrate, stats

from sagp.kernel import ExponentCache, build_distance_cache, kernel_matrix, log_marginal
from sagp.shrinkage import (
    KappaUpdater,
    ProposalTuner,
    adapt,
    log_prior_kappa,
    log_prior_scale,
    metropolis_accept,
    mh_update_kappa,
    mh_update_scale,
    psi_target,
    tau_target,
)

pytestmark = pytest.mark.usefixtures("each_backend")


class FixedUniform:
    """rng stand-in whose draws are scripted."""

    def __init__(self, u, z=0.0):
        self.u = u
        self.z = z

    def random(self):
        return self.u

    def standard_normal(self):
        return self.z


def scale_density_oracle(s):
    # sqrt(s) ~ C+(0,1); change of variables from scipy's half-Cauchy
    return stats.halfcauchy.pdf(np.sqrt(s)) / (2.0 * np.sqrt(s))


class TestKappaPrior:
    def test_origin(self):
        assert log_prior_kappa(0.0, 1.0, 1.0) == pytest.approx(math.log(2) - 0.5 * math.log(2 * math.pi))
        assert log_prior_kappa(0.0, 1.0, 1.0) == pytest.approx(-0.2258, abs=1e-4)

    def test_unit(self):
        assert log_prior_kappa(1.0, 1.0, 1.0) == pytest.approx(-0.7258, abs=1e-4)

    @pytest.mark.parametrize("psi,tau", [(1.0, 1.0), (0.04, 2.5), (7.0, 0.3)])
    def test_matches_scipy_halfnorm(self, psi, tau):
        k = np.linspace(0, 5, 11)
        want = stats.halfnorm(scale=math.sqrt(psi * tau)).logpdf(k)
        np.testing.assert_allclose(log_prior_kappa(k, psi, tau), want, rtol=1e-12)

    @pytest.mark.parametrize("psi,tau", [(1.0, 1.0), (0.01, 0.5), (30.0, 4.0)])
    def test_integrates_to_one(self, psi, tau):
        total, _ = integrate.quad(lambda k: math.exp(log_prior_kappa(k, psi, tau)), 0, np.inf)
        assert abs(total - 1.0) <= 1e-6


class TestScalePrior:
    def test_at_one(self):
        assert log_prior_scale(1.0) == pytest.approx(math.log(1 / (2 * math.pi)))
        assert log_prior_scale(1.0) == pytest.approx(-1.8379, abs=1e-4)

    def test_matches_transformed_half_cauchy(self):
        s = np.array([1e-4, 0.3, 1.0, 2.0, 50.0])
        np.testing.assert_allclose(np.exp(log_prior_scale(s)), scale_density_oracle(s), rtol=1e-12)

    def test_integrates_to_one(self):
        f = lambda s: math.exp(log_prior_scale(s))  # noqa: E731
        # integrable 1/sqrt singularity at 0; split the range for quad
        a, _ = integrate.quad(f, 0, 1)
        b, _ = integrate.quad(f, 1, np.inf)
        assert abs(a + b - 1.0) <= 1e-4

    def test_monotone_beyond_one(self):
        s = np.linspace(1, 100, 500)
        assert np.all(np.diff(log_prior_scale(s)) < 0)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            log_prior_scale(0.0)


class TestMetropolis:
    def test_equal_state_accepts(self):
        rng = np.random.default_rng(0)
        assert all(metropolis_accept(0.0, rng) for _ in range(100))

    def test_infinite_improvement_accepts(self):
        assert metropolis_accept(math.inf, np.random.default_rng(0))

    def test_nan_rejects(self):
        assert not metropolis_accept(math.nan, np.random.default_rng(0))

    def test_uniform_rule(self):
        p = 0.4
        assert metropolis_accept(math.log(p), FixedUniform(0.39))
        assert not metropolis_accept(math.log(p), FixedUniform(0.41))

    def test_two_point_toy(self):
        # target pi(a)=0.7, pi(b)=0.3; the move a->b is accepted with prob 3/7
        rng = np.random.default_rng(11)
        log_ratio = math.log(0.3 / 0.7)
        freq = np.mean([metropolis_accept(log_ratio, rng) for _ in range(10_000)])
        assert abs(freq - 3 / 7) <= 0.02

    def test_two_point_chain(self):
        # full chain flipping between the two points visits them in proportion
        rng = np.random.default_rng(12)
        pi = {0: 0.7, 1: 0.3}
        state, visits = 0, np.zeros(2)
        for _ in range(10_000):
            other = 1 - state
            if metropolis_accept(math.log(pi[other] / pi[state]), rng):
                state = other
            visits[state] += 1
        assert abs(visits[0] / visits.sum() - 0.7) <= 0.02


class TestScaleUpdates:
    def test_same_proposal_accepted(self):
        rng = np.random.default_rng(0)
        # zero step: proposal equals current, ratio is exactly 1
        v, acc = mh_update_scale(2.0, lambda s: -s, 0.0, rng)
        assert acc and v == 2.0

    def test_tau_prior_only_ratio(self):
        kappa = np.zeros(4)
        psi = np.array([0.5, 1.0, 2.0, 3.0])
        t0, t1 = 1.3, 0.4
        target = tau_target(kappa, psi)
        direct = lambda t: (  # noqa: E731
            np.sum(stats.halfnorm(scale=np.sqrt(psi * t)).logpdf(kappa)) + math.log(scale_density_oracle(t))
        )
        assert target(t1) - target(t0) == pytest.approx(direct(t1) - direct(t0), rel=1e-10)

    def test_psi_target_matches_oracle(self):
        target = psi_target(0.8, 0.5)
        direct = lambda s: (  # noqa: E731
            stats.halfnorm(scale=math.sqrt(s * 0.5)).logpdf(0.8) + math.log(scale_density_oracle(s))
        )
        assert target(2.0) - target(0.3) == pytest.approx(direct(2.0) - direct(0.3), rel=1e-10)

    def test_chain_targets_gamma(self):
        # log-scale walk with the Jacobian term must leave Gamma(3, 1) invariant
        rng = np.random.default_rng(3)
        logpdf = lambda x: 2.0 * math.log(x) - x  # noqa: E731
        x, draws = 1.0, []
        for i in range(40_000):
            x, _ = mh_update_scale(x, logpdf, 0.8, rng)
            if i >= 2000:
                draws.append(x)
        assert np.mean(draws) == pytest.approx(3.0, abs=0.15)

    def test_tau_chain_matches_quadrature(self):
        # conditional for tau given a fixed kappa row; CDF by quadrature on a log grid
        target = tau_target(np.array([0.3, 0.5, 0.1]), np.ones(3))
        dens = lambda s: math.exp(target(s))  # noqa: E731
        Z = integrate.quad(dens, 0, 1, limit=200)[0] + integrate.quad(dens, 1, np.inf, limit=200)[0]
        grid = np.concatenate([[0.0], np.logspace(-8, 6, 4000)])
        pdf = np.array([0.0] + [dens(s) for s in grid[1:]]) / Z
        cdf = integrate.cumulative_trapezoid(pdf, grid, initial=0.0)
        rng = np.random.default_rng(4)
        x, draws = 1.0, []
        for i in range(101_000):
            x, _ = mh_update_scale(x, target, 1.5, rng)
            if i >= 1000 and i % 10 == 0:
                draws.append(x)
        assert len(draws) == 10_000
        assert stats.kstest(draws, lambda v: np.interp(v, grid, cdf)).statistic < 0.05


class TestAdapt:
    @pytest.mark.parametrize("rate,factor", [(0.30, 1.0), (0.55, 1.1), (0.05, 0.9)])
    def test_rules(self, rate, factor):
        out = adapt(np.array([2.0]), np.array([int(rate * 100)]), np.array([100]))
        assert out[0] == pytest.approx(2.0 * factor)

    def test_band_edges_unchanged(self):
        out = adapt(np.array([1.0, 1.0]), np.array([20, 40]), np.array([100, 100]))
        np.testing.assert_array_equal(out, [1.0, 1.0])

    def test_tuner_window(self):
        tu = ProposalTuner((2,), 1.0)
        for i in range(50):
            tu.record(0, True)
            tu.record(1, i % 20 == 0)
        tu.adapt()
        np.testing.assert_allclose(tu.log_step, [1.1, 0.9])
        assert tu.propose.sum() == 0
        np.testing.assert_allclose(tu.rates(), [1.0, 3 / 50])
        tu.reset_totals()
        assert tu.total_propose.sum() == 0


class TestKappaUpdater:
    def _setup(self, seed=0, n=12, p=3):
        rng = np.random.default_rng(seed)
        X = rng.uniform(size=(n, p))
        D = build_distance_cache(X)
        ec = ExponentCache(D, np.full(p, 0.5))
        r = rng.standard_normal(n)
        return rng, D, ec, r

    def test_cached_logmarg_tracks_state(self):
        rng, D, ec, r = self._setup()
        upd = KappaUpdater(ec, r, 0.1)
        for _ in range(60):
            mh_update_kappa(upd, int(rng.integers(3)), 1.0, 1.0, 1.0, rng)
        K = kernel_matrix(D, ec.kappa)
        assert upd.logmarg == pytest.approx(log_marginal(r, K, 0.1), abs=1e-9)

    def test_cache_matches_rebuild_after_moves(self):
        rng, D, ec, r = self._setup(1, n=20, p=4)
        upd = KappaUpdater(ec, r, 0.05)
        accepted = [mh_update_kappa(upd, int(rng.integers(4)), 1.0, 1.0, 1.5, rng) for _ in range(100)]
        assert 0 < sum(accepted) < 100
        np.testing.assert_allclose(ec.S, np.tensordot(ec.kappa, D, axes=1), rtol=0, atol=1e-12)

    def test_scales_stay_positive(self):
        rng, D, ec, r = self._setup(2)
        upd = KappaUpdater(ec, r, 0.1)
        tau, psi = 1.0, np.ones(3)
        for _ in range(300):
            j = int(rng.integers(3))
            mh_update_kappa(upd, j, psi[j], tau, 4.0, rng)
            psi[j], _ = mh_update_scale(psi[j], psi_target(ec.kappa[j], tau), 4.0, rng)
            tau, _ = mh_update_scale(tau, tau_target(ec.kappa, psi), 4.0, rng)
            assert np.all(ec.kappa > 0) and np.all(psi > 0) and tau > 0
        np.testing.assert_allclose(ec.S, np.tensordot(ec.kappa, D, axes=1), atol=1e-12)

    def test_rejection_keeps_state(self):
        rng, D, ec, r = self._setup(1)
        upd = KappaUpdater(ec, r, 0.1)
        before = ec.kappa.copy(), ec.S.copy(), upd.logmarg
        # proposal 0.5*e^3 under a prior with variance 1e-24 cannot be accepted
        assert not upd.update(0, 1e-12, 1e-12, 3.0, FixedUniform(0.5, z=1.0))
        np.testing.assert_array_equal(ec.kappa, before[0])
        np.testing.assert_array_equal(ec.S, before[1])
        assert upd.logmarg == before[2]

    def test_flat_likelihood_samples_prior(self):
        # with one observation the kernel is [[1]] for every kappa, so the
        # chain should reproduce the half-normal prior mean sqrt(2 v / pi)
        X = np.zeros((1, 1))
        ec = ExponentCache(build_distance_cache(X), [1.0])
        upd = KappaUpdater(ec, np.array([0.4]), 0.2)
        rng = np.random.default_rng(4)
        draws = []
        for i in range(40_000):
            upd.update(0, 2.0, 0.5, 1.0, rng)
            if i >= 1000:
                draws.append(ec.kappa[0])
        assert np.mean(draws) == pytest.approx(math.sqrt(2 / math.pi), abs=0.03)
