"""Compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from sagp import _backend, _kernels_py

compiled = pytest.importorskip("sagp._kernels")


@pytest.fixture
def restore_backend():
    before = _backend.current()
    yield
    _backend.use(before)


def case(seed=0, n=25, p=4):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, p))
    return rng, X, rng.exponential(size=p), rng.standard_normal(n)


class TestParity:
    def test_distance_cache(self):
        _, X, _, _ = case()
        np.testing.assert_array_equal(compiled.sq_dist_cache(X), _kernels_py.sq_dist_cache(X))

    def test_exponent(self):
        _, X, kappa, _ = case(1)
        D = _kernels_py.sq_dist_cache(X)
        a, b = np.empty((25, 25)), np.empty((25, 25))
        compiled.exponent_sum(D, kappa, a)
        _kernels_py.exponent_sum(D, kappa, b)
        np.testing.assert_array_equal(a, b)
        compiled.shift_exponent(a, D[2], 0.3, a)
        _kernels_py.shift_exponent(b, D[2], 0.3, b)
        np.testing.assert_array_equal(a, b)

    def test_log_marginal(self):
        _, X, kappa, r = case(2)
        D = _kernels_py.sq_dist_cache(X)
        S = np.empty((25, 25))
        _kernels_py.exponent_sum(D, kappa, S)
        w1, w2 = np.empty((25, 25)), np.empty((25, 25))
        v1, i1 = compiled.logmarg_from_exponent(S, r, 0.05, w1)
        v2, i2 = _kernels_py.logmarg_from_exponent(S, r, 0.05, w2)
        assert i1 == i2 == 0
        assert v1 == pytest.approx(v2, rel=1e-12)
        o1, o2 = np.empty((25, 25)), np.empty((25, 25))
        v1, _ = compiled.propose_logmarg(S, D[1], -0.2, r, 0.05, o1, w1)
        v2, _ = _kernels_py.propose_logmarg(S, D[1], -0.2, r, 0.05, o2, w2)
        np.testing.assert_array_equal(o1, o2)
        assert v1 == pytest.approx(v2, rel=1e-12)

    def test_failure_code(self):
        S = np.zeros((3, 3))  # all-ones kernel, shift 0: singular
        work = np.empty((3, 3))
        for k in (compiled, _kernels_py):
            assert k.logmarg_from_exponent(S, np.ones(3), -1.0, work)[1] != 0

    def test_best_split(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            v = np.sort(rng.exponential(size=int(rng.integers(1, 15))))
            assert compiled.best_split(v) == _kernels_py.best_split(v)


class TestSelection:
    def test_switching(self, restore_backend):
        assert set(_backend.available()) == {"python", "compiled"}
        assert _backend.use("python").BACKEND == "python"
        assert _backend.current() == "python"
        _backend.use("compiled")
        assert _backend.current() == "compiled"
        with pytest.raises(ValueError):
            _backend.use("fortran")
