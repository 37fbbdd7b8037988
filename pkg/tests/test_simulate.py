import numpy as np
import pytest

from sagp.simulate import SimSpec, generate, mean_function, replicate_specs, truth


class TestMeanFunction:
    def test_dataset1_midpoint(self):
        x = np.full((1, 10), 0.5)
        assert mean_function(x, 1)[0] == pytest.approx(1.25)

    def test_dataset1_interaction_midpoint(self):
        x = np.full((1, 10), 0.5)
        assert mean_function(x, 1, interaction=True)[0] == pytest.approx(2.0)

    def test_dataset3_terms(self):
        x = np.array([[0.1, 0.2, 0.3, 0.4, 0.5, 0.9]])
        assert mean_function(x, 3)[0] == pytest.approx(0.1 + 0.04 + 0.3 + 0.16 + 0.5)
        inter = 0.1 * 0.2 + 0.2 * 0.3 + 0.3 * 0.4
        assert mean_function(x, 3, True)[0] == pytest.approx(1.1 + inter)

    def test_noise_columns_ignored(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(5, 10))
        X2 = X.copy()
        X2[:, 3:] = rng.uniform(size=(5, 7))
        np.testing.assert_array_equal(mean_function(X, 2, True), mean_function(X2, 2, True))


class TestGenerate:
    def test_default_sizes(self):
        for d, shape in {1: (100, 10), 2: (100, 100), 3: (100, 20), 4: (100, 100)}.items():
            X, y, *_ = generate(SimSpec(d))
            assert X.shape == shape and y.shape == (shape[0],)

    def test_inputs_in_unit_cube(self):
        X, *_ = generate(SimSpec(1, seed=3))
        assert X.min() >= 0.0 and X.max() < 1.0

    def test_column_means(self):
        for seed in range(5):
            X, *_ = generate(SimSpec(2, seed=seed))
            n = X.shape[0]
            assert np.all(np.abs(X.mean(axis=0) - 0.5) <= 5 / np.sqrt(12 * n))

    def test_reproducible(self):
        a = generate(SimSpec(3, True, seed=11))
        b = generate(SimSpec(3, True, seed=11))
        for u, v in zip(a[:3], b[:3]):
            np.testing.assert_array_equal(u, v)

    def test_noise_level(self):
        X, y, f, *_ = generate(SimSpec(1, n=20_000, seed=2))
        assert np.var(y - f) == pytest.approx(0.02, rel=0.05)

    def test_truth_sets(self):
        assert truth(1) == ([0, 1, 2], [])
        assert truth(2, True)[1] == [(0, 1), (1, 2), (0, 2)]
        assert truth(4, True) == ([0, 1, 2, 3, 4], [(0, 1), (1, 2), (2, 3)])

    def test_replicate_seeds(self):
        specs = replicate_specs(SimSpec(1, seed=5), 3)
        assert [s.seed for s in specs] == [5, 6, 7]


class TestValidation:
    def test_unknown_dataset(self):
        with pytest.raises(ValueError):
            SimSpec(9)

    def test_too_few_columns(self):
        with pytest.raises(ValueError, match="p >= 5"):
            SimSpec(3, p=4)

    def test_nonpositive_noise(self):
        with pytest.raises(ValueError):
            SimSpec(1, sigma2=0.0)
