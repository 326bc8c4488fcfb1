import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from hdgam.errors import InvalidConfigurationError
from hdgam.simulate import (
    SIGMA_BAR,
    DgpConfig,
    gen_design,
    gen_response,
    noise_scale,
    replication_rng,
    run_monte_carlo,
    true_f,
)


class TestTruth:
    def test_table_values(self):
        assert true_f(2, 0.0) == pytest.approx(-25 / 12)
        assert true_f(5, 1.7) == 0.0
        assert true_f(4, 0.0) == pytest.approx(-1.42008, abs=1e-5)

    @pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
    def test_mean_zero_on_support(self, j):
        x = np.linspace(-2.5, 2.5, 200_001)
        assert abs(trapezoid(true_f(j, x), x) / 5) < 1e-8

    def test_bad_index(self):
        with pytest.raises(InvalidConfigurationError):
            true_f(0, 1.0)


@pytest.fixture(scope="module")
def X():
    return gen_design(DgpConfig(n=1000, p=10), replication_rng(0, 1))


class TestDesign:
    def test_uniform_moments(self, X):
        assert np.all(np.abs(X.mean(axis=0)) < 0.15)
        assert np.all(np.abs(X.var(axis=0) / (25 / 12) - 1) < 0.15)
        assert X.min() >= -2.5 and X.max() <= 2.5

    def test_adjacent_correlation(self, X):
        target = 6 / math.pi * math.asin(0.25)
        assert target == pytest.approx(0.4826, abs=1e-4)
        for k in range(9):
            assert np.corrcoef(X[:, k], X[:, k + 1])[0, 1] == pytest.approx(target, abs=0.05)

    def test_independent(self):
        X = gen_design(DgpConfig(n=1000, p=6, corr_base=0.0), replication_rng(1, 1))
        C = np.corrcoef(X.T)
        assert np.max(np.abs(C - np.eye(6))) < 0.1

    def test_p_too_small(self):
        with pytest.raises(InvalidConfigurationError):
            DgpConfig(n=100, p=3)


class TestResponse:
    def test_noiseless(self):
        cfg = DgpConfig(n=50, p=6, sigma_bar=0.0)
        X = gen_design(cfg, replication_rng(2, 1))
        y = gen_response(X, cfg, replication_rng(2, 2))
        np.testing.assert_array_equal(y, sum(true_f(j, X[:, j - 1]) for j in range(1, 5)))

    def test_noise_scale_formula(self):
        assert noise_scale(0.0) == pytest.approx(0.4232, abs=1e-4)
        assert noise_scale(2.5) == pytest.approx(1.4812, abs=1e-4)
        assert SIGMA_BAR == pytest.approx(math.sqrt(12 / 67))

    def test_noise_monte_carlo(self):
        n = 200_000
        cfg = DgpConfig(n=n, p=4, sigma_bar=SIGMA_BAR)
        rng = np.random.default_rng(3)
        for x0 in (0.0, 2.5):
            X = np.full((n, 4), x0)
            X[:, 1:] = 0.0
            resid = gen_response(X, cfg, rng) - sum(true_f(j, X[:, j - 1]) for j in range(1, 5))
            assert resid.std() == pytest.approx(noise_scale(x0), rel=0.01)


class TestMonteCarlo:
    def test_huge_critical_value_covers(self):
        rep = run_monte_carlo(DgpConfig(n=100, p=6, seed=1), R=1, B=100, c_alpha=1e6)
        assert all(c.coverage == 1.0 for c in rep.components)

    def test_order_invariant(self):
        cfg = DgpConfig(n=100, p=6, seed=2)
        a = run_monte_carlo(cfg, R=4, components=(1, 4), B=200)
        b = run_monte_carlo(cfg, R=4, components=(1, 4), B=200, order=[3, 1, 4, 2])
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_interval_inside_support(self):
        with pytest.raises(InvalidConfigurationError):
            run_monte_carlo(DgpConfig(n=100, p=6), R=1, interval=(-3.0, 2.0))

    def test_table_text(self):
        rep = run_monte_carlo(DgpConfig(n=100, p=6, seed=3), R=2, components=(1,), B=200)
        assert "f1" in rep.table()
        assert rep.components[0].completed + rep.components[0].failures == 2
