import numpy as np
import pytest
from scipy.stats import norm

from hdgam.bands import (
    ScoreProjection,
    bootstrap_critical_value,
    bootstrap_sup_draws,
    build_bands,
    covers,
    project_scores,
)
from hdgam.errors import InvalidConfigurationError
from hdgam.orthogonal import fit_component


def _unit_column(n=400, seed=0):
    v = np.random.default_rng(seed).normal(size=n)
    v /= np.sqrt(np.mean(v**2))
    return ScoreProjection(values=v[:, None], grid=np.zeros(1), sigma_x=np.ones(1))


@pytest.fixture(scope="module")
def model():
    rng = np.random.default_rng(3)
    X = rng.uniform(-2.5, 2.5, (300, 4))
    y = -np.sin(2 * X[:, 0]) + X[:, 1] + (1 + np.abs(X[:, 0])) * 0.4 * rng.normal(size=300)
    return fit_component(X[:, 0], X[:, 1:], y, 7, 4)


class TestProjection:
    def test_unit_second_moment(self, model):
        proj = project_scores(model, np.linspace(-2, 2, 41))
        np.testing.assert_allclose(np.mean(proj.values**2, axis=0), 1.0, atol=1e-10)

    def test_duplicated_point(self, model):
        proj = project_scores(model, [0.3, 0.3, -1.0])
        np.testing.assert_array_equal(proj.values[:, 0], proj.values[:, 1])

    def test_one_dimensional_sign_consistent(self):
        # with d1 = 1 the standardized score is +-psi / sd(psi), the same column at any x
        rng = np.random.default_rng(4)
        X = rng.uniform(-1, 1, (200, 2))
        y = X[:, 0] + rng.normal(size=200)
        m = fit_component(X[:, 0], X[:, 1:], y, 1, 4, degree=1)
        proj = project_scores(m, [-0.9, -0.2, 0.5])
        cols = proj.values * np.sign(proj.values[0])
        np.testing.assert_allclose(np.abs(cols), np.abs(cols[:, [0]]) * np.ones((1, 3)), atol=1e-12)


class TestCriticalValue:
    @pytest.mark.parametrize("alpha", [0.05, 0.5])
    def test_normal_quantile_oracle(self, alpha):
        c = bootstrap_critical_value(_unit_column(), alpha, 100_000, seed=1)
        assert c == pytest.approx(norm.ppf(1 - alpha / 2), abs=0.02)

    def test_duplicate_columns_invariant(self):
        rng = np.random.default_rng(2)
        V = rng.normal(size=(200, 5))
        a = ScoreProjection(V, np.arange(5.0), np.ones(5))
        b = ScoreProjection(np.hstack([V, V]), np.arange(10.0), np.ones(10))
        assert bootstrap_critical_value(a, 0.05, 1000, 9) == bootstrap_critical_value(b, 0.05, 1000, 9)

    def test_threads_do_not_change_draws(self):
        proj = _unit_column(n=50)
        a = bootstrap_sup_draws(proj, 5000, seed=3, threads=1)
        b = bootstrap_sup_draws(proj, 5000, seed=3, threads=4)
        assert a.tobytes() == b.tobytes()

    @pytest.mark.parametrize("alpha, B", [(0.0, 1000), (1.0, 1000), (0.05, 99)])
    def test_bad_arguments(self, alpha, B):
        with pytest.raises(InvalidConfigurationError):
            bootstrap_critical_value(_unit_column(), alpha, B, 0)


class TestBuildBands:
    def test_zero_critical_value_collapses(self, model):
        band = build_bands(model, -2, 2, c_alpha=0.0)
        np.testing.assert_array_equal(band.lower, band.f1_hat)
        np.testing.assert_array_equal(band.upper, band.f1_hat)

    def test_smaller_alpha_wider(self, model):
        wide = build_bands(model, -2, 2, alpha=0.025, B=2000, seed=5)
        narrow = build_bands(model, -2, 2, alpha=0.05, B=2000, seed=5)
        assert wide.c_alpha >= narrow.c_alpha
        assert np.all(wide.lower <= narrow.lower) and np.all(wide.upper >= narrow.upper)

    def test_band_shape(self, model):
        band = build_bands(model, -2, 2, grid_size=51, B=500)
        assert band.grid.shape == (51,)
        assert np.all(band.lower <= band.upper)
        np.testing.assert_allclose(band.upper - band.f1_hat, band.half_width, rtol=1e-12)


class TestCovers:
    @pytest.fixture
    def band(self, model):
        return build_bands(model, -2, 2, grid_size=21, B=200)

    def test_center(self, band):
        assert covers(band, band.f1_hat)

    def test_upper_edge_closed(self, band):
        assert covers(band, band.upper)

    def test_single_exceedance(self, band):
        truth = band.f1_hat.copy()
        truth[7] = band.upper[7] + 1e-9
        assert not covers(band, truth)

    def test_length_mismatch(self, band):
        with pytest.raises(InvalidConfigurationError):
            covers(band, np.zeros(3))
