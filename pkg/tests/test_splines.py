import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdgam.errors import DegenerateKnotsError, InvalidConfigurationError, OutOfSupportError
from hdgam.splines import (
    SplineSpec,
    build_matrix,
    design_basis,
    eval_basis,
    knots_from_data,
)


class TestKnotsFromData:
    def test_no_interior_knots(self):
        spec = knots_from_data(np.linspace(0, 1, 100), df=4, degree=3)
        assert spec.interior_knots == ()
        assert (spec.boundary_lo, spec.boundary_hi) == (0.0, 1.0)
        assert spec.dimension == 4

    def test_quartile_knots(self):
        x = np.linspace(0, 1, 100)
        spec = knots_from_data(x, df=7, degree=3)
        # quantile oracle on the explicit grid: order statistics interpolated linearly
        srt = np.sort(x)
        oracle = []
        for q in (0.25, 0.5, 0.75):
            h = (len(srt) - 1) * q
            lo = int(np.floor(h))
            oracle.append(srt[lo] + (h - lo) * (srt[lo + 1] - srt[lo]))
        np.testing.assert_allclose(spec.interior_knots, oracle, rtol=0, atol=1e-15)
        np.testing.assert_allclose(spec.interior_knots, (0.25, 0.5, 0.75), atol=1e-12)
        assert spec.dimension == 7

    def test_tied_data(self):
        with pytest.raises(DegenerateKnotsError) as info:
            knots_from_data([0, 0, 0, 1], df=5, degree=3)
        assert info.value.quantile == pytest.approx(0.5)

    def test_df_below_order(self):
        with pytest.raises(InvalidConfigurationError):
            knots_from_data(np.linspace(0, 1, 10), df=3, degree=3)


class TestEvalBasis:
    def test_degree_zero_indicator(self):
        spec = SplineSpec(0, (), 0.0, 1.0)
        for x in (0.0, 0.3, 1.0):
            np.testing.assert_array_equal(eval_basis(spec, x), [1.0])

    def test_hat_functions(self):
        spec = SplineSpec(1, (0.5,), 0.0, 1.0)
        np.testing.assert_allclose(eval_basis(spec, 0.25), [0.5, 0.5, 0.0], atol=1e-15)

    def test_clamped_endpoints(self):
        spec = SplineSpec(3, (0.2, 0.5, 0.7), 0.0, 1.0)
        lo = eval_basis(spec, 0.0)
        hi = eval_basis(spec, 1.0)
        assert lo[0] == 1.0 and np.all(lo[1:] == 0.0)
        assert hi[-1] == 1.0 and np.all(hi[:-1] == 0.0)

    @pytest.mark.parametrize("x", [-1e-9, 1.0 + 1e-9, np.nan])
    def test_out_of_support(self, x):
        spec = SplineSpec(3, (0.5,), 0.0, 1.0)
        with pytest.raises(OutOfSupportError):
            eval_basis(spec, x)


class TestBuildMatrix:
    spec = SplineSpec(3, (0.3, 0.6), 0.0, 1.0)

    def test_single_row(self):
        B = build_matrix(self.spec, [0.42])
        assert B.values.shape == (1, 6)
        assert B.values.sum() == pytest.approx(1.0, abs=1e-12)
        assert B.column_means is None

    def test_centering(self):
        x = np.random.default_rng(0).uniform(0, 1, 300)
        B = build_matrix(self.spec, x, center=True)
        assert np.max(np.abs(B.values.mean(axis=0))) < 1e-12

    def test_fresh_point_via_means(self):
        x = np.random.default_rng(1).uniform(0, 1, 50)
        B = build_matrix(self.spec, x, center=True)
        fresh = 0.123
        np.testing.assert_array_equal(B.transform([fresh])[0], eval_basis(self.spec, fresh) - B.column_means)

    def test_out_of_support_propagates(self):
        with pytest.raises(OutOfSupportError):
            build_matrix(self.spec, [0.5, 1.5])


def test_design_basis_has_df_columns_and_full_rank():
    x = np.random.default_rng(2).uniform(-1, 1, 200)
    for df in (3, 4, 7, 11):
        B = design_basis(x, df)
        assert B.dimension == df
        assert np.linalg.matrix_rank(B.values) == df
        assert np.max(np.abs(B.values.mean(axis=0))) < 1e-12


@settings(max_examples=50, deadline=None)
@given(
    degree=st.integers(0, 5),
    knots=st.lists(st.floats(0.01, 0.99), max_size=8, unique=True),
    xs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=50),
)
def test_partition_of_unity_and_locality(degree, knots, xs):
    knots = sorted(knots)
    if any(b - a < 1e-6 for a, b in zip(knots, knots[1:])):
        return
    spec = SplineSpec(degree, tuple(knots), 0.0, 1.0)
    B = build_matrix(spec, xs).values
    assert np.all(B >= 0)
    np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-10)
    assert np.max(np.count_nonzero(B, axis=1)) <= degree + 1


def test_reproduces_polynomials():
    spec = SplineSpec(3, (-0.7, -0.1, 0.2, 0.9), -1.0, 1.5)
    grid = np.linspace(-1.0, 1.5, 2001)
    B = build_matrix(spec, grid).values
    for k in range(4):
        target = grid**k
        coef, *_ = np.linalg.lstsq(B, target, rcond=None)
        assert np.max(np.abs(B @ coef - target)) < 1e-8
