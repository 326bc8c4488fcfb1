"""Clamped B-spline bases on a bounded interval.

Bases are evaluated with the Cox-de Boor triangle (one row per point, only
the ``degree + 1`` functions that can be nonzero are computed). Evaluation
outside ``[boundary_lo, boundary_hi]`` raises instead of extrapolating.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateKnotsError, InvalidConfigurationError, OutOfSupportError


@dataclass(frozen=True)
class SplineSpec:
    degree: int
    interior_knots: tuple[float, ...]
    boundary_lo: float
    boundary_hi: float

    def __post_init__(self):
        if self.degree < 0:
            raise InvalidConfigurationError(f"degree must be >= 0, got {self.degree}")
        if not self.boundary_lo < self.boundary_hi:
            raise InvalidConfigurationError(
                f"boundary_lo ({self.boundary_lo}) must be < boundary_hi ({self.boundary_hi})"
            )
        knots = np.asarray(self.interior_knots, dtype=float)
        if knots.size and np.any(np.diff(knots) <= 0):
            raise DegenerateKnotsError("interior knots must be strictly increasing")
        if knots.size and (knots[0] <= self.boundary_lo or knots[-1] >= self.boundary_hi):
            raise DegenerateKnotsError("interior knots must lie strictly inside the boundary")
        object.__setattr__(self, "interior_knots", tuple(float(k) for k in knots))

    @property
    def dimension(self) -> int:
        return len(self.interior_knots) + self.degree + 1

    @property
    def local_support(self) -> int:
        """Maximum number of basis functions that are nonzero at any point."""
        return self.degree + 1

    @property
    def knot_vector(self) -> np.ndarray:
        k = self.degree + 1
        return np.concatenate(
            [np.full(k, self.boundary_lo), self.interior_knots, np.full(k, self.boundary_hi)]
        )


def knots_from_data(x, df: int, degree: int = 3) -> SplineSpec:
    """Place ``df - degree - 1`` interior knots at equally spaced quantiles of `x`.

    Boundary knots sit at the data range, so the basis covers every sample.
    """
    x = np.asarray(x, dtype=float).ravel()
    if degree < 0:
        raise InvalidConfigurationError(f"degree must be >= 0, got {degree}")
    if df < degree + 1:
        raise InvalidConfigurationError(f"df={df} is below degree + 1 = {degree + 1}")
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise InvalidConfigurationError("x must be a nonempty vector of finite values")
    n_interior = df - degree - 1
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        raise DegenerateKnotsError("x is constant; cannot place boundary knots", quantile=0.0)
    probs = np.arange(1, n_interior + 1) / (n_interior + 1)
    knots = np.quantile(x, probs)
    prev = lo
    for q, k in zip(probs, knots):
        if not k > prev:
            raise DegenerateKnotsError(
                f"quantile knot at {q:.4g} (value {k:.6g}) coincides with its neighbour; "
                f"x is too heavily tied for df={df}",
                quantile=float(q),
            )
        prev = k
    if n_interior and not knots[-1] < hi:
        raise DegenerateKnotsError(
            f"quantile knot at {probs[-1]:.4g} (value {knots[-1]:.6g}) coincides with max(x)",
            quantile=float(probs[-1]),
        )
    return SplineSpec(degree, tuple(knots), lo, hi)


def _basis_rows(spec: SplineSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    bad = ~((x >= spec.boundary_lo) & (x <= spec.boundary_hi))
    if np.any(bad):
        v = float(x[np.argmax(bad)])
        raise OutOfSupportError(
            f"x={v!r} is outside the spline support [{spec.boundary_lo}, {spec.boundary_hi}]",
            value=v,
        )
    t = spec.knot_vector
    p = spec.degree
    dim = spec.dimension
    # span index s with t[s] <= x < t[s+1]; the right boundary belongs to the last span
    span = np.searchsorted(t, x, side="right") - 1
    span = np.clip(span, p, dim - 1)

    m = x.size
    N = np.zeros((m, p + 1))
    N[:, 0] = 1.0
    left = np.zeros((m, p + 1))
    right = np.zeros((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = x - t[span + 1 - j]
        right[:, j] = t[span + j] - x
        saved = np.zeros(m)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved

    out = np.zeros((m, dim))
    cols = span[:, None] - p + np.arange(p + 1)[None, :]
    out[np.arange(m)[:, None], cols] = N
    return out


def eval_basis(spec: SplineSpec, x: float) -> np.ndarray:
    """Evaluate every basis function at a single point."""
    return _basis_rows(spec, np.array([x], dtype=float))[0]


@dataclass
class BasisMatrix:
    """Evaluated basis for a sample.

    ``intercept=False`` drops the first B-spline, the usual convention for
    additive-model design blocks: the remaining columns no longer sum to one,
    so several centered blocks can sit side by side without exact collinearity.
    """

    values: np.ndarray
    spec: SplineSpec
    column_means: np.ndarray | None = None
    intercept: bool = True

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def centered(self) -> bool:
        return self.column_means is not None

    def transform(self, x) -> np.ndarray:
        """Evaluate new points on the same (possibly centered) basis."""
        rows = _basis_rows(self.spec, x)
        if not self.intercept:
            rows = rows[:, 1:]
        if self.column_means is not None:
            rows = rows - self.column_means
        return rows


def build_matrix(spec: SplineSpec, x, center: bool = False, intercept: bool = True) -> BasisMatrix:
    rows = _basis_rows(spec, x)
    if not intercept:
        rows = rows[:, 1:]
    means = None
    if center:
        means = rows.mean(axis=0)
        rows = rows - means
    return BasisMatrix(values=rows, spec=spec, column_means=means, intercept=intercept)


def design_basis(x, df: int, degree: int = 3) -> BasisMatrix:
    """Centered, intercept-free block with exactly `df` columns.

    Knots come from ``knots_from_data(x, df + 1, degree)``; dropping the first
    function leaves ``df`` columns, matching how ``df`` is counted for additive
    fits (a cubic block may therefore have as few as 3 columns).
    """
    if df < max(degree, 1):
        raise InvalidConfigurationError(
            f"design df={df} must be at least max(degree, 1) = {max(degree, 1)}"
        )
    spec = knots_from_data(x, df + 1, degree)
    return build_matrix(spec, x, center=True, intercept=False)
