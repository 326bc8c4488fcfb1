"""Simultaneous confidence bands via a Gaussian multiplier bootstrap."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScaleError, InvalidConfigurationError
from .orthogonal import OrthogonalModel, predict_f1

SCALE_TOL = 1e-12
_CHUNK = 2048


@dataclass(frozen=True)
class ScoreProjection:
    """Standardized scores: column k is the linearized estimator at grid[k]."""

    values: np.ndarray
    grid: np.ndarray
    sigma_x: np.ndarray


@dataclass
class BandResult:
    grid: np.ndarray
    f1_hat: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sigma_x: np.ndarray
    c_alpha: float
    alpha: float
    bootstrap_draws: int
    seed: int
    n: int

    @property
    def half_width(self) -> np.ndarray:
        return self.sigma_x * self.c_alpha / math.sqrt(self.n)

    @property
    def mean_width(self) -> float:
        return float(np.mean(self.upper - self.lower))


def pointwise_scale(model: OrthogonalModel, grid) -> tuple[np.ndarray, np.ndarray]:
    """Centered basis at `grid` and sqrt(g(x)' Sigma_n g(x))."""
    g = model.design.G.transform(grid)
    var = np.einsum("kj,jl,kl->k", g, model.sigma_n, g)
    return g, np.sqrt(np.maximum(var, 0.0))


def project_scores(model: OrthogonalModel, grid) -> ScoreProjection:
    grid = np.asarray(grid, dtype=float).ravel()
    g, sigma = pointwise_scale(model, grid)
    small = np.flatnonzero(sigma <= SCALE_TOL)
    if small.size:
        x = float(grid[small[0]])
        raise DegenerateScaleError(f"pointwise scale vanishes at x={x!r}", point=x)
    # psi @ J^-1 @ g(x) / sigma(x); J is diagonal
    lin = model.score_residuals / model.J_hat
    values = (lin @ g.T) / sigma
    return ScoreProjection(values=values, grid=grid, sigma_x=sigma)


def _draw_multipliers(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """Rows are the multiplier vectors for draws start..stop-1.

    Draw b uses its own Philox stream keyed by `seed` with counter offset b, so
    any partition of the draws yields the same numbers.
    """
    out = np.empty((stop - start, n))
    for i, b in enumerate(range(start, stop)):
        bitgen = np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF, counter=[0, b, 0, 0])
        out[i] = np.random.Generator(bitgen).standard_normal(n)
    return out


def bootstrap_sup_draws(projection: ScoreProjection, B: int, seed: int, threads: int = 1) -> np.ndarray:
    """max_k |n^-1/2 sum_i xi_i * values[i, k]| for each of the B draws."""
    V = np.asarray(projection.values, dtype=float)
    n = V.shape[0]
    scale = 1.0 / math.sqrt(n)

    def chunk(bounds):
        lo, hi = bounds
        xi = _draw_multipliers(seed, lo, hi, n)
        return np.max(np.abs(xi @ V), axis=1) * scale

    bounds = [(lo, min(lo + _CHUNK, B)) for lo in range(0, B, _CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, bounds))
    else:
        parts = [chunk(b) for b in bounds]
    return np.concatenate(parts)


def bootstrap_critical_value(projection: ScoreProjection, alpha: float, B: int, seed: int, threads: int = 1) -> float:
    """(1 - alpha) order statistic of the bootstrapped sup-statistic."""
    if not 0 < alpha < 1:
        raise InvalidConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if B < 100:
        raise InvalidConfigurationError(f"need at least 100 bootstrap draws, got {B}")
    sups = np.sort(bootstrap_sup_draws(projection, B, seed, threads))
    k = math.ceil((1 - alpha) * B)
    return float(sups[min(max(k, 1), B) - 1])


def build_bands(
    model: OrthogonalModel,
    interval_lo: float,
    interval_hi: float,
    grid_size: int = 101,
    alpha: float = 0.05,
    B: int = 1000,
    seed: int = 0,
    threads: int = 1,
    c_alpha: float | None = None,
) -> BandResult:
    """Band over an equally spaced grid spanning [interval_lo, interval_hi].

    `c_alpha` overrides the bootstrap critical value (used by tests and
    sensitivity checks).
    """
    if not interval_lo < interval_hi:
        raise InvalidConfigurationError("interval_lo must be below interval_hi")
    if grid_size < 1:
        raise InvalidConfigurationError("grid_size must be positive")
    grid = np.linspace(interval_lo, interval_hi, grid_size)
    f1 = predict_f1(model, grid)
    proj = project_scores(model, grid)
    if c_alpha is None:
        c_alpha = bootstrap_critical_value(proj, alpha, B, seed, threads)
    half = proj.sigma_x * c_alpha / math.sqrt(model.n)
    return BandResult(
        grid=grid,
        f1_hat=f1,
        lower=f1 - half,
        upper=f1 + half,
        sigma_x=proj.sigma_x,
        c_alpha=float(c_alpha),
        alpha=alpha,
        bootstrap_draws=B,
        seed=seed,
        n=model.n,
    )


def covers(band: BandResult, truth) -> bool:
    truth = np.asarray(truth, dtype=float).ravel()
    if truth.shape != band.grid.shape:
        raise InvalidConfigurationError(
            f"truth has {truth.size} points but the band grid has {band.grid.size}"
        )
    return bool(np.all((band.lower <= truth) & (truth <= band.upper)))
