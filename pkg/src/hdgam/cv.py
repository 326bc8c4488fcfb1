"""Cross-validated choice of spline degrees of freedom for one component.

For every pair (own df, other df) the whole estimation pipeline is refit on
four folds and scored on the fifth; the chosen own df is the one belonging to
the pair with the smallest mean out-of-fold squared error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import DataTable
from .errors import CvFailureError, HdgamError, InvalidConfigurationError
from .lasso import PenaltyConfig
from .orthogonal import fit_component


@dataclass
class CvResult:
    component: str
    chosen_own: int
    chosen_other: int
    surface: dict[tuple[int, int], float]
    failed: list[tuple[int, int]] = field(default_factory=list)
    folds: int = 5
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "chosen_own": self.chosen_own,
            "chosen_other": self.chosen_other,
            "folds": self.folds,
            "seed": self.seed,
            "surface": [
                {"df_own": k[0], "df_other": k[1], "mse": v} for k, v in sorted(self.surface.items())
            ],
            "failed": [{"df_own": k[0], "df_other": k[1]} for k in self.failed],
        }


def fold_ids(n: int, folds: int, seed: int) -> np.ndarray:
    perm = np.random.default_rng(seed).permutation(n)
    ids = np.empty(n, dtype=int)
    for k, chunk in enumerate(np.array_split(perm, folds)):
        ids[chunk] = k
    return ids


def predict_surface(model, x_target, x_others) -> np.ndarray:
    """Fitted additive surface (without the intercept) at new rows.

    New covariate values are clipped into the training support, since the
    basis does not extrapolate.
    """
    d = model.design
    xt = np.clip(x_target, d.G.spec.boundary_lo, d.G.spec.boundary_hi)
    xo = np.column_stack(
        [np.clip(x_others[:, k], h.spec.boundary_lo, h.spec.boundary_hi) for k, h in enumerate(d.H)]
    )
    beta_h = model.nuisance.beta_hat[d.d1:]
    return d.G.transform(xt) @ model.theta_hat + d.transform_others(xo) @ beta_h


def fold_mse(x1, xo, y, ids, df_own, df_other, degree, config) -> float:
    errs = []
    for k in np.unique(ids):
        tr, te = ids != k, ids == k
        model = fit_component(x1[tr], xo[tr], y[tr], df_own, df_other, degree, config)
        pred = model.design.y_mean + predict_surface(model, x1[te], xo[te])
        errs.append(np.mean((y[te] - pred) ** 2))
    return float(np.mean(errs))


def cross_validate_df(
    table: DataTable,
    target: str,
    component: str,
    own_grid,
    other_grid,
    folds: int = 5,
    seed: int = 0,
    degree: int = 3,
    config: PenaltyConfig = PenaltyConfig(),
) -> CvResult:
    own_grid = sorted(set(int(k) for k in own_grid))
    other_grid = sorted(set(int(k) for k in other_grid))
    if not own_grid or not other_grid:
        raise InvalidConfigurationError("df grids must be nonempty")
    y, x1, xo, _ = table.split(target, component)
    n = y.size
    if n < folds * max(own_grid) + folds:
        raise InvalidConfigurationError(
            f"n={n} is too small for {folds}-fold CV with df up to {max(own_grid)}"
        )
    ids = fold_ids(n, folds, seed)
    surface, failed = {}, []
    for ko in own_grid:
        for kr in other_grid:
            try:
                surface[(ko, kr)] = fold_mse(x1, xo, y, ids, ko, kr, degree, config)
            except HdgamError:
                failed.append((ko, kr))
    if not surface:
        raise CvFailureError(f"every (df_own, df_other) pair failed for component {component!r}")
    best = min(surface, key=lambda k: (surface[k], k))
    return CvResult(component, best[0], best[1], surface, failed, folds, seed)
