"""Orthogonal-score estimation of one additive component.

Pipeline: :func:`build_design` -> :func:`fit_nuisance` -> :func:`solve_theta`
-> :func:`estimate_covariance`. :func:`fit_component` runs all four.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateResidualError, HdgamError, InvalidConfigurationError
from .lasso import PenaltyConfig, PenalizedFit, weighted_lasso
from .splines import BasisMatrix, design_basis

SCORE_TOL = 1e-10
INSTRUMENT_TOL = 1e-8
JACOBIAN_TOL = 1e-10


@dataclass
class AdditiveDesign:
    G: BasisMatrix
    H: list[BasisMatrix]
    Z: np.ndarray
    y_centered: np.ndarray
    y_mean: float

    @property
    def target_spec(self):
        return self.G.spec

    @property
    def d1(self) -> int:
        return self.G.dimension

    @property
    def d2(self) -> int:
        return self.Z.shape[1] - self.d1

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    def transform_others(self, x_others) -> np.ndarray:
        """Centered H-block for new rows of the non-target covariates."""
        x_others = np.atleast_2d(np.asarray(x_others, dtype=float))
        blocks = [h.transform(x_others[:, k]) for k, h in enumerate(self.H)]
        return np.hstack(blocks) if blocks else np.zeros((x_others.shape[0], 0))


@dataclass
class NuisanceSet:
    beta_hat: np.ndarray
    gamma_hat: list[np.ndarray]
    nu_hat: np.ndarray
    outcome_residual: np.ndarray
    outcome_fit: PenalizedFit | None = None
    auxiliary_fits: list[PenalizedFit] = field(default_factory=list)


@dataclass
class OrthogonalModel:
    theta_hat: np.ndarray
    J_hat: np.ndarray
    score_residuals: np.ndarray
    sigma_eps_nu: np.ndarray
    sigma_n: np.ndarray
    design: AdditiveDesign
    nuisance: NuisanceSet | None = None
    score_gap: float = 0.0

    @property
    def n(self) -> int:
        return self.design.n


def build_design(x_target, x_others, y, df_own: int, df_other: int, degree: int = 3) -> AdditiveDesign:
    x_target = np.asarray(x_target, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    x_others = np.asarray(x_others, dtype=float)
    if x_others.ndim == 1:
        x_others = x_others[:, None]
    n = x_target.size
    if y.size != n or x_others.shape[0] != n:
        raise InvalidConfigurationError(
            f"row counts differ: target {n}, others {x_others.shape[0]}, y {y.size}"
        )
    try:
        G = design_basis(x_target, df_own, degree)
    except HdgamError as exc:
        raise _annotate(exc, "target covariate")
    H = []
    for k in range(x_others.shape[1]):
        try:
            H.append(design_basis(x_others[:, k], df_other, degree))
        except HdgamError as exc:
            raise _annotate(exc, f"covariate {k} of x_others")
    Z = np.hstack([G.values] + [h.values for h in H])
    y_mean = float(y.mean())
    return AdditiveDesign(G=G, H=H, Z=np.ascontiguousarray(Z), y_centered=y - y_mean, y_mean=y_mean)


def _annotate(exc: Exception, where: str) -> Exception:
    exc.args = (f"{where}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
    return exc


def _drop(Z, l):
    return np.delete(Z, l, axis=1)


def fit_nuisance(
    design: AdditiveDesign, config: PenaltyConfig = PenaltyConfig(), own_block: str = "free"
) -> NuisanceSet:
    """One lasso of y on Z, then one lasso of each g_l on the other columns.

    Coefficients and residuals come from the post-lasso refits.

    ``own_block="free"`` leaves the other target-basis columns unpenalized in
    the auxiliary regressions; ``"penalized"`` treats every column of Z alike.
    The target columns are strongly collinear among themselves and the
    outcome lasso rarely selects them, so any part of g_l that the auxiliary
    fit fails to explain through its neighbours turns straight into bias.
    """
    if own_block not in ("free", "penalized"):
        raise InvalidConfigurationError(f"own_block must be 'free' or 'penalized', got {own_block!r}")
    Z, y, d1 = design.Z, design.y_centered, design.d1
    try:
        outcome = weighted_lasso(Z, y, config.with_count(1))
    except HdgamError as exc:
        raise _annotate(exc, "outcome regression")
    beta = outcome.post_coefficients
    aux_cfg = config.with_count(d1)
    gammas, fits = [], []
    nu = np.empty((design.n, d1))
    for l in range(d1):
        Zl = _drop(Z, l)
        try:
            free = np.arange(d1 - 1) if own_block == "free" else None
            fit = weighted_lasso(Zl, Z[:, l], aux_cfg, unpenalized=free)
        except HdgamError as exc:
            raise _annotate(exc, f"auxiliary regression l={l}")
        gammas.append(fit.post_coefficients)
        fits.append(fit)
        nu[:, l] = Z[:, l] - Zl @ fit.post_coefficients
    return NuisanceSet(
        beta_hat=beta,
        gamma_hat=gammas,
        nu_hat=nu,
        outcome_residual=y - Z @ beta,
        outcome_fit=outcome,
        auxiliary_fits=fits,
    )


def _partial_outcome(design, nuisance, l):
    """y minus the outcome fit with the g_l term removed."""
    return design.y_centered - _drop(design.Z, l) @ np.delete(nuisance.beta_hat, l)


def solve_theta(design: AdditiveDesign, nuisance: NuisanceSet) -> np.ndarray:
    """Closed-form root of the (linear) empirical score, one coordinate at a time."""
    G = design.Z[:, : design.d1]
    theta = np.empty(design.d1)
    for l in range(design.d1):
        nu = nuisance.nu_hat[:, l]
        denom = float(np.mean(G[:, l] * nu))
        if abs(denom) < INSTRUMENT_TOL:
            raise DegenerateResidualError(
                f"component l={l}: E_n[g_l * nu_l] = {denom:.3g} has no identifying variation",
                component=l,
            )
        theta[l] = float(np.mean(_partial_outcome(design, nuisance, l) * nu)) / denom
    return theta


def score_matrix(design: AdditiveDesign, nuisance: NuisanceSet, theta) -> np.ndarray:
    """psi_l(W_i) for every observation i and coordinate l (n x d1)."""
    G = design.Z[:, : design.d1]
    out = np.empty((design.n, design.d1))
    for l in range(design.d1):
        eps = _partial_outcome(design, nuisance, l) - theta[l] * G[:, l]
        out[:, l] = eps * nuisance.nu_hat[:, l]
    return out


def estimate_covariance(
    design: AdditiveDesign, nuisance: NuisanceSet, theta_hat, jacobian: str = "residual"
) -> OrthogonalModel:
    """Plug-in Jacobian and sandwich covariance.

    ``jacobian="residual"`` uses -E_n[nu_l^2]; ``"instrument"`` uses
    -E_n[g_l * nu_l]. After a post-lasso refit the two agree up to rounding,
    since nu_l is orthogonal to the selected columns.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    psi = score_matrix(design, nuisance, theta_hat)
    n = design.n
    nu = nuisance.nu_hat
    if jacobian == "residual":
        J = -np.mean(nu**2, axis=0)
    elif jacobian == "instrument":
        J = -np.mean(design.Z[:, : design.d1] * nu, axis=0)
    else:
        raise InvalidConfigurationError(f"unknown jacobian variant {jacobian!r}")
    bad = np.flatnonzero(J >= -JACOBIAN_TOL)
    if bad.size:
        l = int(bad[0])
        raise DegenerateResidualError(f"component l={l}: Jacobian entry {J[l]:.3g} is not negative", component=l)
    sigma_eps_nu = psi.T @ psi / n
    sigma_n = sigma_eps_nu / np.outer(J, J)
    sigma_n = 0.5 * (sigma_n + sigma_n.T)
    return OrthogonalModel(
        theta_hat=theta_hat,
        J_hat=J,
        score_residuals=psi,
        sigma_eps_nu=sigma_eps_nu,
        sigma_n=sigma_n,
        design=design,
        nuisance=nuisance,
        score_gap=float(np.max(np.abs(psi.mean(axis=0)))),
    )


def predict_f1(model: OrthogonalModel, grid) -> np.ndarray:
    return model.design.G.transform(grid) @ model.theta_hat


def fit_component(
    x_target,
    x_others,
    y,
    df_own: int,
    df_other: int,
    degree: int = 3,
    config: PenaltyConfig = PenaltyConfig(),
    jacobian: str = "residual",
    own_block: str = "free",
) -> OrthogonalModel:
    design = build_design(x_target, x_others, y, df_own, df_other, degree)
    nuisance = fit_nuisance(design, config, own_block)
    theta = solve_theta(design, nuisance)
    return estimate_covariance(design, nuisance, theta, jacobian=jacobian)
