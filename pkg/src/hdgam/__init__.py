"""Inference on one component of a sparse high-dimensional additive model."""

__version__ = "0.1.0"

from .bands import BandResult, bootstrap_critical_value, build_bands, covers, project_scores
from .cv import CvResult, cross_validate_df
from .data import DataTable, load_csv, synthetic_housing
from .errors import *  # noqa: F401,F403
from .lasso import PenaltyConfig, PenalizedFit, lasso_solve, penalty_level, post_lasso, weighted_lasso
from .orthogonal import (
    AdditiveDesign,
    OrthogonalModel,
    build_design,
    estimate_covariance,
    fit_component,
    fit_nuisance,
    predict_f1,
    solve_theta,
)
from .simulate import DgpConfig, SimulationReport, run_monte_carlo, true_f
from .splines import BasisMatrix, SplineSpec, build_matrix, design_basis, eval_basis, knots_from_data
