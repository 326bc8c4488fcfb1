"""
A simultaneous band for one component
=====================================

Draw one sample from the sparse additive simulation design, estimate the
first component and print the band next to the truth.
"""

import numpy as np

from hdgam import DgpConfig, build_bands, covers, fit_component, true_f
from hdgam.simulate import gen_design, gen_response, replication_rng

###############################################################################
# 200 observations, 50 covariates, only four of them matter.
cfg = DgpConfig(n=200, p=50, seed=3)
rng = replication_rng(cfg.seed, 1)
X = gen_design(cfg, rng)
y = gen_response(X, cfg, rng)

###############################################################################
# Seven spline functions for the target, four for each of the other 49
# covariates; the nuisance regressions pick their own penalty.
model = fit_component(X[:, 0], X[:, 1:], y, df_own=7, df_other=4)
print("selected in outcome regression:", model.nuisance.outcome_fit.support.size, "of", model.design.Z.shape[1])

###############################################################################
# The band holds over the whole grid at once.
band = build_bands(model, -2.0, 2.0, grid_size=9, B=2000, seed=1)
truth = true_f(1, band.grid)
print(f"critical value {band.c_alpha:.3f} (pointwise would be 1.96)")
print("     x    lower   f1_hat    upper    truth")
for row in zip(band.grid, band.lower, band.f1_hat, band.upper, truth):
    print("  ".join(f"{v:7.3f}" for v in row))
print("band covers the truth:", covers(band, truth))
