"""Brownian motion with exponential resetting: exact laws, renewal-series
supremum distribution, tail asymptotics, and exact/discretized samplers,
cross-validated against each other."""

from ._kernels import BACKEND
from .analytic import (alpha_param, inf_window_exact, joint_cdf, joint_density,
                       norm_cdf, norm_pdf, norm_sf, reset_cdf_1d,
                       stationary_cdf, stationary_joint_cdf, stationary_pdf,
                       stationary_sf, sup_cdf_drifted_bm, sup_sf_drifted_bm,
                       win_min_joint)
from .asymptotics import (AsymValue, K_const, L_func, first_reset_layer_tail,
                          inf_window_asym, stationary_joint_asym,
                          stationary_joint_z0_bracket,
                          stationary_sup_tail_asym, sup_tail_asym)
from .montecarlo import Estimate, estimate_mean, estimate_prob
from .numerics import (QuadResult, adaptive_quad, golden_minimize,
                       invert_monotone, poisson_tail)
from .params import STATIONARY, AsymParams, ModelParams
from .series import (SeriesConfig, SeriesResult, fpt_survival, mean_fpt_exact,
                     mean_fpt_series, optimal_lambda, sample_dirichlet_simplex,
                     simplex_term_mc, stationary_sup_cdf_series,
                     sup_cdf_bounds, sup_cdf_curve, sup_cdf_series)
from .simulate import (PathFunctionals, RngStream, Trajectory,
                       path_functionals, sample_last_reset_age, sample_path,
                       sample_pair_at, sample_segment_sup,
                       sample_stationary_init, sample_sup, sample_sup_batch,
                       sample_sup_grid_batch, sample_value_at,
                       sample_window_inf_batch, trajectory_to_csv)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    # parameters
    "ModelParams", "AsymParams", "STATIONARY",
    # closed-form laws
    "norm_cdf", "norm_pdf", "norm_sf", "sup_cdf_drifted_bm",
    "sup_sf_drifted_bm", "reset_cdf_1d", "stationary_pdf", "stationary_cdf",
    "stationary_sf", "alpha_param", "joint_cdf", "joint_density",
    "stationary_joint_cdf", "win_min_joint", "inf_window_exact",
    # numerics
    "QuadResult", "adaptive_quad", "invert_monotone", "poisson_tail",
    "golden_minimize",
    # sampling
    "RngStream", "Trajectory", "PathFunctionals", "sample_stationary_init",
    "sample_path", "sample_segment_sup", "sample_sup", "path_functionals",
    "sample_last_reset_age", "sample_sup_batch", "sample_sup_grid_batch",
    "sample_value_at", "sample_pair_at", "sample_window_inf_batch",
    "trajectory_to_csv",
    # estimation
    "Estimate", "estimate_prob", "estimate_mean",
    # renewal series
    "SeriesConfig", "SeriesResult", "sample_dirichlet_simplex",
    "simplex_term_mc", "sup_cdf_series", "sup_cdf_bounds", "fpt_survival",
    "mean_fpt_series", "mean_fpt_exact", "optimal_lambda",
    "stationary_sup_cdf_series", "sup_cdf_curve",
    # asymptotics
    "AsymValue", "sup_tail_asym", "K_const", "L_func", "inf_window_asym",
    "stationary_sup_tail_asym", "stationary_joint_asym",
    "stationary_joint_z0_bracket", "first_reset_layer_tail",
]
