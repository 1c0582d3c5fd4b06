"""Copula-seeded sparse local latent-space graphs (CoLaS).

Generation, finite-graph statistics, large-n limits, one-graph calibration
and degree-preserving rewiring.
"""

from .calibration import FitReport, calibrate, fit_lambda, fit_theta_minimum_distance, wald_uncertainty
from .copula import CopulaFamily, MarkSet, WeightMarginal, sample_marks
from .errors import ColasError
from .generator import GenConfig, Regime, generate
from .geometry import Kernel
from .graph import Graph, read_edge_list, write_edge_list
from .limits import LimitModel, fgm_limit_C, fgm_limit_r, lambda_c_curve, r_along_curve
from .rewiring import RewireResult, rewire_to_target_r
from .stats import StatSummary, c_and_r, hill_estimate, summarize

__version__ = "0.1.0"

__all__ = [
    "ColasError", "CopulaFamily", "FitReport", "GenConfig", "Graph", "Kernel", "LimitModel", "MarkSet",
    "Regime", "RewireResult", "StatSummary", "WeightMarginal", "c_and_r", "calibrate", "fgm_limit_C",
    "fgm_limit_r", "fit_lambda", "fit_theta_minimum_distance", "generate", "hill_estimate",
    "lambda_c_curve", "r_along_curve", "read_edge_list", "rewire_to_target_r", "sample_marks",
    "summarize", "wald_uncertainty", "write_edge_list",
]
