"""Convergence-domain maps for an iterative learning controller wrapped
around a sampled one-pole plant.

Three independent routes to the same question (does the trial error
contract?) live side by side: the unit-circle supremum of the update's
frequency response, eigen/singular analysis of the finite-trial lifted
iteration matrix, and direct iteration with overflow-safe norm tracking.
The sweep layer runs them over (A, B) grids and cross-checks the
verdicts against closed-form region boundaries.
"""

from .iteration import (IterationTrace, IterationVerdict, SeedEnsemble,
                        iterate, iteration_verdict)
from .learning import (LearningFunction, LearningKind, UnsupportedKindError,
                       eval_L, learning_from_token, named_learning,
                       parse_taps, toeplitz_of, unit_circle_zero_phases)
from .lifted import (LiftedOperators, SpectralSummary, build_lifted,
                     eigenvalues, gelfand_radius, max_sv_sq, spectral_radius,
                     spectral_summary, top_singular_seed)
from .plant import (ABPoint, GainLimits, PlantParams, TrialResponse,
                    ab_from_plant, classify_gain, classify_pole, is_divergent,
                    no_ilc_gain_limits, plant_from_ab, simulate_trial)
from .sweep import (AgreementStats, PointReport, SweepConfig, Tri,
                    audit_printed_bounds, compare_methods, evaluate_point,
                    extract_boundary, near_boundary_mask, run_sweep)
from .zdomain import (EPS_BAND, PoleError, RegionVerdict, TLocus,
                      T_of_theta, ac_region_analytic, analytic_curves,
                      closed_loop_P, mc_region_analytic, sup_T)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ABPoint", "PlantParams", "GainLimits", "TrialResponse",
    "ab_from_plant", "plant_from_ab", "no_ilc_gain_limits", "simulate_trial",
    "classify_pole", "classify_gain", "is_divergent",
    "LearningFunction", "LearningKind", "UnsupportedKindError",
    "named_learning", "learning_from_token", "parse_taps", "eval_L",
    "toeplitz_of", "unit_circle_zero_phases",
    "EPS_BAND", "PoleError", "TLocus", "RegionVerdict",
    "closed_loop_P", "T_of_theta", "sup_T",
    "mc_region_analytic", "ac_region_analytic", "analytic_curves",
    "LiftedOperators", "SpectralSummary", "build_lifted", "eigenvalues",
    "spectral_radius", "max_sv_sq", "gelfand_radius", "top_singular_seed",
    "spectral_summary",
    "IterationTrace", "IterationVerdict", "SeedEnsemble",
    "iterate", "iteration_verdict",
    "SweepConfig", "PointReport", "AgreementStats", "Tri",
    "evaluate_point", "run_sweep", "compare_methods", "near_boundary_mask",
    "extract_boundary", "audit_printed_bounds",
]
