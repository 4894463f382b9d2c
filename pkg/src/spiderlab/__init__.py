"""Numerical laboratory for optimal stopping on star graphs.

Closed-form value functions and constants for up to two ribs, Monte Carlo
estimation of record sums under stopping rules, finite-difference property
verification, and a lattice solver whose refinement ladder probes the
three-rib constant.
"""

from .errors import (DimensionMismatch, DomainViolation, ExcessiveCensoring,
                     NonConvergence, SpiderError, UnsupportedN)
from .value_fn import (EvalPoint, ValueParams, c_n, in_stopping_set,
                       optimal_c, rescale, theta, v_hat)
from .stopping import (Drawdown, FirstEntry, FixedTime, StoppingRule,
                       SumThreshold, expected_identity_check, parse_rule,
                       rule_label, should_stop)
from .spider_core import (LineState, PathOutcome, SpiderState, WalkConfig,
                          simulate_path, step, step_line)
from .rng import PathStream, mix64, path_key, word
from .mc_engine import (KAPPA, BoundCheck, MCEstimate, bound_check, estimate,
                        estimate_to_dict)
from .verifier import (GridSpec, PropertyReport, PropertyResult,
                       SupermartingaleReport, check_properties,
                       report_to_dict, stencil_order_check, supermartingale_mc,
                       supermartingale_to_dict)
from .dp_solver import (DPGrid, StudyResult, convergence_study, grid_to_dict,
                        solve, solve_line, study_to_dict)

__version__ = "0.1.0"

__all__ = [
    "SpiderError", "UnsupportedN", "DomainViolation", "DimensionMismatch",
    "ExcessiveCensoring", "NonConvergence",
    "ValueParams", "EvalPoint", "theta", "c_n", "optimal_c", "v_hat",
    "rescale", "in_stopping_set",
    "FirstEntry", "Drawdown", "FixedTime", "SumThreshold", "StoppingRule",
    "should_stop", "expected_identity_check", "rule_label", "parse_rule",
    "WalkConfig", "SpiderState", "LineState", "PathOutcome", "step",
    "step_line", "simulate_path",
    "PathStream", "mix64", "path_key", "word",
    "MCEstimate", "BoundCheck", "KAPPA", "estimate", "bound_check",
    "estimate_to_dict",
    "GridSpec", "PropertyResult", "PropertyReport", "SupermartingaleReport",
    "check_properties", "report_to_dict", "stencil_order_check",
    "supermartingale_mc", "supermartingale_to_dict",
    "DPGrid", "StudyResult", "solve", "solve_line", "convergence_study",
    "grid_to_dict", "study_to_dict",
    "__version__",
]
