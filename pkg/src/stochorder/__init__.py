"""Stochastic-order comparison of two laws on a half-line.

Decide the usual stochastic (st), hazard-rate (hr) and likelihood-ratio (lr)
orders of P against Q from the shape of the likelihood ratio l = f_P / f_Q
near the left end of the support, and confirm the outcome with direct checks
on survival functions.
"""

from .config import DEFAULT_CONFIG, RunConfig
from .corpus import Scenario, load_corpus, run_corpus, run_scenario
from .criteria import (
    CriterionVerdict,
    classify_and_decide,
    endpoint_logconcave,
    endpoint_unimodal,
    lr_endpoint_test,
    sign_pattern_criterion,
    superlevel_criterion,
    tail_mean_sign,
)
from .distributions import Distribution, Support, evaluation_grid, quantile, survival
from .errors import (
    ConvergenceError,
    CorpusError,
    DiagnosticError,
    DomainError,
    SpecError,
    StochOrderError,
    SupportError,
)
from .families import (
    ExponentialSpec,
    FoldedNormalSpec,
    GammaSpec,
    HalfNormalSpec,
    HalfStudentSpec,
    Piece,
    PiecewiseSpec,
    PoissonSpec,
    TabulatedSpec,
    UniformSpec,
    ZeroInflatedPoissonSpec,
    build,
    load_spec,
    loads_spec,
)
from .oracle import OracleReport, SurvivalTable, implication_audit, survival_table, verify_hr, verify_lr, verify_st
from .ratio import RatioProfile, forward_difference, ratio_profile, second_difference_log
from .shape import ShapeReport, check_log_concave, check_unimodal, classify, sign_word

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "RunConfig",
    "Scenario",
    "load_corpus",
    "run_corpus",
    "run_scenario",
    "CriterionVerdict",
    "classify_and_decide",
    "endpoint_logconcave",
    "endpoint_unimodal",
    "lr_endpoint_test",
    "sign_pattern_criterion",
    "superlevel_criterion",
    "tail_mean_sign",
    "Distribution",
    "Support",
    "evaluation_grid",
    "quantile",
    "survival",
    "ConvergenceError",
    "CorpusError",
    "DiagnosticError",
    "DomainError",
    "SpecError",
    "StochOrderError",
    "SupportError",
    "ExponentialSpec",
    "FoldedNormalSpec",
    "GammaSpec",
    "HalfNormalSpec",
    "HalfStudentSpec",
    "Piece",
    "PiecewiseSpec",
    "PoissonSpec",
    "TabulatedSpec",
    "UniformSpec",
    "ZeroInflatedPoissonSpec",
    "build",
    "load_spec",
    "loads_spec",
    "OracleReport",
    "SurvivalTable",
    "implication_audit",
    "survival_table",
    "verify_hr",
    "verify_lr",
    "verify_st",
    "RatioProfile",
    "forward_difference",
    "ratio_profile",
    "second_difference_log",
    "ShapeReport",
    "check_log_concave",
    "check_unimodal",
    "classify",
    "sign_word",
    "__version__",
]
