"""Generalized Zeckendorf decompositions over bin schedules (b_n, A_n, a)."""

from .constructor import AchievableSums, achievable_sums, build_sequence, omega
from .core import (
    AllowedSet,
    BinSchedule,
    Decomposition,
    InvalidScheduleError,
    PreconditionError,
    ScheduleError,
    ScheduleParseError,
    ScheduleSemanticError,
    Sequence,
    StateCapExceeded,
    ZeckError,
    binomial,
    expand_allowed,
    parse_schedule,
    render_schedule,
)
from .decomposer import DecompositionSet, count_summands, decompose, enumerate_decompositions
from .gnary import build_gnary_bruteforce, build_gnary_gapformula, count_representable, gap_report
from .stats import (
    bin_moments,
    bin_pmf,
    empirical_summand_pmf,
    gaussian_distance,
    lyapunov_series,
    model_summand_pmf,
    theorem35_check,
)
from .tree import ZeckTree, bin_equivalence_check, build_tree, recurrence_check, telephone_check
from .uniqueness import UniquenessVerdict, classify, divisibility_check, verify_exhaustive

__version__ = "0.1.0"

__all__ = [
    "AchievableSums",
    "AllowedSet",
    "BinSchedule",
    "Decomposition",
    "DecompositionSet",
    "InvalidScheduleError",
    "PreconditionError",
    "ScheduleError",
    "ScheduleParseError",
    "ScheduleSemanticError",
    "Sequence",
    "StateCapExceeded",
    "UniquenessVerdict",
    "ZeckError",
    "ZeckTree",
    "achievable_sums",
    "bin_equivalence_check",
    "bin_moments",
    "bin_pmf",
    "binomial",
    "build_gnary_bruteforce",
    "build_gnary_gapformula",
    "build_sequence",
    "build_tree",
    "classify",
    "count_representable",
    "count_summands",
    "decompose",
    "divisibility_check",
    "empirical_summand_pmf",
    "enumerate_decompositions",
    "expand_allowed",
    "gap_report",
    "gaussian_distance",
    "lyapunov_series",
    "model_summand_pmf",
    "omega",
    "parse_schedule",
    "recurrence_check",
    "render_schedule",
    "telephone_check",
    "theorem35_check",
    "verify_exhaustive",
]
