"""Problem setup: seeded right-hand sides and SDD handling."""

from precond_bench.problem.rhs import SeededProblem, generate_problem, support_size
from precond_bench.problem.rng import SplitMix64, Xoshiro256pp
from precond_bench.problem.sdd import (
    AugmentedSystem,
    SddClassification,
    augment_rhs,
    augment_to_laplacian,
    classify_sdd,
    diagonal_lift_to_sdd,
    recover_solution,
    sdd_slack,
)

__all__ = [
    "SeededProblem",
    "generate_problem",
    "support_size",
    "SplitMix64",
    "Xoshiro256pp",
    "SddClassification",
    "classify_sdd",
    "sdd_slack",
    "AugmentedSystem",
    "augment_to_laplacian",
    "augment_rhs",
    "recover_solution",
    "diagonal_lift_to_sdd",
]
