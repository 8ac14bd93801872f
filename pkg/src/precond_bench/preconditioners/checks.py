"""Randomized checks that an operator is symmetric and linear, as CG requires."""

from dataclasses import dataclass

import numpy as np

from precond_bench.preconditioners.base import PreconditionerOperator


@dataclass(frozen=True)
class OperatorCheck:
    passed: bool
    max_rel_error: float
    pairs: int


def check_symmetry(op: PreconditionerOperator, n: int, pairs: int = 20, seed: int = 0, rtol: float = 1e-10) -> OperatorCheck:
    """``<M r, s> == <r, M s>`` relative to ``||Mr|| ||s|| + ||r|| ||Ms||``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        r = rng.standard_normal(n)
        s = rng.standard_normal(n)
        mr, ms = op.apply(r), op.apply(s)
        scale = np.linalg.norm(mr) * np.linalg.norm(s) + np.linalg.norm(r) * np.linalg.norm(ms)
        if scale == 0:
            continue
        worst = max(worst, abs(float(mr @ s) - float(r @ ms)) / scale)
    return OperatorCheck(passed=worst <= rtol, max_rel_error=worst, pairs=pairs)


def check_linearity(op: PreconditionerOperator, n: int, pairs: int = 20, seed: int = 0, rtol: float = 1e-10) -> OperatorCheck:
    """``M(a r + b s) == a M r + b M s`` relative to ``|a| ||Mr|| + |b| ||Ms||``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        r = rng.standard_normal(n)
        s = rng.standard_normal(n)
        a, b = rng.standard_normal(2)
        mr, ms = op.apply(r), op.apply(s)
        combined = op.apply(a * r + b * s)
        scale = abs(a) * np.linalg.norm(mr) + abs(b) * np.linalg.norm(ms)
        if scale == 0:
            continue
        worst = max(worst, float(np.linalg.norm(combined - (a * mr + b * ms))) / scale)
    return OperatorCheck(passed=worst <= rtol, max_rel_error=worst, pairs=pairs)


__all__ = ["OperatorCheck", "check_symmetry", "check_linearity"]
