"""Seeded right-hand sides with a sparse +/-1 solution."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from precond_bench.problem.rng import Xoshiro256pp
from precond_bench.settings import DEFAULT_SEED
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector

logger = logging.getLogger(__name__)


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def support_size(n: int) -> int:
    """Number of nonzeros in the planted solution: ``round(log2 n) + 1``."""
    return round_half_up(math.log2(n)) + 1


@dataclass(frozen=True, eq=False)
class SeededProblem:
    x_star: Vector
    b: Vector
    seed: int
    support_size: int


def generate_problem(A: SparseMatrix, seed: int = DEFAULT_SEED) -> SeededProblem:
    """
    Plant a sparse +/-1 solution and form ``b = A x*``.

    ``round(log2 n)`` uniform vectors are drawn and discarded to warm up the
    stream. The ``round(log2 n) + 1`` largest entries of the next vector give
    the support (ties go to the lower index), and one further draw per
    support position, in increasing position order, picks its sign.
    """
    n = A.n
    if n < 2:
        raise ValueError(f"Right-hand side generation needs n >= 2, got n={n}")

    warmup = round_half_up(math.log2(n))
    k = warmup + 1
    rng = Xoshiro256pp(seed)
    for _ in range(warmup):
        rng.uniform_vector(n)

    draws = rng.uniform_vector(n)
    support = np.sort(np.argsort(-np.abs(draws), kind="stable")[:k])

    x_star = np.zeros(n, dtype=np.float64)
    for i in support:
        x_star[i] = 1.0 if rng.uniform() < 0.5 else -1.0

    b = A.csr @ x_star
    x_star.flags.writeable = False
    b.flags.writeable = False
    logger.debug(f"Generated problem: n={n}, seed={seed}, support={k}")
    return SeededProblem(x_star=x_star, b=b, seed=seed, support_size=k)


__all__ = ["SeededProblem", "generate_problem", "support_size", "round_half_up"]
