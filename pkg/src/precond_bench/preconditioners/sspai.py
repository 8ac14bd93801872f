"""
Symmetrized sparse approximate inverse.

For column ``j`` the pattern is ``j`` plus the ``k - 1`` largest-magnitude
off-diagonal entries of ``A(:, j)``. The local least-squares problem
``min ||A(:, P) m - e_j||`` is solved over the rows touched by ``A(:, P)``
through the normal equations, and the assembled ``K`` is replaced by
``(K + K^T) / 2``.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from precond_bench.logger import log_function_call
from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.problem.rhs import round_half_up
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector

logger = logging.getLogger(__name__)

DEFAULT_FILL_MULTIPLIERS = (0.5, 1.0, 2.0, 3.0)
JITTER = 1e-12


@dataclass
class SspaiConfig:
    fill_multiplier: float = 1.0

    def __post_init__(self):
        if not self.fill_multiplier > 0:
            raise ValueError("fill_multiplier must be positive")

    def per_column_budget(self, A: SparseMatrix) -> int:
        """``k = round(multiplier * nnz / n)``, at least 1."""
        return max(1, round_half_up(self.fill_multiplier * A.nnz / A.n))

    @property
    def label(self) -> str:
        return f"sspai(fill={self.fill_multiplier:g})"


class SparseApproximateInverse(PreconditionerOperator):
    precond_class = "sspai"

    def __init__(self, K: sp.csr_matrix, label: str, budget: int, fallback_columns: list[int]):
        super().__init__(K.shape[0], label, apply_cost=K.nnz, generation_cost=None)
        self.K = K
        self.budget = budget
        self.fallback_columns = fallback_columns

    def _apply(self, r: Vector) -> Vector:
        return self.K @ r


def _solve_local(block: np.ndarray, target: np.ndarray) -> np.ndarray:
    gram = block.T @ block
    rhs = block.T @ target
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        jitter = JITTER * max(1.0, float(np.trace(gram)) / gram.shape[0])
        return np.linalg.solve(gram + jitter * np.eye(gram.shape[0]), rhs)


@log_function_call()
def build_sspai(A: SparseMatrix, cfg: SspaiConfig) -> SparseApproximateInverse:
    n = A.n
    k = cfg.per_column_budget(A)
    csc = A.csr.tocsc()
    diag = A.diagonal()

    rows_out: list[np.ndarray] = []
    cols_out: list[np.ndarray] = []
    vals_out: list[np.ndarray] = []
    fallbacks: list[int] = []

    for j in range(n):
        rows = csc.indices[csc.indptr[j]:csc.indptr[j + 1]]
        vals = csc.data[csc.indptr[j]:csc.indptr[j + 1]]
        off = rows != j
        off_rows, off_vals = rows[off], vals[off]
        top = np.argsort(-np.abs(off_vals), kind="stable")[: k - 1]
        pattern = np.sort(np.concatenate([[j], off_rows[top]])).astype(np.int64)

        sub = csc[:, pattern]
        touched = np.unique(sub.indices)
        block = sub[touched, :].toarray()
        target = (touched == j).astype(np.float64)

        if np.linalg.matrix_rank(block) < pattern.size:
            if diag[j] == 0:
                raise ValueError(f"Column {j} has a rank-deficient block and a zero diagonal")
            fallbacks.append(j)
            rows_out.append(np.array([j]))
            cols_out.append(np.array([j]))
            vals_out.append(np.array([1.0 / diag[j]]))
            continue

        m = _solve_local(block, target)
        rows_out.append(pattern)
        cols_out.append(np.full(pattern.size, j))
        vals_out.append(m)

    K = sp.csr_matrix(
        (np.concatenate(vals_out), (np.concatenate(rows_out), np.concatenate(cols_out))), shape=(n, n)
    )
    K = ((K + K.T) * 0.5).tocsr()
    K.eliminate_zeros()
    K.sort_indices()

    if fallbacks:
        logger.warning(f"{cfg.label}: {len(fallbacks)} column(s) fell back to the diagonal inverse")
    logger.debug(f"{cfg.label}: k={k}, nnz(K)={K.nnz}")
    return SparseApproximateInverse(K, cfg.label, budget=k, fallback_columns=fallbacks)


__all__ = ["SspaiConfig", "SparseApproximateInverse", "build_sspai", "DEFAULT_FILL_MULTIPLIERS"]
