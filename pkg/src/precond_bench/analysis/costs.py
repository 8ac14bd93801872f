"""
Operation-count models: solve work, factorization generation cost and the
direct-solve baseline.
"""

import logging
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp

from precond_bench.orderings import Permutation, permute_symmetric
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import IndexVector

logger = logging.getLogger(__name__)


def total_work(n: int, nnz: int, apply_cost: int, iters: int) -> int:
    """``(5n + nnz + apply_cost) * iters + apply_cost``; the last term is the startup application."""
    if min(n, nnz, apply_cost, iters) < 0:
        raise ValueError("Work model arguments must be nonnegative")
    return (5 * int(n) + int(nnz) + int(apply_cost)) * int(iters) + int(apply_cost)


def generation_cost(counts: Iterable[int]) -> int:
    """Sum of squared per-column nonzero counts of a factor."""
    c = np.fromiter((int(v) for v in counts), dtype=np.int64)
    return int(np.sum(c * c))


def elimination_tree(A: SparseMatrix) -> IndexVector:
    """Parent array of the elimination tree of a symmetric pattern (``-1`` marks a root)."""
    n = A.n
    upper = sp.triu(A.csr, k=1, format="csc")
    indptr, indices = upper.indptr, upper.indices
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for p in range(indptr[k], indptr[k + 1]):
            i = int(indices[p])
            # path compression
            while i != -1 and i < k:
                nxt = int(ancestor[i])
                ancestor[i] = k
                if nxt == -1:
                    parent[i] = k
                i = nxt
    return parent


def symbolic_column_counts(A: SparseMatrix, parent: Optional[IndexVector] = None) -> IndexVector:
    """
    Nonzeros per column of the exact Cholesky factor, diagonal included.

    Column ``j`` of ``L`` is the union of ``tril(A)(:, j)`` with the patterns
    of its elimination-tree children, restricted to rows ``> j``.
    """
    n = A.n
    if parent is None:
        parent = elimination_tree(A)
    lower = sp.tril(A.csr, k=-1, format="csc")
    indptr, indices = lower.indptr, lower.indices

    pending: list[Optional[set[int]]] = [None] * n
    counts = np.ones(n, dtype=np.int64)
    for j in range(n):
        pattern = set(int(i) for i in indices[indptr[j] : indptr[j + 1]])
        merged = pending[j]
        if merged is not None:
            pattern |= merged
            pending[j] = None
        pattern.discard(j)
        counts[j] += len(pattern)
        p = int(parent[j])
        if p != -1:
            if pending[p] is None:
                pending[p] = pattern
            else:
                pending[p] |= pattern
    return counts


def direct_cost_baseline(A: SparseMatrix, p: Optional[Permutation] = None) -> int:
    """``nnz(L) + sum(c_i^2)`` for the exact Cholesky factor of ``P A P^T``."""
    if p is not None:
        A = permute_symmetric(A, p)
    counts = symbolic_column_counts(A)
    nnz_L = int(counts.sum())
    cost = nnz_L + generation_cost(counts)
    logger.debug(f"direct baseline: n={A.n}, nnz(L)={nnz_L}, cost={cost}")
    return cost


__all__ = [
    "total_work",
    "generation_cost",
    "elimination_tree",
    "symbolic_column_counts",
    "direct_cost_baseline",
]
