"""
Incomplete Cholesky: IC(0), threshold IC and modified IC.

Left-looking, one column at a time. Column ``j`` is gathered into a dense work
vector from ``A(j:n, j)`` minus the contributions of earlier columns that have
an entry in row ``j``. Entries are then kept or dropped:

* IC(0) (``droptol == 0``): keep only the pattern of ``tril(A)``;
* threshold: drop ``|c_i| < droptol * ||A(:, j)||_1`` on the unscaled value.

In modified mode a dropped ``c_i`` is added to the pivot of column ``j`` and
to the pending pivot of row ``i``, so ``(L L^T - A) e = 0``.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from precond_bench.analysis.costs import generation_cost
from precond_bench.errors import GenerationFailure
from precond_bench.logger import log_function_call
from precond_bench.preconditioners.base import CholeskyFactorOperator
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import IndexVector

logger = logging.getLogger(__name__)

DEFAULT_DROPTOLS = (0.0, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


def ic_label(droptol: float, modified: bool) -> str:
    name = "mic" if modified else "ic"
    if droptol == 0:
        return f"{name}(0)"
    return f"{name}(droptol={droptol:g})"


@dataclass(frozen=True, eq=False)
class IcFactor:
    L: SparseMatrix
    droptol: float
    modified: bool
    fill_ratio: float
    column_counts: IndexVector

    @property
    def label(self) -> str:
        return ic_label(self.droptol, self.modified)


@log_function_call()
def incomplete_cholesky(A: SparseMatrix, droptol: float = 0.0, modified: bool = False) -> IcFactor:
    """
    Factor ``A ~ L L^T``.

    Raises:
        GenerationFailure: a pivot is not positive or not finite
    """
    if droptol < 0:
        raise ValueError("droptol must be nonnegative")

    n = A.n
    csc = A.csr.tocsc()
    col_norm1 = np.asarray(abs(csc).sum(axis=0)).ravel()
    pattern_mode = droptol == 0

    work = np.zeros(n)
    mark = np.zeros(n, dtype=bool)
    pending = np.zeros(n)

    col_rows: list[np.ndarray] = []
    col_vals: list[np.ndarray] = []
    diag = np.zeros(n)
    # row i -> earlier columns k with L[i, k] != 0, as (k, L[i, k])
    row_entries: list[list[tuple[int, float]]] = [[] for _ in range(n)]

    for j in range(n):
        start, end = csc.indptr[j], csc.indptr[j + 1]
        rows = csc.indices[start:end]
        vals = csc.data[start:end]
        lower = rows >= j
        a_rows = rows[lower]
        touched = list(a_rows)
        work[a_rows] = vals[lower]
        mark[a_rows] = True
        if not mark[j]:
            mark[j] = True
            touched.append(j)

        for k, l_jk in row_entries[j]:
            k_rows = col_rows[k]
            k_vals = col_vals[k]
            first = np.searchsorted(k_rows, j)
            tail_rows = k_rows[first:]
            work[tail_rows] -= l_jk * k_vals[first:]
            fresh = tail_rows[~mark[tail_rows]]
            if fresh.size:
                mark[fresh] = True
                touched.extend(fresh.tolist())

        pivot = work[j] + pending[j]
        below = np.asarray(sorted(i for i in touched if i > j), dtype=np.int64)
        values = work[below]

        if pattern_mode:
            keep = np.isin(below, a_rows)
        else:
            keep = np.abs(values) >= droptol * col_norm1[j]

        if modified:
            dropped = ~keep
            pivot += values[dropped].sum()
            pending[below[dropped]] += values[dropped]

        if not (np.isfinite(pivot) and pivot > 0):
            raise GenerationFailure(column=j, value=float(pivot))

        l_jj = np.sqrt(pivot)
        kept_rows = below[keep]
        kept_vals = values[keep] / l_jj
        diag[j] = l_jj
        col_rows.append(kept_rows)
        col_vals.append(kept_vals)
        for i, v in zip(kept_rows.tolist(), kept_vals.tolist()):
            row_entries[i].append((j, v))

        idx = np.asarray(touched, dtype=np.int64)
        work[idx] = 0.0
        mark[idx] = False

    counts = np.asarray([1 + r.size for r in col_rows], dtype=np.int64)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    indices = np.concatenate([np.concatenate([[j], col_rows[j]]) for j in range(n)]) if n else np.zeros(0, dtype=np.int64)
    data = np.concatenate([np.concatenate([[diag[j]], col_vals[j]]) for j in range(n)]) if n else np.zeros(0)
    L = sp.csc_matrix((data, indices, indptr), shape=(n, n)).tocsr()

    tril_nnz = sp.tril(A.csr).nnz
    factor = IcFactor(
        L=SparseMatrix(csr=L, symmetric=False),
        droptol=droptol,
        modified=modified,
        fill_ratio=(int(counts.sum()) / tril_nnz) if tril_nnz else 1.0,
        column_counts=counts,
    )
    logger.debug(f"{factor.label}: nnz(L)={int(counts.sum())}, fill_ratio={factor.fill_ratio:.3f}")
    return factor


class IncompleteCholesky(CholeskyFactorOperator):
    precond_class = "ic"

    def __init__(self, factor: IcFactor):
        super().__init__(factor.L, factor.label, generation_cost=generation_cost(factor.column_counts))
        self.precond_class = "mic" if factor.modified else "ic"
        self.factor = factor
        self.fill_ratio = factor.fill_ratio


def build_ic(A: SparseMatrix, droptol: float = 0.0, modified: bool = False) -> IncompleteCholesky:
    """Factor and wrap as an operator; ``GenerationFailure`` propagates."""
    return IncompleteCholesky(incomplete_cholesky(A, droptol=droptol, modified=modified))


__all__ = ["IcFactor", "IncompleteCholesky", "incomplete_cholesky", "build_ic", "ic_label", "DEFAULT_DROPTOLS"]
