"""
Sparse matrix storage for the benchmark.

``SparseMatrix`` wraps a canonical scipy CSR matrix: sorted column indices,
no duplicates, no stored zeros, read-only arrays. Symmetric matrices keep
both triangles so a product costs exactly ``nnz`` multiply-adds.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import scipy.sparse as sp

from precond_bench.errors import DimensionMismatchError, NotSpdCandidateError
from precond_bench.types import IndexVector, Vector


def _canonical_csr(matrix: Any) -> sp.csr_matrix:
    csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
    csr.sum_duplicates()
    csr.eliminate_zeros()
    csr.sort_indices()
    for array in (csr.data, csr.indices, csr.indptr):
        array.flags.writeable = False
    return csr


def _is_exactly_symmetric(csr: sp.csr_matrix) -> bool:
    if csr.shape[0] != csr.shape[1]:
        return False
    return (csr != csr.T).nnz == 0


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Square compressed-row matrix with an exact symmetry flag."""

    csr: sp.csr_matrix
    symmetric: bool = field(default=False)

    def __post_init__(self) -> None:
        csr = _canonical_csr(self.csr)
        if csr.shape[0] != csr.shape[1]:
            raise DimensionMismatchError(csr.shape[0], csr.shape[1], what="matrix columns")
        object.__setattr__(self, "csr", csr)

    @classmethod
    def from_scipy(cls, matrix: Any, symmetric: Optional[bool] = None) -> "SparseMatrix":
        """Build from any scipy/numpy matrix; symmetry is detected exactly when not given."""
        csr = _canonical_csr(matrix)
        if symmetric is None:
            symmetric = _is_exactly_symmetric(csr)
        return cls(csr=csr, symmetric=symmetric)

    @classmethod
    def from_dense(cls, dense: Any) -> "SparseMatrix":
        return cls.from_scipy(np.asarray(dense, dtype=np.float64))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(csr=sp.identity(n, format="csr"), symmetric=True)

    @property
    def n(self) -> int:
        return int(self.csr.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    @property
    def row_ptr(self) -> IndexVector:
        return self.csr.indptr

    @property
    def col_idx(self) -> IndexVector:
        return self.csr.indices

    @property
    def values(self) -> Vector:
        return self.csr.data

    def diagonal(self) -> Vector:
        return self.csr.diagonal()

    def lower(self) -> "SparseMatrix":
        """Lower triangle including the diagonal."""
        return SparseMatrix(csr=sp.tril(self.csr, format="csr"), symmetric=False)

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def __repr__(self) -> str:
        return f"SparseMatrix(n={self.n}, nnz={self.nnz}, symmetric={self.symmetric})"


@dataclass(frozen=True, eq=False)
class ScaledSystem:
    """Unit-diagonal symmetrized matrix ``D^{-1/2} A D^{-1/2}`` and the scale ``D^{1/2}``."""

    matrix: SparseMatrix
    scale: Vector
    original_diag: Vector

    def scale_rhs(self, b: Vector) -> Vector:
        """Map a right-hand side of the original system onto the scaled one."""
        b = np.asarray(b, dtype=np.float64)
        if b.shape != self.scale.shape:
            raise DimensionMismatchError(self.scale.shape[0], b.shape[0], what="right-hand side")
        return b / self.scale

    def unscale_solution(self, x_scaled: Vector) -> Vector:
        """Map a solution of the scaled system back to the original unknowns."""
        x_scaled = np.asarray(x_scaled, dtype=np.float64)
        if x_scaled.shape != self.scale.shape:
            raise DimensionMismatchError(self.scale.shape[0], x_scaled.shape[0], what="solution")
        return x_scaled / self.scale


def scale_and_symmetrize(A: SparseMatrix) -> ScaledSystem:
    """
    Scale ``A`` symmetrically to unit diagonal and average it with its transpose.

    Raises:
        NotSpdCandidateError: a diagonal entry is missing or not positive
    """
    diag = A.diagonal()
    bad = np.flatnonzero(~(diag > 0))
    if bad.size:
        i = int(bad[0])
        raise NotSpdCandidateError(
            f"Diagonal entry {i} is {diag[i]!r}; {bad.size} row(s) without a positive diagonal"
        )

    scale = np.sqrt(diag)
    coo = A.csr.tocoo()
    scaled = sp.csr_matrix(
        (coo.data / (scale[coo.row] * scale[coo.col]), (coo.row, coo.col)), shape=coo.shape
    )
    averaged = ((scaled + scaled.T) * 0.5).tocsr()
    averaged.setdiag(1.0)

    matrix = SparseMatrix(csr=averaged, symmetric=True)
    scale.flags.writeable = False
    diag.flags.writeable = False
    return ScaledSystem(matrix=matrix, scale=scale, original_diag=diag)


def bandwidth(A: SparseMatrix) -> int:
    """Largest ``|i - j|`` over stored entries."""
    if A.nnz == 0:
        return 0
    rows = np.repeat(np.arange(A.n), np.diff(A.row_ptr))
    return int(np.max(np.abs(rows - A.col_idx)))


__all__ = ["SparseMatrix", "ScaledSystem", "scale_and_symmetrize", "bandwidth"]
