"""Sparse storage, kernels and Matrix Market I/O."""

from precond_bench.sparse.kernels import (
    MatrixNorms,
    estimate_two_norm,
    lower_tri_solve,
    matvec,
    norms,
    upper_tri_solve,
)
from precond_bench.sparse.matrix import ScaledSystem, SparseMatrix, bandwidth, scale_and_symmetrize
from precond_bench.sparse.matrix_market import read_matrix_market, write_matrix_market

__all__ = [
    "SparseMatrix",
    "ScaledSystem",
    "scale_and_symmetrize",
    "bandwidth",
    "matvec",
    "lower_tri_solve",
    "upper_tri_solve",
    "MatrixNorms",
    "norms",
    "estimate_two_norm",
    "read_matrix_market",
    "write_matrix_market",
]
