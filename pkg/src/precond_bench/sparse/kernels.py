"""Sparse kernels: products, triangular solves and norms."""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm
from scipy.sparse.linalg import spsolve_triangular

from precond_bench.errors import DimensionMismatchError, NonFiniteError, SingularFactorError
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector

logger = logging.getLogger(__name__)


def _as_vector(x: Any, n: int) -> Vector:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionMismatchError(n, x.shape[0] if x.ndim else 0)
    return x


def _finite(y: Vector, kernel: str) -> Vector:
    if not np.all(np.isfinite(y)):
        raise NonFiniteError(f"{kernel} produced non-finite entries")
    return y


def matvec(A: SparseMatrix, x: Vector) -> Vector:
    """Return ``A @ x``; costs ``A.nnz`` multiply-adds in the work model."""
    x = _as_vector(x, A.n)
    return _finite(A.csr @ x, "matvec")


def _check_triangular(T: SparseMatrix, lower: bool) -> None:
    off = sp.triu(T.csr, k=1) if lower else sp.tril(T.csr, k=-1)
    if off.nnz:
        side = "upper" if lower else "lower"
        raise ValueError(f"Triangular factor has {off.nnz} entries in its strict {side} part")
    diag = T.diagonal()
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise SingularFactorError(f"Zero diagonal entry at row {int(zero[0])}")


def lower_tri_solve(L: SparseMatrix, b: Vector) -> Vector:
    """Solve ``L y = b`` for lower-triangular ``L``; costs ``L.nnz``."""
    b = _as_vector(b, L.n)
    _check_triangular(L, lower=True)
    return _finite(spsolve_triangular(L.csr.copy(), b, lower=True), "lower_tri_solve")


def upper_tri_solve(U: SparseMatrix, b: Vector) -> Vector:
    """Solve ``U y = b`` for upper-triangular ``U``; costs ``U.nnz``."""
    b = _as_vector(b, U.n)
    _check_triangular(U, lower=False)
    return _finite(spsolve_triangular(U.csr.copy(), b, lower=False), "upper_tri_solve")


@dataclass(frozen=True)
class MatrixNorms:
    fro: float
    one: float
    inf: float


def norms(A: SparseMatrix) -> MatrixNorms:
    """Frobenius, 1- and infinity-norms, computed exactly."""
    if A.nnz == 0:
        return MatrixNorms(0.0, 0.0, 0.0)
    return MatrixNorms(
        fro=float(sparse_norm(A.csr, "fro")),
        one=float(sparse_norm(A.csr, 1)),
        inf=float(sparse_norm(A.csr, np.inf)),
    )


def estimate_two_norm(A: SparseMatrix, iters: int = 1000, seed: int = 0, rtol: float = 1e-6) -> float:
    """
    Estimate ``||A||_2`` of a symmetric matrix by power iteration.

    The start vector is drawn from a seeded generator, so the estimate is
    reproducible. Iteration stops once the relative change of ``||A x||``
    falls below ``rtol``; the last two increments are then combined by
    Aitken extrapolation. The best value is returned at the iteration cap.
    """
    if A.nnz == 0:
        return 0.0

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.n)
    x /= np.linalg.norm(x)

    history: list[float] = []
    for _ in range(max(1, iters)):
        y = A.csr @ x
        mu = float(np.linalg.norm(y))
        if mu == 0.0:
            return 0.0
        history.append(mu)
        x = y / mu
        if len(history) >= 2 and abs(history[-1] - history[-2]) <= rtol * history[-1]:
            break
    else:
        logger.debug(f"Two-norm estimate hit the iteration cap ({iters}) at {history[-1]:.6e}")

    estimate = history[-1]
    if len(history) >= 3:
        delta_prev = history[-2] - history[-3]
        delta = history[-1] - history[-2]
        if delta_prev > delta > 0:
            estimate = history[-1] + delta * delta / (delta_prev - delta)
    return estimate


__all__ = [
    "matvec",
    "lower_tri_solve",
    "upper_tri_solve",
    "MatrixNorms",
    "norms",
    "estimate_two_norm",
]
