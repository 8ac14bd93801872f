"""Base class for all preconditioners: an apply-inverse operator with declared costs."""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from precond_bench.errors import DimensionMismatchError, NonFiniteError
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector


class PreconditionerOperator(ABC):
    """
    ``z = M^{-1} r`` with the cost bookkeeping used by the work model.

    Subclasses set ``apply_cost`` (operations per application) and
    ``generation_cost`` (operations to build; ``None`` when the construction
    cost is not modelled) and implement ``_apply``.
    """

    precond_class: str = "unknown"

    def __init__(self, n: int, config_label: str, apply_cost: int, generation_cost: Optional[int]):
        self.n = n
        self.config_label = config_label
        self.apply_cost = int(apply_cost)
        self.generation_cost = None if generation_cost is None else int(generation_cost)

    # factorization preconditioners override these
    fill_ratio: Optional[float] = None
    factor_nnz: Optional[int] = None

    @abstractmethod
    def _apply(self, r: Vector) -> Vector:
        """Apply the operator to a validated vector."""

    def apply(self, r: Vector) -> Vector:
        r = np.asarray(r, dtype=np.float64)
        if r.ndim != 1 or r.shape[0] != self.n:
            raise DimensionMismatchError(self.n, r.shape[0] if r.ndim else 0)
        z = self._apply(r)
        if not np.all(np.isfinite(z)):
            raise NonFiniteError(f"{self.config_label} produced non-finite output")
        return z

    def __call__(self, r: Vector) -> Vector:
        return self.apply(r)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(label={self.config_label!r}, n={self.n}, "
            f"apply_cost={self.apply_cost}, generation_cost={self.generation_cost})"
        )


class CholeskyFactorOperator(PreconditionerOperator):
    """``z = L^{-T} L^{-1} r`` for a lower-triangular factor with positive diagonal."""

    def __init__(self, L: SparseMatrix, config_label: str, generation_cost: Optional[int], base_nnz: Optional[int] = None):
        super().__init__(L.n, config_label, apply_cost=2 * L.nnz, generation_cost=generation_cost)
        self.L = L
        self._lower = L.csr.copy()
        self._upper = sp.csr_matrix(L.csr.T)
        self.factor_nnz = L.nnz
        if base_nnz:
            self.fill_ratio = L.nnz / base_nnz

    def _apply(self, r: Vector) -> Vector:
        y = spsolve_triangular(self._lower, r, lower=True)
        return spsolve_triangular(self._upper, y, lower=False)


__all__ = ["PreconditionerOperator", "CholeskyFactorOperator"]
