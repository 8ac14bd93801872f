"""
Symmetric Gauss-Seidel and SSOR.

Each sweep is a forward pass ``x += (D/w + L)^{-1} (r - A x)`` followed by a
backward pass ``x += (D/w + U)^{-1} (r - A x)``, always starting from
``x = 0`` so the resulting operator is linear and symmetric.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from precond_bench.errors import SingularFactorError, UndefinedOmegaError
from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.sparse.kernels import estimate_two_norm
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector

MODES = ("sgs", "ssor")


@dataclass
class SsorConfig:
    omega: float = 1.0
    sweeps: int = 1
    mode: str = "sgs"
    omega_label: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not (0.0 < self.omega < 2.0):
            raise ValueError("omega must lie in (0, 2)")
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if self.mode == "sgs" and self.omega != 1.0:
            raise ValueError("Symmetric Gauss-Seidel requires omega = 1")

    @property
    def label(self) -> str:
        if self.mode == "sgs":
            return f"sgs(sweeps={self.sweeps})"
        omega = self.omega_label or f"{self.omega:g}"
        return f"ssor(omega={omega},sweeps={self.sweeps})"


def optimal_omega(norm_J: float) -> float:
    """
    Optimal relaxation for matrices with Property A: ``1 + (J / (1 + sqrt(1 - J^2)))^2``.

    Raises:
        UndefinedOmegaError: ``norm_J > 1``
    """
    if norm_J < 0:
        raise ValueError("Jacobi iteration norm cannot be negative")
    if norm_J > 1:
        raise UndefinedOmegaError(f"Optimal omega is undefined for ||J|| = {norm_J!r} > 1")
    return 1.0 + (norm_J / (1.0 + math.sqrt(1.0 - norm_J * norm_J))) ** 2


def jacobi_iteration_norm(A: SparseMatrix, seed: int = 0) -> float:
    """Estimated ``||I - D^{-1} A||_2`` via the similar symmetric matrix ``I - D^{-1/2} A D^{-1/2}``."""
    inv_sqrt = 1.0 / np.sqrt(A.diagonal())
    scaling = sp.diags(inv_sqrt)
    J = sp.identity(A.n, format="csr") - scaling @ A.csr @ scaling
    return estimate_two_norm(SparseMatrix(csr=J, symmetric=True), seed=seed)


class SymmetricSor(PreconditionerOperator):
    precond_class = "ssor"

    def __init__(self, A: SparseMatrix, cfg: SsorConfig):
        diag = A.diagonal()
        zero = np.flatnonzero(diag == 0)
        if zero.size:
            raise SingularFactorError(f"SSOR needs a nonzero diagonal; row {int(zero[0])} is zero")

        cost_per_sweep = 2 * A.nnz + (4 * A.n if cfg.mode == "ssor" else 0)
        super().__init__(A.n, cfg.label, apply_cost=cfg.sweeps * cost_per_sweep, generation_cost=0)
        self.precond_class = cfg.mode
        self.cfg = cfg
        self._A = A.csr
        scaled_diag = sp.diags(diag / cfg.omega, format="csr")
        self._forward = (sp.tril(A.csr, k=-1, format="csr") + scaled_diag).tocsr()
        self._backward = (sp.triu(A.csr, k=1, format="csr") + scaled_diag).tocsr()

    def _apply(self, r: Vector) -> Vector:
        x = np.zeros_like(r)
        for _ in range(self.cfg.sweeps):
            x = x + spsolve_triangular(self._forward, r - self._A @ x, lower=True)
            x = x + spsolve_triangular(self._backward, r - self._A @ x, lower=False)
        return x


def build_ssor(A: SparseMatrix, cfg: SsorConfig) -> SymmetricSor:
    return SymmetricSor(A, cfg)


__all__ = [
    "SsorConfig",
    "SymmetricSor",
    "build_ssor",
    "optimal_omega",
    "jacobi_iteration_norm",
]
