"""Adapter turning external incomplete LU factors into a symmetric operator."""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import scipy.sparse as sp

from precond_bench.errors import LuAdapterFailure
from precond_bench.preconditioners.base import CholeskyFactorOperator
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.sparse.matrix_market import read_matrix_market
from precond_bench.types import Vector

logger = logging.getLogger(__name__)


class SymmetrizedLu(CholeskyFactorOperator):
    precond_class = "lu"


def symmetrize_lu(L: SparseMatrix, diagU: Vector, label: str = "external") -> SymmetrizedLu:
    """
    Form ``L' = L diag(diagU)^{1/2}`` and apply ``L'^{-T} L'^{-1}``.

    Raises:
        LuAdapterFailure: an entry of ``diagU`` is not positive
    """
    diagU = np.asarray(diagU, dtype=np.float64)
    if diagU.shape != (L.n,):
        raise ValueError(f"diagU has {diagU.shape[0]} entries, factor has n={L.n}")
    bad = np.flatnonzero(~(diagU > 0))
    if bad.size:
        i = int(bad[0])
        raise LuAdapterFailure(column=i, value=float(diagU[i]), reason="nonpositive U diagonal")
    if sp.triu(L.csr, k=1).nnz:
        raise ValueError("L factor has entries above the diagonal")

    scaled = (L.csr @ sp.diags(np.sqrt(diagU))).tocsr()
    return SymmetrizedLu(SparseMatrix(csr=scaled, symmetric=False), f"lu({label})", generation_cost=None)


def load_lu_factors(l_path: Union[str, Path], diag_path: Union[str, Path]) -> tuple[SparseMatrix, Vector]:
    """Read ``L`` from Matrix Market and ``diag(U)`` from a one-value-per-line text file."""
    L = read_matrix_market(l_path)
    diagU = np.loadtxt(diag_path, dtype=np.float64, ndmin=1)
    logger.debug(f"Loaded external factors: n={L.n}, nnz(L)={L.nnz}")
    return L, diagU


__all__ = ["SymmetrizedLu", "symmetrize_lu", "load_lu_factors"]
