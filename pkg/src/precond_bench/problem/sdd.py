"""
Symmetric diagonal dominance: classification, diagonal lifting, and the
2n-dimensional graph Laplacian augmentation with solution recovery.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from precond_bench.errors import DimensionMismatchError, NotSddError
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import SddStatus, Vector

logger = logging.getLogger(__name__)


def sdd_slack(A: SparseMatrix) -> Vector:
    """Per-row slack ``a_ii - sum_{j != i} |a_ij|``."""
    diag = A.diagonal()
    abs_rowsum = np.asarray(abs(A.csr).sum(axis=1)).ravel()
    return diag - (abs_rowsum - np.abs(diag))


@dataclass(frozen=True, eq=False)
class SddClassification:
    status: SddStatus
    slack: Vector


def classify_sdd(A_unscaled: SparseMatrix, A_scaled: SparseMatrix, tol: float = 0.0) -> SddClassification:
    """
    Three-way dominance check; the scaled matrix is examined first.

    ``slack`` is reported for the matrix that decided the status (the scaled
    one for ``sdd_as_scaled`` and ``not_sdd``).
    """
    if A_unscaled.n != A_scaled.n:
        raise DimensionMismatchError(A_unscaled.n, A_scaled.n, what="scaled matrix")

    scaled_slack = sdd_slack(A_scaled)
    if np.all(scaled_slack >= -tol):
        return SddClassification(SddStatus.SDD_AS_SCALED, scaled_slack)

    unscaled_slack = sdd_slack(A_unscaled)
    if np.all(unscaled_slack >= -tol):
        return SddClassification(SddStatus.SDD_UNSCALED_ONLY, unscaled_slack)

    return SddClassification(SddStatus.NOT_SDD, scaled_slack)


def diagonal_lift_to_sdd(A: SparseMatrix) -> SparseMatrix:
    """Raise each diagonal entry to at least the absolute off-diagonal row sum."""
    diag = A.diagonal()
    off = np.asarray(abs(A.csr).sum(axis=1)).ravel() - np.abs(diag)
    lifted = A.csr.copy()
    lifted.setdiag(np.maximum(diag, off))
    return SparseMatrix(csr=lifted, symmetric=A.symmetric)


@dataclass(frozen=True, eq=False)
class AugmentedSystem:
    """Graph Laplacian of dimension ``2n`` built from an SDD matrix of dimension ``n``."""

    L: SparseMatrix
    n: int


def augment_to_laplacian(A: SparseMatrix, lift: bool = False) -> AugmentedSystem:
    """
    Build ``[[D + N + S/2, -(P + S/2)], [-(P + S/2), D + N + S/2]]``.

    ``P`` and ``N`` are the positive and negative off-diagonal parts of ``A``,
    ``D`` holds the absolute off-diagonal row sums and ``S`` the slack.

    Raises:
        NotSddError: some row has negative slack and ``lift`` is off
    """
    slack = sdd_slack(A)
    if np.any(slack < 0):
        if not lift:
            worst = int(np.argmin(slack))
            raise NotSddError(f"Row {worst} has negative slack {slack[worst]!r}; enable lifting to proceed")
        A = diagonal_lift_to_sdd(A)
        slack = np.maximum(sdd_slack(A), 0.0)

    n = A.n
    off = A.csr - sp.diags(A.diagonal(), format="csr")
    positive = off.multiply(off > 0).tocsr()
    negative = off.multiply(off < 0).tocsr()
    d = np.asarray(abs(off).sum(axis=1)).ravel()

    half_slack = sp.diags(0.5 * slack, format="csr")
    block = sp.diags(d, format="csr") + negative + half_slack
    coupling = -(positive + half_slack)

    L = sp.bmat([[block, coupling], [coupling, block]], format="csr")
    logger.debug(f"Augmented n={n} system to Laplacian of size {2 * n}, nnz={L.nnz}")
    return AugmentedSystem(L=SparseMatrix(csr=L, symmetric=True), n=n)


def augment_rhs(b: Vector) -> Vector:
    """``[b; -b]``."""
    b = np.asarray(b, dtype=np.float64)
    return np.concatenate([b, -b])


def recover_solution(x_aug: Vector, n: int | None = None) -> Vector:
    """``(x1 - x2) / 2`` for ``x_aug = [x1; x2]``."""
    x_aug = np.asarray(x_aug, dtype=np.float64)
    if x_aug.shape[0] % 2 or (n is not None and x_aug.shape[0] != 2 * n):
        raise DimensionMismatchError(2 * (n if n is not None else x_aug.shape[0] // 2), x_aug.shape[0], what="augmented solution")
    half = x_aug.shape[0] // 2
    return (x_aug[:half] - x_aug[half:]) / 2.0


__all__ = [
    "sdd_slack",
    "SddClassification",
    "classify_sdd",
    "diagonal_lift_to_sdd",
    "AugmentedSystem",
    "augment_to_laplacian",
    "augment_rhs",
    "recover_solution",
]
