"""
SDD systems solved through their 2n graph Laplacian.

The Laplacian is grounded at the last vertex of every connected component
and the inner preconditioner is built on what remains; grounded entries of
the inner solve are zero. Three routes, chosen from the SDD classification:

* ``sdd_as_scaled``: CG on the augmented system of the scaled matrix;
* ``sdd_unscaled_only``: operator built on the unscaled matrix, applied to the
  scaled system as ``S M^{-1} S`` with ``S = D^{1/2}``;
* ``not_sdd``: operator built on the diagonally lifted scaled matrix.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.sparse.csgraph import connected_components

from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.preconditioners.ic import build_ic
from precond_bench.problem.sdd import (
    SddClassification,
    augment_rhs,
    augment_to_laplacian,
    classify_sdd,
    recover_solution,
)
from precond_bench.solver.pcg import PcgConfig, pcg
from precond_bench.solver.trace import SolveTrace
from precond_bench.sparse.matrix import ScaledSystem, SparseMatrix
from precond_bench.types import SddStatus, Vector

logger = logging.getLogger(__name__)

InnerFactory = Callable[[SparseMatrix], PreconditionerOperator]

DEFAULT_INNER_DROPTOL = 1e-4
PROJECT_EVERY = 50


def default_inner(droptol: float = DEFAULT_INNER_DROPTOL) -> InnerFactory:
    return lambda L: build_ic(L, droptol=droptol)


class LaplacianPipeline(PreconditionerOperator):
    """
    Composite ``z = recover(G(augment(r)))`` where ``G`` is the grounded inner
    preconditioner on the augmented Laplacian.
    """

    precond_class = "laplacian"

    def __init__(
        self,
        A: SparseMatrix,
        inner_factory: Optional[InnerFactory] = None,
        lift: bool = False,
        scale: Optional[Vector] = None,
        label: str = "laplacian",
        augmented_solve: bool = False,
    ):
        self.augmented = augment_to_laplacian(A, lift=lift)
        L = self.augmented.L
        n_components, labels = connected_components(L.csr, directed=False)
        grounded = np.asarray(
            [int(np.flatnonzero(labels == c)[-1]) for c in range(n_components)], dtype=np.int64
        )
        keep = np.setdiff1d(np.arange(L.n), grounded)
        self.components = labels
        self.n_components = n_components
        self.grounded = grounded
        self._keep = keep
        self.inner = (inner_factory or default_inner())(SparseMatrix(csr=L.csr[keep][:, keep], symmetric=True))

        super().__init__(A.n, label, apply_cost=self.inner.apply_cost, generation_cost=self.inner.generation_cost)
        self.scale = None if scale is None else np.asarray(scale, dtype=np.float64)
        self.augmented_solve = augmented_solve
        self.fill_ratio = self.inner.fill_ratio
        self.factor_nnz = self.inner.factor_nnz
        logger.debug(
            f"{label}: 2n={L.n}, components={n_components}, inner={self.inner.config_label}"
        )

    def apply_augmented(self, r_aug: Vector) -> Vector:
        """Grounded inner preconditioner on the 2n system."""
        z = np.zeros_like(r_aug)
        z[self._keep] = self.inner.apply(r_aug[self._keep])
        return z

    def project(self, v: Vector) -> Vector:
        """Remove the per-component constant vectors (the Laplacian null space)."""
        sums = np.bincount(self.components, weights=v, minlength=self.n_components)
        counts = np.bincount(self.components, minlength=self.n_components)
        return v - (sums / counts)[self.components]

    def _apply(self, r: Vector) -> Vector:
        if self.scale is not None:
            r = r * self.scale
        z = recover_solution(self.apply_augmented(augment_rhs(r)))
        if self.scale is not None:
            z = z * self.scale
        return z

    def as_augmented_operator(self) -> PreconditionerOperator:
        return _AugmentedView(self)

    def solve(self, b: Vector, cfg: Optional[PcgConfig] = None) -> tuple[Vector, SolveTrace]:
        """CG on the augmented system with re-projection; returns the recovered solution and the 2n trace."""
        trace = pcg(
            self.augmented.L,
            augment_rhs(b),
            self.as_augmented_operator(),
            cfg,
            projector=self.project,
            project_every=PROJECT_EVERY,
        )
        return recover_solution(trace.solution, self.n), trace


class _AugmentedView(PreconditionerOperator):
    precond_class = "laplacian"

    def __init__(self, pipeline: LaplacianPipeline):
        super().__init__(
            pipeline.augmented.L.n,
            pipeline.config_label,
            apply_cost=pipeline.apply_cost,
            generation_cost=pipeline.generation_cost,
        )
        self._pipeline = pipeline

    def _apply(self, r: Vector) -> Vector:
        return self._pipeline.apply_augmented(r)


def build_laplacian_pipeline(
    A_unscaled: SparseMatrix,
    scaled: ScaledSystem,
    inner_factory: Optional[InnerFactory] = None,
    label: str = "laplacian",
) -> tuple[LaplacianPipeline, SddClassification]:
    """Classify and pick the route; ``GenerationFailure`` from the inner build propagates."""
    classification = classify_sdd(A_unscaled, scaled.matrix)
    if classification.status is SddStatus.SDD_AS_SCALED:
        pipeline = LaplacianPipeline(scaled.matrix, inner_factory, label=label, augmented_solve=True)
    elif classification.status is SddStatus.SDD_UNSCALED_ONLY:
        pipeline = LaplacianPipeline(A_unscaled, inner_factory, scale=scaled.scale, label=label)
    else:
        pipeline = LaplacianPipeline(scaled.matrix, inner_factory, lift=True, label=label)
    logger.debug(f"{label}: route {classification.status.value}")
    return pipeline, classification


__all__ = ["LaplacianPipeline", "build_laplacian_pipeline", "default_inner", "DEFAULT_INNER_DROPTOL"]
