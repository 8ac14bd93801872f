"""
Preconditioner configuration grid: spec objects, default grid expansion and
construction of operators from specs.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

from precond_bench.errors import UndefinedOmegaError
from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.preconditioners.ic import DEFAULT_DROPTOLS, build_ic, ic_label
from precond_bench.preconditioners.jacobi import CONTROL_LABEL, build_jacobi_control
from precond_bench.preconditioners.laplacian import (
    DEFAULT_INNER_DROPTOL,
    LaplacianPipeline,
    build_laplacian_pipeline,
    default_inner,
)
from precond_bench.preconditioners.lu_adapter import symmetrize_lu
from precond_bench.preconditioners.sspai import DEFAULT_FILL_MULTIPLIERS, SspaiConfig, build_sspai
from precond_bench.preconditioners.ssor import SsorConfig, build_ssor, jacobi_iteration_norm, optimal_omega
from precond_bench.preconditioners.tns import ALPHA_LABELS, TnsConfig, build_tns, tns_alpha
from precond_bench.sparse.matrix import ScaledSystem, SparseMatrix
from precond_bench.types import Vector

logger = logging.getLogger(__name__)

DEFAULT_TNS_TERMS = (1, 2, 3, 4)
DEFAULT_SWEEPS = (1, 2)
DEFAULT_OMEGAS = (1.0, 1.2, 1.5, 1.8)

KINDS = ("control", "tns", "sgs", "ssor", "ssor_opt", "sspai", "ic", "laplacian", "lu")


@dataclass(frozen=True)
class PrecondSpec:
    """One point of the configuration grid."""

    kind: str
    terms: int = 0
    alpha_label: str = ""
    convention: str = "neumann"
    omega: Optional[float] = None
    sweeps: int = 1
    fill_multiplier: float = 0.0
    droptol: float = 0.0
    modified: bool = False
    lu_label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown preconditioner kind '{self.kind}'")

    @property
    def precond_class(self) -> str:
        if self.kind == "ic":
            return "mic" if self.modified else "ic"
        if self.kind == "ssor_opt":
            return "ssor"
        return self.kind

    @property
    def label(self) -> str:
        if self.kind == "control":
            return CONTROL_LABEL
        if self.kind == "tns":
            prefix = "tns" if self.convention == "neumann" else "tns-remainder"
            return f"{prefix}(m={self.terms},alpha={self.alpha_label})"
        if self.kind == "sgs":
            return f"sgs(sweeps={self.sweeps})"
        if self.kind == "ssor":
            return f"ssor(omega={self.omega:g},sweeps={self.sweeps})"
        if self.kind == "ssor_opt":
            return f"ssor(omega=opt,sweeps={self.sweeps})"
        if self.kind == "sspai":
            return f"sspai(fill={self.fill_multiplier:g})"
        if self.kind == "ic":
            return ic_label(self.droptol, self.modified)
        if self.kind == "laplacian":
            return f"laplacian(droptol={self.droptol:g})"
        return f"lu({self.lu_label})"


def expand_grid(
    tns_terms: Iterable[int] = DEFAULT_TNS_TERMS,
    tns_alphas: Iterable[str] = ALPHA_LABELS,
    sgs_sweeps: Iterable[int] = DEFAULT_SWEEPS,
    ssor_omegas: Iterable[float] = DEFAULT_OMEGAS,
    ssor_sweeps: Iterable[int] = DEFAULT_SWEEPS,
    ssor_optimal: bool = True,
    sspai_fill: Iterable[float] = DEFAULT_FILL_MULTIPLIERS,
    ic_droptols: Iterable[float] = DEFAULT_DROPTOLS,
    ic_modified: Iterable[bool] = (False, True),
    laplacian_droptols: Iterable[float] = (DEFAULT_INNER_DROPTOL,),
    tns_conventions: Iterable[str] = ("neumann",),
) -> list[PrecondSpec]:
    """All non-control configurations, in a fixed order. ``omega == 1`` is listed as SGS only."""
    specs: list[PrecondSpec] = []
    for convention in tns_conventions:
        for m in tns_terms:
            for alpha_label in tns_alphas:
                specs.append(PrecondSpec("tns", terms=m, alpha_label=alpha_label, convention=convention))
    for sweeps in sgs_sweeps:
        specs.append(PrecondSpec("sgs", sweeps=sweeps))
    for omega in ssor_omegas:
        if omega == 1.0:
            continue
        for sweeps in ssor_sweeps:
            specs.append(PrecondSpec("ssor", omega=omega, sweeps=sweeps))
    if ssor_optimal:
        for sweeps in ssor_sweeps:
            specs.append(PrecondSpec("ssor_opt", sweeps=sweeps))
    for fill in sspai_fill:
        specs.append(PrecondSpec("sspai", fill_multiplier=fill))
    for modified in ic_modified:
        for droptol in ic_droptols:
            specs.append(PrecondSpec("ic", droptol=droptol, modified=modified))
    for droptol in laplacian_droptols:
        specs.append(PrecondSpec("laplacian", droptol=droptol))
    return specs


def resolve_specs(specs: Sequence[PrecondSpec], A: SparseMatrix, seed: int = 0) -> tuple[list[PrecondSpec], Optional[float]]:
    """
    Drop optimal-omega SSOR specs when the Jacobi iteration norm exceeds one.

    Returns the remaining specs and the optimal omega (``None`` if undefined
    or not requested).
    """
    if not any(spec.kind == "ssor_opt" for spec in specs):
        return list(specs), None
    norm_J = jacobi_iteration_norm(A, seed=seed)
    try:
        omega = optimal_omega(norm_J)
    except UndefinedOmegaError as e:
        logger.info(f"Skipping optimal-omega SSOR: {e}")
        return [spec for spec in specs if spec.kind != "ssor_opt"], None
    if not omega < 2.0:
        logger.info(f"Skipping optimal-omega SSOR: omega={omega!r} is not below 2")
        return [spec for spec in specs if spec.kind != "ssor_opt"], None
    return list(specs), omega


def build_preconditioner(
    spec: PrecondSpec,
    scaled: ScaledSystem,
    A_unscaled: Optional[SparseMatrix] = None,
    optimal_omega_value: Optional[float] = None,
    lu_factors: Optional[tuple[SparseMatrix, Vector]] = None,
    seed: int = 0,
) -> PreconditionerOperator:
    """
    Build the operator for ``spec`` on the scaled system.

    Raises:
        GenerationFailure: factorization or adapter breakdown
    """
    A = scaled.matrix
    if spec.kind == "control":
        return build_jacobi_control(A.n)
    if spec.kind == "tns":
        alpha = tns_alpha(A, spec.alpha_label, seed=seed)
        return build_tns(A, TnsConfig(spec.terms, alpha, spec.alpha_label, spec.convention))
    if spec.kind == "sgs":
        return build_ssor(A, SsorConfig(omega=1.0, sweeps=spec.sweeps, mode="sgs"))
    if spec.kind == "ssor":
        return build_ssor(A, SsorConfig(omega=float(spec.omega), sweeps=spec.sweeps, mode="ssor"))
    if spec.kind == "ssor_opt":
        if optimal_omega_value is None:
            raise UndefinedOmegaError("Optimal omega was not resolved for this matrix")
        return build_ssor(
            A, SsorConfig(omega=optimal_omega_value, sweeps=spec.sweeps, mode="ssor", omega_label="opt")
        )
    if spec.kind == "sspai":
        return build_sspai(A, SspaiConfig(spec.fill_multiplier))
    if spec.kind == "ic":
        return build_ic(A, droptol=spec.droptol, modified=spec.modified)
    if spec.kind == "laplacian":
        pipeline, _ = build_laplacian_pipeline(
            A_unscaled if A_unscaled is not None else A,
            scaled,
            inner_factory=default_inner(spec.droptol),
            label=spec.label,
        )
        return pipeline
    if lu_factors is None:
        raise ValueError(f"{spec.label}: no external factors supplied")
    L, diagU = lu_factors
    return symmetrize_lu(L, diagU, label=spec.lu_label)


def describe(op: PreconditionerOperator) -> dict[str, Any]:
    """Cost summary used in logs and run records."""
    return {
        "label": op.config_label,
        "apply_cost": op.apply_cost,
        "generation_cost": op.generation_cost,
        "fill_ratio": op.fill_ratio,
        "factor_nnz": op.factor_nnz,
        "augmented_solve": isinstance(op, LaplacianPipeline) and op.augmented_solve,
    }


__all__ = [
    "PrecondSpec",
    "expand_grid",
    "resolve_specs",
    "build_preconditioner",
    "describe",
    "DEFAULT_TNS_TERMS",
    "DEFAULT_SWEEPS",
    "DEFAULT_OMEGAS",
]
