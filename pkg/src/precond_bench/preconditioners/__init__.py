"""Preconditioner families and the configuration grid."""

from precond_bench.preconditioners.base import CholeskyFactorOperator, PreconditionerOperator
from precond_bench.preconditioners.checks import OperatorCheck, check_linearity, check_symmetry
from precond_bench.preconditioners.ic import IcFactor, IncompleteCholesky, build_ic, incomplete_cholesky
from precond_bench.preconditioners.jacobi import JacobiControl, build_jacobi_control
from precond_bench.preconditioners.laplacian import LaplacianPipeline, build_laplacian_pipeline
from precond_bench.preconditioners.lu_adapter import SymmetrizedLu, load_lu_factors, symmetrize_lu
from precond_bench.preconditioners.registry import (
    PrecondSpec,
    build_preconditioner,
    expand_grid,
    resolve_specs,
)
from precond_bench.preconditioners.sspai import SparseApproximateInverse, SspaiConfig, build_sspai
from precond_bench.preconditioners.ssor import SsorConfig, SymmetricSor, build_ssor, optimal_omega
from precond_bench.preconditioners.tns import TnsConfig, TruncatedNeumannSeries, build_tns, tns_alpha

__all__ = [
    "PreconditionerOperator",
    "CholeskyFactorOperator",
    "OperatorCheck",
    "check_symmetry",
    "check_linearity",
    "JacobiControl",
    "build_jacobi_control",
    "TnsConfig",
    "TruncatedNeumannSeries",
    "build_tns",
    "tns_alpha",
    "SsorConfig",
    "SymmetricSor",
    "build_ssor",
    "optimal_omega",
    "IcFactor",
    "IncompleteCholesky",
    "incomplete_cholesky",
    "build_ic",
    "SspaiConfig",
    "SparseApproximateInverse",
    "build_sspai",
    "SymmetrizedLu",
    "symmetrize_lu",
    "load_lu_factors",
    "LaplacianPipeline",
    "build_laplacian_pipeline",
    "PrecondSpec",
    "expand_grid",
    "resolve_specs",
    "build_preconditioner",
]
