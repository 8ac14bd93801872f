"""Configuration-driven sweeps, reports, matrix fetching and test matrix generation."""

from precond_bench.harness.config import (
    BenchmarkConfig,
    GeneratorSpec,
    LuFactorSource,
    MatrixSource,
    OrderingSpec,
    PrecondGrid,
    SolverSettings,
)
from precond_bench.harness.fetch import FetchResult, fetch_matrix
from precond_bench.harness.generators import generate_test_matrix, poisson2d, random_sdd, tridiag
from precond_bench.harness.report import ReportResult, make_report
from precond_bench.harness.runner import BenchmarkResult, RunManifest, run_benchmark

__all__ = [
    "BenchmarkConfig",
    "GeneratorSpec",
    "LuFactorSource",
    "MatrixSource",
    "OrderingSpec",
    "PrecondGrid",
    "SolverSettings",
    "FetchResult",
    "fetch_matrix",
    "generate_test_matrix",
    "poisson2d",
    "tridiag",
    "random_sdd",
    "make_report",
    "ReportResult",
    "run_benchmark",
    "BenchmarkResult",
    "RunManifest",
]
