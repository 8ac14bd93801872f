"""Instrumented PCG solver."""

from precond_bench.solver.pcg import PcgConfig, pcg
from precond_bench.solver.trace import IterationRecord, SolveTrace

__all__ = ["PcgConfig", "pcg", "IterationRecord", "SolveTrace"]
