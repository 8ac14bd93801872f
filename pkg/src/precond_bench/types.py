"""Shared enums and type aliases."""

from enum import Enum

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]
IndexVector = NDArray[np.int64]


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    BREAKDOWN = "breakdown"


class RunStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    BREAKDOWN = "breakdown"
    GENERATION_FAILURE = "generation_failure"
    INGEST_FAILURE = "ingest_failure"

    @property
    def is_success(self) -> bool:
        return self is RunStatus.CONVERGED


class SddStatus(str, Enum):
    SDD_AS_SCALED = "sdd_as_scaled"
    SDD_UNSCALED_ONLY = "sdd_unscaled_only"
    NOT_SDD = "not_sdd"


class Baseline(str, Enum):
    CONTROL = "control"
    DIRECT = "direct"


class ReportMode(str, Enum):
    VS_CONTROL = "vs_control"
    VS_CONTROL_WITH_GEN = "vs_control_with_gen"
    VS_DIRECT = "vs_direct"
    VS_DIRECT_WITH_GEN = "vs_direct_with_gen"

    @property
    def baseline(self) -> Baseline:
        return Baseline.DIRECT if self.value.startswith("vs_direct") else Baseline.CONTROL

    @property
    def include_generation(self) -> bool:
        return self.value.endswith("_with_gen")


__all__ = [
    "Vector",
    "IndexVector",
    "SolveStatus",
    "RunStatus",
    "SddStatus",
    "Baseline",
    "ReportMode",
]
