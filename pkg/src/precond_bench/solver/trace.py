"""Per-iteration history of one PCG run."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from precond_bench.types import SolveStatus, Vector


def _finite_or_none(value: float) -> Optional[float]:
    # NaN (untracked) is written as null
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    rel_residual: float
    rel_residual_recursive: float
    nrbe: float
    cumulative_work: int

    def to_json_dict(self) -> dict:
        return {
            "iter": self.iter,
            "relres": _finite_or_none(self.rel_residual),
            "nrbe": _finite_or_none(self.nrbe),
            "work": self.cumulative_work,
        }


@dataclass
class SolveTrace:
    """
    Outcome of a solve.

    ``records`` holds the recorded iterations (every ``record_every``-th plus
    the first and the last). ``alphas``, ``betas`` and ``a_norm_errors`` hold
    one value per completed iteration; the latter only when ``x_star`` was given.
    """
    n: int
    nnz: int
    apply_cost: int
    status: SolveStatus = SolveStatus.MAX_ITERS
    iterations: int = 0
    iters_to_tol: Optional[int] = None
    work_to_tol: Optional[int] = None
    final_rel_residual: float = float("nan")
    final_error_vs_xstar: Optional[float] = None
    records: list[IterationRecord] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    a_norm_errors: list[float] = field(default_factory=list)
    solution: Optional[Vector] = None

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    @property
    def cumulative_work(self) -> list[int]:
        return [record.cumulative_work for record in self.records]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(record.to_json_dict(), allow_nan=False) + "\n" for record in self.records)

    def write_jsonl(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl())
        return path


__all__ = ["IterationRecord", "SolveTrace"]
