"""
Run records: one line of JSON per (matrix, ordering, preconditioner) solve.
"""

import logging
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from pydantic import BaseModel, ConfigDict, model_validator

from precond_bench.errors import MissingBaselineError
from precond_bench.types import Baseline, RunStatus

logger = logging.getLogger(__name__)

RECORDS_FILENAME = "records.jsonl"

RunKey = tuple[str, str, str, int, float]


class RunRecord(BaseModel):
    """Outcome of one benchmark solve (or of a failed build or ingest)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    matrix_id: str
    ordering_label: str
    precond_label: str
    precond_class: str
    status: RunStatus
    iters: Optional[int] = None
    work_to_tol: Optional[int] = None
    generation_cost: Optional[int] = None
    apply_cost: Optional[int] = None
    control_work: Optional[int] = None
    direct_work: Optional[int] = None
    fill_ratio: Optional[float] = None
    factor_nnz: Optional[int] = None
    final_rel_residual: Optional[float] = None
    failure_reason: Optional[str] = None
    seed: int
    tol: float
    n: Optional[int] = None
    nnz: Optional[int] = None

    @model_validator(mode="after")
    def _check_status_fields(self) -> "RunRecord":
        if self.status is RunStatus.CONVERGED and not (self.work_to_tol is not None and self.work_to_tol > 0):
            raise ValueError("converged records need a positive work_to_tol")
        if self.status in (RunStatus.GENERATION_FAILURE, RunStatus.INGEST_FAILURE):
            if self.iters is not None or self.work_to_tol is not None:
                raise ValueError(f"{self.status.value} records carry no solve work")
        return self

    @property
    def key(self) -> RunKey:
        return (self.matrix_id, self.ordering_label, self.precond_label, self.seed, self.tol)

    @property
    def config_label(self) -> str:
        return f"{self.precond_label} [{self.ordering_label}]"

    @property
    def converged(self) -> bool:
        return self.status is RunStatus.CONVERGED

    def baseline_work(self, baseline: Baseline) -> int:
        value = self.control_work if baseline is Baseline.CONTROL else self.direct_work
        if value is None:
            raise MissingBaselineError(
                f"No {baseline.value} baseline for {self.matrix_id} / {self.config_label}"
            )
        return value

    def candidate_work(self, include_generation: bool = False) -> Optional[int]:
        """Work to tolerance, plus generation cost when asked; ``None`` unless converged."""
        if not self.converged or self.work_to_tol is None:
            return None
        if not include_generation:
            return self.work_to_tol
        if self.generation_cost is None:
            raise ValueError(f"{self.config_label}: generation cost is unknown")
        return self.work_to_tol + self.generation_cost

    def ratio(self, baseline: Baseline, include_generation: bool = False) -> float:
        """Work-reduction factor against the baseline; 0.0 for any run that did not converge."""
        reference = self.baseline_work(baseline)
        work = self.candidate_work(include_generation)
        if work is None:
            return 0.0
        return reference / work


def append_records(path: Union[str, Path], records: Iterable[RunRecord]) -> int:
    """Append records as JSON lines; returns how many were written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    written = 0
    with path.open("a", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.model_dump_json() + "\n")
            written += 1
    return written


def iter_records(path: Union[str, Path]) -> Iterator[RunRecord]:
    """Yield records from a JSONL file, skipping a truncated trailing line."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        lines = handle.read().split("\n")
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield RunRecord.model_validate_json(line)
        except ValueError:
            if number == len(lines):
                logger.warning(f"{path}: ignoring truncated final line")
                continue
            raise


def load_records(source: Union[str, Path]) -> list[RunRecord]:
    """Read a records file, or ``records.jsonl`` inside a directory."""
    source = Path(source)
    if source.is_dir():
        source = source / RECORDS_FILENAME
    if not source.exists():
        raise FileNotFoundError(f"No run records at {source}")
    records = list(iter_records(source))
    logger.info(f"Loaded {len(records)} run records from {source}")
    return records


__all__ = ["RunRecord", "RunKey", "append_records", "iter_records", "load_records", "RECORDS_FILENAME"]
