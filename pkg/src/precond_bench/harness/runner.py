"""
Benchmark sweep: matrices x orderings x preconditioner configurations.

Every solve produces one ``RunRecord`` appended to ``records.jsonl`` in the
output directory; ``manifest.json`` indexes the run keys with their status.
Records are written in grid order, so identical configurations give
byte-identical record files regardless of the worker count.
"""

import dataclasses
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, TypeVar, Union

import numpy as np
from pydantic import BaseModel, Field

from precond_bench.analysis.costs import direct_cost_baseline
from precond_bench.analysis.records import RECORDS_FILENAME, RunKey, RunRecord, append_records, iter_records
from precond_bench.errors import GenerationFailure, NonFiniteError, PrecondBenchError
from precond_bench.harness.config import BenchmarkConfig, LuFactorSource, MatrixSource, OrderingSpec
from precond_bench.harness.fetch import fetch_matrix
from precond_bench.harness.generators import generate_test_matrix
from precond_bench.logger import StructuredLogger, log_benchmark_operation
from precond_bench.orderings import Permutation, load_permutation, permute_symmetric, rcm_order
from precond_bench.preconditioners.laplacian import LaplacianPipeline
from precond_bench.preconditioners.lu_adapter import load_lu_factors
from precond_bench.preconditioners.registry import PrecondSpec, build_preconditioner, describe, resolve_specs
from precond_bench.problem.rhs import SeededProblem, generate_problem
from precond_bench.settings import Settings, get_settings
from precond_bench.solver.pcg import PcgConfig, pcg
from precond_bench.solver.trace import SolveTrace
from precond_bench.sparse.kernels import estimate_two_norm
from precond_bench.sparse.matrix import ScaledSystem, SparseMatrix, bandwidth, scale_and_symmetrize
from precond_bench.sparse.matrix_market import read_matrix_market
from precond_bench.types import RunStatus
from precond_bench.version import __version__

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
INGEST_LABEL = "ingest"
NO_ORDERING = "-"
CONTROL_SPEC = PrecondSpec("control")
_UNSAFE = re.compile(r"[^A-Za-z0-9._=-]+")

T = TypeVar("T")


def key_string(key: RunKey) -> str:
    matrix_id, ordering, label, seed, tol = key
    return f"{matrix_id}|{ordering}|{label}|{seed}|{tol!r}"


class RunManifest(BaseModel):
    """Index of a sweep: configuration hash, toolkit version, seed and per-run status."""

    config_hash: str
    version: str
    seed: int
    created_at: str
    updated_at: str
    runs: dict[str, str] = Field(default_factory=dict)
    checksums: dict[str, str] = Field(default_factory=dict)

    @classmethod
    def load(cls, path: Path) -> Optional["RunManifest"]:
        if not path.exists():
            return None
        return cls.model_validate_json(path.read_text(encoding="utf-8"))

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    def record(self, record: RunRecord) -> None:
        self.runs[key_string(record.key)] = record.status.value


@dataclass
class IngestFailure:
    matrix_id: str
    reason: str


@dataclass
class IngestedMatrix:
    matrix_id: str
    unscaled: SparseMatrix
    scaled: ScaledSystem
    checksum: Optional[str] = None


@dataclass
class OrderedProblem:
    """One matrix in one ordering, with everything the solves share."""

    matrix_id: str
    ordering_label: str
    scaled: ScaledSystem
    unscaled: SparseMatrix
    problem: SeededProblem
    direct_work: int
    pcg_config: PcgConfig
    optimal_omega: Optional[float] = None
    lu_source: Optional[LuFactorSource] = None


@dataclass
class BenchmarkResult:
    manifest: RunManifest
    records: list[RunRecord] = field(default_factory=list)
    solves: int = 0
    skipped: int = 0

    def status_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for record in self.records:
            counts[record.status.value] = counts.get(record.status.value, 0) + 1
        return counts


def handle_ingest_errors(func: Callable[..., T]) -> Callable[..., Union[T, IngestFailure]]:
    """Turn I/O, format and scaling errors of one matrix into an ``IngestFailure``."""

    @wraps(func)
    def wrapper(source: MatrixSource, *args: Any, **kwargs: Any) -> Union[T, IngestFailure]:
        try:
            return func(source, *args, **kwargs)
        except (OSError, PrecondBenchError, ValueError) as e:
            logger.warning(f"Ingest of {source.id} failed: {type(e).__name__}: {e}")
            return IngestFailure(matrix_id=source.id, reason=f"{type(e).__name__}: {e}")

    return wrapper


@handle_ingest_errors
def ingest_matrix(source: MatrixSource, settings: Settings) -> IngestedMatrix:
    checksum = None
    if source.generator is not None:
        A = generate_test_matrix(**source.generator.model_dump())
    elif source.url is not None:
        fetched = fetch_matrix(
            source.id,
            source.url,
            settings.cache,
            sha256=source.sha256,
            offline=settings.offline,
            timeout=settings.http_timeout_seconds,
        )
        checksum = fetched.sha256
        A = read_matrix_market(fetched.path)
    else:
        assert source.path is not None
        A = read_matrix_market(source.path)
    if A.n < 2:
        raise ValueError(f"{source.id}: order {A.n} is too small to benchmark")
    scaled = scale_and_symmetrize(A)
    logger.info(f"Ingested {source.id}: n={A.n}, nnz={A.nnz}")
    return IngestedMatrix(source.id, A, scaled, checksum)


def _permutation(ordering: OrderingSpec, A: SparseMatrix) -> Permutation:
    if ordering.kind == "natural":
        return Permutation.identity(A.n)
    if ordering.kind == "rcm":
        return rcm_order(A)
    assert ordering.path is not None
    return load_permutation(ordering.path, A.n, label=ordering.resolved_label)


@handle_ingest_errors
def prepare_ordering(
    source: MatrixSource,
    ingested: IngestedMatrix,
    ordering: OrderingSpec,
    config: BenchmarkConfig,
    needs_optimal_omega: bool,
) -> OrderedProblem:
    label = ordering.resolved_label
    perm = _permutation(ordering, ingested.scaled.matrix)
    A = permute_symmetric(ingested.scaled.matrix, perm)
    scaled = ScaledSystem(
        matrix=A,
        scale=ingested.scaled.scale[perm.perm],
        original_diag=ingested.scaled.original_diag[perm.perm],
    )
    unscaled = permute_symmetric(ingested.unscaled, perm)
    logger.info(f"{source.id} [{label}]: bandwidth={bandwidth(A)}")

    pcg_config = config.solver.to_pcg_config()
    if pcg_config.track_nrbe:
        pcg_config = dataclasses.replace(pcg_config, two_norm_estimate=estimate_two_norm(A))

    optimal = None
    if needs_optimal_omega:
        _, optimal = resolve_specs([PrecondSpec("ssor_opt")], A)

    lu_source = None
    if source.lu_factors is not None and source.lu_factors.ordering == label:
        lu_source = source.lu_factors

    return OrderedProblem(
        matrix_id=source.id,
        ordering_label=label,
        scaled=scaled,
        unscaled=unscaled,
        problem=generate_problem(A, seed=config.seed),
        direct_work=direct_cost_baseline(A),
        pcg_config=pcg_config,
        optimal_omega=optimal,
        lu_source=lu_source,
    )


def _trace_path(root: Path, prepared: OrderedProblem, label: str) -> Path:
    matrix_dir, ordering_dir, name = (_UNSAFE.sub("_", s) for s in (prepared.matrix_id, prepared.ordering_label, label))
    return root / "traces" / matrix_dir / ordering_dir / f"{name}.jsonl"


def control_work_of(trace: SolveTrace) -> int:
    """Work to tolerance, or the work spent before giving up."""
    if trace.work_to_tol is not None:
        return trace.work_to_tol
    return trace.records[-1].cumulative_work


# Per-configuration failures that become record statuses instead of ending the sweep.
RUN_ERRORS = (PrecondBenchError, ArithmeticError, ValueError, np.linalg.LinAlgError)
BUILD_ERRORS = (OSError, *RUN_ERRORS)


def solve_one(
    spec: PrecondSpec,
    prepared: OrderedProblem,
    config: BenchmarkConfig,
    control_work: Optional[int],
    trace_dir: Optional[Path] = None,
    events: Optional[StructuredLogger] = None,
) -> RunRecord:
    """
    Build and solve one configuration.

    Build errors become ``generation_failure`` and numerical errors during
    the solve become ``breakdown``; neither escapes to the sweep.
    """
    events = events or StructuredLogger(__name__)
    A = prepared.scaled.matrix
    base: dict[str, Any] = {
        "matrix_id": prepared.matrix_id,
        "ordering_label": prepared.ordering_label,
        "precond_label": spec.label,
        "precond_class": spec.precond_class,
        "seed": config.seed,
        "tol": config.solver.rel_res_tol,
        "n": A.n,
        "nnz": A.nnz,
        "direct_work": prepared.direct_work,
        "control_work": control_work,
    }
    context = {"matrix_id": prepared.matrix_id, "ordering": prepared.ordering_label, "precond": spec.label}
    try:
        lu_factors = None
        if spec.kind == "lu" and prepared.lu_source is not None:
            lu_factors = load_lu_factors(prepared.lu_source.l_path, prepared.lu_source.diag_path)
        op = build_preconditioner(
            spec,
            prepared.scaled,
            A_unscaled=prepared.unscaled,
            optimal_omega_value=prepared.optimal_omega,
            lu_factors=lu_factors,
        )
    except BUILD_ERRORS as e:
        reason = str(e) if isinstance(e, GenerationFailure) else f"{type(e).__name__}: {e}"
        events.warning("Preconditioner generation failed", reason=reason, **context)
        return RunRecord(**base, status=RunStatus.GENERATION_FAILURE, failure_reason=reason)

    summary = describe(op)
    events.debug("Preconditioner built", **context, **summary)
    costs = {key: summary[key] for key in ("generation_cost", "apply_cost", "fill_ratio", "factor_nnz")}
    cfg = prepared.pcg_config
    try:
        if summary["augmented_solve"]:
            assert isinstance(op, LaplacianPipeline)
            augmented_cfg = dataclasses.replace(cfg, max_iters=cfg.iteration_cap(A.n), two_norm_estimate=None)
            _, trace = op.solve(prepared.problem.b, augmented_cfg)
        else:
            trace = pcg(A, prepared.problem.b, op, cfg, x_star=prepared.problem.x_star)
    except RUN_ERRORS as e:
        reason = str(e) if isinstance(e, NonFiniteError) else f"{type(e).__name__}: {e}"
        events.warning("Solve broke down", reason=reason, **context)
        return RunRecord(**base, **costs, status=RunStatus.BREAKDOWN, failure_reason=reason)

    if trace_dir is not None:
        trace.write_jsonl(_trace_path(trace_dir, prepared, spec.label))
    if spec.kind == "control":
        base["control_work"] = control_work_of(trace)
    return RunRecord(
        **base,
        **costs,
        status=RunStatus(trace.status.value),
        iters=trace.iterations,
        work_to_tol=trace.work_to_tol,
        final_rel_residual=trace.final_rel_residual,
    )


def _ingest_failure_record(matrix_id: str, ordering_label: str, reason: str, config: BenchmarkConfig) -> RunRecord:
    return RunRecord(
        matrix_id=matrix_id,
        ordering_label=ordering_label,
        precond_label=INGEST_LABEL,
        precond_class=INGEST_LABEL,
        status=RunStatus.INGEST_FAILURE,
        failure_reason=reason,
        seed=config.seed,
        tol=config.solver.rel_res_tol,
    )


class BenchmarkRunner:
    """Runs a sweep, appending records through a single writer."""

    def __init__(self, config: BenchmarkConfig, resume: bool = False, jobs: Optional[int] = None, settings: Optional[Settings] = None):
        self.config = config
        self.resume = resume
        self.jobs = jobs or config.jobs
        self.settings = settings or get_settings()
        self.output_dir = Path(config.output_dir)
        self.records_path = self.output_dir / RECORDS_FILENAME
        self.manifest_path = self.output_dir / MANIFEST_FILENAME
        self.base_specs = config.precond_grid.specs()
        self.done: dict[RunKey, RunRecord] = {}
        self.events = StructuredLogger(__name__, enable_json=self.settings.log_json)
        self.result = BenchmarkResult(manifest=self._open_manifest())
        for record in self.done.values():
            self.result.manifest.record(record)

    def _open_manifest(self) -> RunManifest:
        now = datetime.now(timezone.utc).isoformat()
        config_hash = self.config.config_hash()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if self.resume and self.records_path.exists():
            kept = list(iter_records(self.records_path))
            # rewrite without a line truncated by an interrupted run
            self.records_path.write_text("", encoding="utf-8")
            append_records(self.records_path, kept)
            for record in kept:
                self.done[record.key] = record
            logger.info(f"Resuming: {len(self.done)} completed run keys")
            existing = RunManifest.load(self.manifest_path)
            if existing is not None:
                if existing.config_hash != config_hash:
                    logger.warning("Configuration changed since the previous run; keys that still match are kept")
                return existing.model_copy(update={"config_hash": config_hash, "updated_at": now})
        else:
            self.records_path.write_text("", encoding="utf-8")
        return RunManifest(
            config_hash=config_hash,
            version=__version__,
            seed=self.config.seed,
            created_at=now,
            updated_at=now,
        )

    def _key(self, matrix_id: str, ordering_label: str, label: str) -> RunKey:
        return (matrix_id, ordering_label, label, self.config.seed, self.config.solver.rel_res_tol)

    def _write(self, records: Iterable[RunRecord]) -> None:
        for record in records:
            append_records(self.records_path, [record])
            self.done[record.key] = record
            self.result.records.append(record)
            self.result.manifest.record(record)

    def _map(self, func: Callable[[PrecondSpec], RunRecord], specs: list[PrecondSpec]) -> Iterable[RunRecord]:
        if self.jobs <= 1 or len(specs) <= 1:
            return map(func, specs)
        executor = ThreadPoolExecutor(max_workers=self.jobs, thread_name_prefix="precond-bench")
        try:
            return list(executor.map(func, specs))
        finally:
            executor.shutdown(wait=True)

    def _record_failure(self, matrix_id: str, ordering_label: str, reason: str) -> None:
        key = self._key(matrix_id, ordering_label, INGEST_LABEL)
        if key not in self.done:
            self.events.warning("Recording ingest failure", matrix_id=matrix_id, ordering=ordering_label)
            self._write([_ingest_failure_record(matrix_id, ordering_label, reason, self.config)])

    def run_matrix(self, source: MatrixSource) -> None:
        ingested = ingest_matrix(source, self.settings)
        if isinstance(ingested, IngestFailure):
            self._record_failure(source.id, NO_ORDERING, ingested.reason)
            return
        if ingested.checksum is not None:
            self.result.manifest.checksums[source.id] = ingested.checksum

        needs_optimal = any(spec.kind == "ssor_opt" for spec in self.base_specs)
        for ordering in self.config.orderings:
            prepared = prepare_ordering(source, ingested, ordering, self.config, needs_optimal)
            if isinstance(prepared, IngestFailure):
                self._record_failure(source.id, ordering.resolved_label, prepared.reason)
                continue
            self.run_ordering(prepared)
        self.result.manifest.save(self.manifest_path)

    def run_ordering(self, prepared: OrderedProblem) -> None:
        trace_dir = self.output_dir if self.config.write_traces else None

        control_key = self._key(prepared.matrix_id, prepared.ordering_label, CONTROL_SPEC.label)
        if control_key in self.done:
            control_work = self.done[control_key].control_work
            self.result.skipped += 1
        else:
            control = solve_one(CONTROL_SPEC, prepared, self.config, None, trace_dir, self.events)
            self.result.solves += 1
            self._write([control])
            control_work = control.control_work

        specs = [
            spec
            for spec in self.base_specs
            if spec.kind != "ssor_opt" or prepared.optimal_omega is not None
        ]
        if prepared.lu_source is not None:
            specs.append(PrecondSpec("lu", lu_label=prepared.lu_source.label))

        pending = []
        for spec in specs:
            if self._key(prepared.matrix_id, prepared.ordering_label, spec.label) in self.done:
                self.result.skipped += 1
            else:
                pending.append(spec)
        if not pending:
            return

        def run(spec: PrecondSpec) -> RunRecord:
            return solve_one(spec, prepared, self.config, control_work, trace_dir, self.events)

        for record in self._map(run, pending):
            self.result.solves += 1
            self._write([record])
        logger.info(f"{prepared.matrix_id} [{prepared.ordering_label}]: {len(pending)} configurations solved")

    @log_benchmark_operation("sweep")
    def run(self) -> BenchmarkResult:
        for source in self.config.matrices:
            self.run_matrix(source)
        self.result.manifest.updated_at = datetime.now(timezone.utc).isoformat()
        self.result.manifest.save(self.manifest_path)
        self.events.info(
            "Sweep finished",
            solves=self.result.solves,
            skipped=self.result.skipped,
            status_counts=self.result.status_counts(),
        )
        return self.result


def run_benchmark(
    config: BenchmarkConfig,
    resume: bool = False,
    jobs: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> BenchmarkResult:
    """
    Run the sweep described by ``config``.

    With ``resume``, run keys already present in the output directory are
    skipped; otherwise the records file is started afresh.
    """
    return BenchmarkRunner(config, resume=resume, jobs=jobs, settings=settings).run()


__all__ = [
    "BenchmarkRunner",
    "BenchmarkResult",
    "RunManifest",
    "run_benchmark",
    "solve_one",
    "ingest_matrix",
    "handle_ingest_errors",
    "key_string",
]
