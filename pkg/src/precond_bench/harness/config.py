"""Benchmark configuration loaded from a JSON file."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from precond_bench.errors import ConfigError
from precond_bench.preconditioners.ic import DEFAULT_DROPTOLS
from precond_bench.preconditioners.laplacian import DEFAULT_INNER_DROPTOL
from precond_bench.preconditioners.registry import (
    DEFAULT_OMEGAS,
    DEFAULT_SWEEPS,
    DEFAULT_TNS_TERMS,
    PrecondSpec,
    expand_grid,
)
from precond_bench.preconditioners.sspai import DEFAULT_FILL_MULTIPLIERS
from precond_bench.preconditioners.tns import ALPHA_LABELS
from precond_bench.settings import DEFAULT_SEED
from precond_bench.solver.pcg import PcgConfig

logger = logging.getLogger(__name__)


class GeneratorSpec(BaseModel):
    """Deterministic test matrix: ``poisson2d(k)``, ``tridiag(n)`` or ``random_sdd(n, density, seed)``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["poisson2d", "tridiag", "random_sdd"]
    k: Optional[int] = Field(None, ge=1, description="Grid side for poisson2d")
    n: Optional[int] = Field(None, ge=1, description="Order for tridiag and random_sdd")
    density: float = Field(0.05, gt=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_size(self) -> "GeneratorSpec":
        if self.kind == "poisson2d" and self.k is None:
            raise ValueError("poisson2d needs k")
        if self.kind != "poisson2d" and self.n is None:
            raise ValueError(f"{self.kind} needs n")
        return self


class LuFactorSource(BaseModel):
    """Externally computed ILU factors for one matrix, valid in one ordering."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    l_path: Path
    diag_path: Path
    ordering: str = "natural"
    label: str = "external"


class MatrixSource(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(..., min_length=1)
    path: Optional[Path] = None
    url: Optional[str] = None
    generator: Optional[GeneratorSpec] = None
    sha256: Optional[str] = Field(None, description="Expected checksum of the Matrix Market file")
    lu_factors: Optional[LuFactorSource] = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "MatrixSource":
        given = [name for name in ("path", "url", "generator") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"Matrix '{self.id}' needs exactly one of path, url, generator (got {given or 'none'})")
        return self


class OrderingSpec(BaseModel):
    """``natural``, ``rcm`` or ``file:<path>``; a bare string in JSON is accepted."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["natural", "rcm", "file"]
    path: Optional[Path] = None
    label: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def _from_string(cls, data: Any) -> Any:
        if isinstance(data, str):
            if data.startswith("file:"):
                return {"kind": "file", "path": data[len("file:") :]}
            return {"kind": data}
        return data

    @model_validator(mode="after")
    def _check_path(self) -> "OrderingSpec":
        if (self.kind == "file") != (self.path is not None):
            raise ValueError("A path is required for, and only for, file orderings")
        return self

    @property
    def resolved_label(self) -> str:
        if self.label:
            return self.label
        if self.kind == "file":
            assert self.path is not None
            return f"file:{self.path.stem}"
        return self.kind


class PrecondGrid(BaseModel):
    """Per-class parameter lists; an empty list disables the class. The control run is always included."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tns_terms: list[int] = Field(default_factory=lambda: list(DEFAULT_TNS_TERMS))
    tns_alphas: list[Literal["fro", "inf", "one", "two", "unit"]] = Field(default_factory=lambda: list(ALPHA_LABELS))
    tns_conventions: list[Literal["neumann", "remainder"]] = Field(default_factory=lambda: ["neumann"])
    sgs_sweeps: list[int] = Field(default_factory=lambda: list(DEFAULT_SWEEPS))
    ssor_omegas: list[float] = Field(default_factory=lambda: list(DEFAULT_OMEGAS))
    ssor_sweeps: list[int] = Field(default_factory=lambda: list(DEFAULT_SWEEPS))
    ssor_optimal: bool = True
    sspai_fill: list[float] = Field(default_factory=lambda: list(DEFAULT_FILL_MULTIPLIERS))
    ic_droptols: list[float] = Field(default_factory=lambda: list(DEFAULT_DROPTOLS))
    ic_modified: list[bool] = Field(default_factory=lambda: [False, True])
    laplacian_droptols: list[float] = Field(default_factory=lambda: [DEFAULT_INNER_DROPTOL])

    @field_validator("tns_terms", "sgs_sweeps", "ssor_sweeps")
    @classmethod
    def _at_least_one(cls, values: list[int]) -> list[int]:
        if any(v < 1 for v in values):
            raise ValueError("term and sweep counts must be at least 1")
        return values

    @field_validator("ssor_omegas")
    @classmethod
    def _omega_range(cls, values: list[float]) -> list[float]:
        if any(not 0.0 < v < 2.0 for v in values):
            raise ValueError("omega must lie in (0, 2)")
        return values

    @field_validator("sspai_fill")
    @classmethod
    def _positive_fill(cls, values: list[float]) -> list[float]:
        if any(not v > 0 for v in values):
            raise ValueError("SSPAI fill multipliers must be positive")
        return values

    @field_validator("ic_droptols", "laplacian_droptols")
    @classmethod
    def _nonnegative_droptol(cls, values: list[float]) -> list[float]:
        if any(v < 0 for v in values):
            raise ValueError("drop tolerances must be nonnegative")
        return values

    @classmethod
    def control_only(cls) -> "PrecondGrid":
        return cls(
            tns_terms=[],
            sgs_sweeps=[],
            ssor_omegas=[],
            ssor_sweeps=[],
            ssor_optimal=False,
            sspai_fill=[],
            ic_droptols=[],
            laplacian_droptols=[],
        )

    def specs(self) -> list[PrecondSpec]:
        """Non-control configurations; SSOR sweeps also need at least one omega or the optimal flag."""
        return expand_grid(
            tns_terms=self.tns_terms,
            tns_alphas=self.tns_alphas,
            tns_conventions=self.tns_conventions,
            sgs_sweeps=self.sgs_sweeps,
            ssor_omegas=self.ssor_omegas,
            ssor_sweeps=self.ssor_sweeps,
            ssor_optimal=self.ssor_optimal,
            sspai_fill=self.sspai_fill,
            ic_droptols=self.ic_droptols,
            ic_modified=self.ic_modified,
            laplacian_droptols=self.laplacian_droptols,
        )


class SolverSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_res_tol: float = Field(1e-10, gt=0.0)
    max_iters: Optional[int] = Field(None, ge=1, description="Defaults to 10 n")
    record_every: int = Field(1, ge=1)
    track_nrbe: bool = True

    def to_pcg_config(self) -> PcgConfig:
        return PcgConfig(
            rel_res_tol=self.rel_res_tol,
            max_iters=self.max_iters,
            record_every=self.record_every,
            track_nrbe=self.track_nrbe,
        )


class BenchmarkConfig(BaseModel):
    """
    A sweep over matrices x orderings x preconditioner configurations.

    Relative matrix, factor and ordering paths are resolved against the
    directory of the configuration file; ``output_dir`` is used as given.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    matrices: list[MatrixSource] = Field(..., min_length=1)
    orderings: list[OrderingSpec] = Field(default_factory=lambda: [OrderingSpec(kind="natural")], min_length=1)
    precond_grid: PrecondGrid = Field(default_factory=PrecondGrid)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    output_dir: Path = Path("bench-out")
    jobs: int = Field(1, ge=1, description="Concurrent solves")
    seed: int = DEFAULT_SEED
    write_traces: bool = False

    @model_validator(mode="after")
    def _unique_labels(self) -> "BenchmarkConfig":
        ids = [m.id for m in self.matrices]
        if len(set(ids)) != len(ids):
            raise ValueError("Matrix ids must be unique")
        labels = [o.resolved_label for o in self.orderings]
        if len(set(labels)) != len(labels):
            raise ValueError("Ordering labels must be unique")
        return self

    @classmethod
    def from_json_file(cls, path: Union[str, Path]) -> "BenchmarkConfig":
        """
        Load and validate a configuration file.

        Raises:
            ConfigError: unreadable file, malformed JSON or invalid values
        """
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            config = cls.model_validate(raw)
        except (OSError, json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"Invalid benchmark configuration {path}: {e}") from e
        config = config.resolve_paths(path.parent)
        logger.info(
            f"Loaded config {path}: {len(config.matrices)} matrices, {len(config.orderings)} orderings"
        )
        return config

    def resolve_paths(self, base: Path) -> "BenchmarkConfig":
        def resolve(p: Optional[Path]) -> Optional[Path]:
            return p if p is None or p.is_absolute() else base / p

        matrices = []
        for m in self.matrices:
            lu = m.lu_factors
            if lu is not None:
                lu = lu.model_copy(update={"l_path": resolve(lu.l_path), "diag_path": resolve(lu.diag_path)})
            matrices.append(m.model_copy(update={"path": resolve(m.path), "lu_factors": lu}))
        orderings = [o.model_copy(update={"path": resolve(o.path)}) for o in self.orderings]
        return self.model_copy(update={"matrices": matrices, "orderings": orderings})

    def with_overrides(
        self,
        seed: Optional[int] = None,
        orderings: Sequence[str] = (),
        ordering_labels: Sequence[str] = (),
        base: Optional[Path] = None,
    ) -> "BenchmarkConfig":
        """
        Replace the seed and the ordering list from the command line.

        Labels pair with ``orderings`` by position. Relative ``file:`` paths
        resolve against ``base`` (the working directory by default).

        Raises:
            ConfigError: malformed ordering, label count mismatch or duplicate labels
        """
        if ordering_labels and len(ordering_labels) != len(orderings):
            raise ConfigError(
                f"{len(ordering_labels)} ordering labels given for {len(orderings)} orderings"
            )
        base = base or Path.cwd()
        update: dict[str, Any] = dict(self)
        if seed is not None:
            update["seed"] = seed
        try:
            if orderings:
                labels = list(ordering_labels) or [None] * len(orderings)
                specs = []
                for value, label in zip(orderings, labels):
                    spec = OrderingSpec.model_validate(value)
                    path = spec.path if spec.path is None or spec.path.is_absolute() else base / spec.path
                    specs.append(OrderingSpec(kind=spec.kind, path=path, label=label or None))
                update["orderings"] = specs
            return BenchmarkConfig.model_validate(update)
        except ValidationError as e:
            raise ConfigError(f"Invalid command-line override: {e}") from e

    def config_hash(self) -> str:
        """SHA-256 of everything that affects results (not output location or parallelism)."""
        payload = self.model_dump(mode="json", exclude={"output_dir", "jobs"})
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


__all__ = [
    "BenchmarkConfig",
    "MatrixSource",
    "GeneratorSpec",
    "LuFactorSource",
    "OrderingSpec",
    "PrecondGrid",
    "SolverSettings",
]
