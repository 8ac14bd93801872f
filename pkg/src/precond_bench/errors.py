"""
Exception hierarchy for precond-bench.

Numerical outcomes that a sweep has to survive (generation failures, fetch and
ingest failures) are exceptions here but become recorded statuses in the harness.
"""

from typing import Optional


class PrecondBenchError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatchError(PrecondBenchError, ValueError):
    """Operand shapes do not agree."""

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}")


class NotSpdCandidateError(PrecondBenchError, ValueError):
    """Matrix cannot be an SPD candidate (missing or nonpositive diagonal)."""


class SingularFactorError(PrecondBenchError, ValueError):
    """Triangular factor has a zero on its diagonal."""


class NonFiniteError(PrecondBenchError, ArithmeticError):
    """A kernel produced NaN or Inf."""


class MatrixMarketFormatError(PrecondBenchError, ValueError):
    """Matrix Market file is malformed or of an unsupported kind."""


class PermutationError(PrecondBenchError, ValueError):
    """Permutation vector is not a bijection on 0..n-1."""


class NotSddError(PrecondBenchError, ValueError):
    """Matrix is not symmetric diagonally dominant and lifting was not requested."""


class UndefinedOmegaError(PrecondBenchError, ValueError):
    """Optimal relaxation parameter is undefined for a Jacobi norm above one."""


class GenerationFailure(PrecondBenchError):
    """Preconditioner construction broke down."""

    def __init__(self, column: Optional[int], value: Optional[float], reason: str = "nonpositive pivot"):
        self.column = column
        self.value = value
        self.reason = reason
        location = f" at column {column}" if column is not None else ""
        shown = f" (value={value!r})" if value is not None else ""
        super().__init__(f"Generation failed{location}: {reason}{shown}")


class LuAdapterFailure(GenerationFailure):
    """External LU factors cannot be symmetrized (nonpositive U diagonal)."""


class MissingBaselineError(PrecondBenchError, LookupError):
    """A record has no baseline work for the requested report mode."""


class EmptyRecordSetError(PrecondBenchError, ValueError):
    """Statistics were requested over zero records."""


class ConfigError(PrecondBenchError, ValueError):
    """Benchmark configuration is invalid or unreadable."""


class FetchError(PrecondBenchError):
    """A matrix could not be downloaded or located in the cache."""


class ChecksumMismatchError(FetchError):
    """Downloaded payload does not match its declared sha256."""

    def __init__(self, matrix_id: str, expected: str, actual: str):
        self.matrix_id = matrix_id
        self.expected = expected
        self.actual = actual
        super().__init__(f"Checksum mismatch for {matrix_id}: expected {expected}, got {actual}")


__all__ = [
    "PrecondBenchError",
    "DimensionMismatchError",
    "NotSpdCandidateError",
    "SingularFactorError",
    "NonFiniteError",
    "MatrixMarketFormatError",
    "PermutationError",
    "NotSddError",
    "UndefinedOmegaError",
    "GenerationFailure",
    "LuAdapterFailure",
    "MissingBaselineError",
    "EmptyRecordSetError",
    "ConfigError",
    "FetchError",
    "ChecksumMismatchError",
]
