"""
Truncated Neumann series.

``M^{-1} r = alpha * sum_{k=0}^{m} (I - alpha A)^k r`` evaluated by a Horner
recurrence with ``m`` products, so one application costs ``m * nnz(A)``.
"""

from dataclasses import dataclass

from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.sparse.kernels import estimate_two_norm, norms
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import Vector

ALPHA_LABELS = ("fro", "inf", "one", "two", "unit")
CONVENTIONS = ("neumann", "remainder")


@dataclass
class TnsConfig:
    """Series length, damping and evaluation convention."""
    terms: int = 1
    alpha: float = 1.0
    alpha_label: str = "unit"
    convention: str = "neumann"

    def __post_init__(self):
        if self.terms < 1:
            raise ValueError("TNS terms must be at least 1")
        if not self.alpha > 0:
            raise ValueError("TNS alpha must be positive")
        if self.alpha_label not in ALPHA_LABELS:
            raise ValueError(f"alpha_label must be one of {ALPHA_LABELS}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")


def tns_alpha(A: SparseMatrix, alpha_label: str, seed: int = 0) -> float:
    """Damping factor for one of the named norm choices."""
    if alpha_label == "unit":
        return 1.0
    if alpha_label == "two":
        return 2.0 / estimate_two_norm(A, seed=seed)
    matrix_norms = norms(A)
    value = {"fro": matrix_norms.fro, "inf": matrix_norms.inf, "one": matrix_norms.one}.get(alpha_label)
    if value is None:
        raise ValueError(f"Unknown alpha label '{alpha_label}'")
    return 1.0 / value


class TruncatedNeumannSeries(PreconditionerOperator):
    precond_class = "tns"

    def __init__(self, A: SparseMatrix, cfg: TnsConfig):
        label = f"tns(m={cfg.terms},alpha={cfg.alpha_label})"
        if cfg.convention == "remainder":
            label = f"tns-remainder(m={cfg.terms},alpha={cfg.alpha_label})"
        super().__init__(A.n, label, apply_cost=cfg.terms * A.nnz, generation_cost=0)
        self.cfg = cfg
        self._A = A.csr

    @property
    def equivalent_to_control(self) -> bool:
        """
        One term with unit damping: ``2I - A`` (neumann) or ``A`` (remainder).
        Both are first-degree polynomials in ``A`` and bring no reduction in work.
        """
        return self.cfg.terms == 1 and self.cfg.alpha == 1.0

    def _apply(self, r: Vector) -> Vector:
        alpha = self.cfg.alpha
        z = r.copy()
        if self.cfg.convention == "neumann":
            for _ in range(self.cfg.terms):
                z = r + z - alpha * (self._A @ z)
        else:
            # sum_k (alpha A - I)^k r
            for _ in range(self.cfg.terms):
                z = r - z + alpha * (self._A @ z)
        return alpha * z


def build_tns(A: SparseMatrix, cfg: TnsConfig) -> TruncatedNeumannSeries:
    return TruncatedNeumannSeries(A, cfg)


__all__ = ["TnsConfig", "TruncatedNeumannSeries", "build_tns", "tns_alpha", "ALPHA_LABELS"]
