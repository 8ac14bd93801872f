"""
Instrumented preconditioned conjugate gradient (Hestenes-Stiefel recurrence).

Work is counted per iteration as ``5n`` (two inner products and three vector
updates) plus ``nnz`` (one product with ``A``) plus one preconditioner
application, and one extra application to start. The true residual is
recomputed each iteration for the convergence test and is not counted.
"""

import logging
from dataclasses import dataclass
from datetime import datetime
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np

from precond_bench.analysis.costs import total_work
from precond_bench.errors import DimensionMismatchError
from precond_bench.logger import PerformanceLogger
from precond_bench.solver.trace import IterationRecord, SolveTrace
from precond_bench.sparse.kernels import estimate_two_norm
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import SolveStatus, Vector

if TYPE_CHECKING:
    from precond_bench.preconditioners.base import PreconditionerOperator

logger = logging.getLogger(__name__)

Projector = Callable[[Vector], Vector]


@dataclass
class PcgConfig:
    """Stopping and recording settings; ``max_iters=None`` means ``10 * n``."""
    rel_res_tol: float = 1e-10
    max_iters: Optional[int] = None
    record_every: int = 1
    track_nrbe: bool = True
    two_norm_estimate: Optional[float] = None

    def __post_init__(self):
        if not self.rel_res_tol > 0:
            raise ValueError("rel_res_tol must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

    def iteration_cap(self, n: int) -> int:
        return self.max_iters if self.max_iters is not None else 10 * n


def pcg(
    A: SparseMatrix,
    b: Vector,
    M: "PreconditionerOperator",
    cfg: Optional[PcgConfig] = None,
    x_star: Optional[Vector] = None,
    projector: Optional[Projector] = None,
    project_every: int = 50,
) -> SolveTrace:
    """
    Solve ``A x = b`` from ``x0 = 0``.

    Nonpositive curvature (``p^T A p <= 0``) or a nonpositive ``r^T z`` ends
    the run with status ``breakdown``. ``projector``, when given, is applied
    to the iterate and the residual every ``project_every`` iterations (used
    for consistent singular systems).
    """
    cfg = cfg or PcgConfig()
    n = A.n
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise DimensionMismatchError(n, b.shape[0], what="right-hand side")
    if M.n != n:
        raise DimensionMismatchError(n, M.n, what="preconditioner")

    start_time = datetime.now()
    csr = A.csr
    nnz = A.nnz
    apply_cost = M.apply_cost
    trace = SolveTrace(n=n, nnz=nnz, apply_cost=apply_cost)

    two_norm = cfg.two_norm_estimate
    if cfg.track_nrbe and two_norm is None:
        two_norm = estimate_two_norm(A)
    b_norm = float(np.linalg.norm(b))

    def nrbe(residual_norm: float, x_norm: float) -> float:
        if not cfg.track_nrbe:
            return float("nan")
        denom = two_norm * x_norm + b_norm
        return residual_norm / denom if denom > 0 else 0.0

    def a_norm_error(x: Vector) -> float:
        e = x - x_star
        return float(np.sqrt(max(e @ (csr @ e), 0.0)))

    x = np.zeros(n)
    if b_norm == 0.0:
        trace.status = SolveStatus.CONVERGED
        trace.iters_to_tol = 0
        trace.work_to_tol = 0
        trace.final_rel_residual = 0.0
        trace.records.append(IterationRecord(0, 0.0, 0.0, 0.0, 0))
        trace.solution = x
        return trace

    r = b.copy()
    z = M.apply(r)
    rz = float(r @ z)
    p = z.copy()
    work = total_work(n, nnz, apply_cost, 0)
    trace.records.append(IterationRecord(0, 1.0, 1.0, nrbe(b_norm, 0.0), work))
    if x_star is not None:
        trace.a_norm_errors.append(a_norm_error(x))

    cap = cfg.iteration_cap(n)
    status = SolveStatus.MAX_ITERS
    rel_true = 1.0
    k = 0

    if not (rz > 0 and np.isfinite(rz)):
        status = SolveStatus.BREAKDOWN
        cap = 0

    while k < cap:
        q = csr @ p
        pq = float(p @ q)
        if not (pq > 0 and np.isfinite(pq)):
            status = SolveStatus.BREAKDOWN
            break

        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        k += 1
        work = total_work(n, nnz, apply_cost, k)

        if projector is not None and k % project_every == 0:
            x = projector(x)
            r = projector(r)

        true_residual = b - csr @ x
        true_norm = float(np.linalg.norm(true_residual))
        rel_true = true_norm / b_norm
        rel_recursive = float(np.linalg.norm(r)) / b_norm
        converged = rel_true <= cfg.rel_res_tol

        trace.alphas.append(alpha)
        if x_star is not None:
            trace.a_norm_errors.append(a_norm_error(x))
        if converged or k % cfg.record_every == 0 or k == cap:
            trace.records.append(
                IterationRecord(k, rel_true, rel_recursive, nrbe(true_norm, float(np.linalg.norm(x))), work)
            )
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"{M.config_label} iter={k} relres={rel_true:.3e} work={work}")

        if converged:
            status = SolveStatus.CONVERGED
            trace.iters_to_tol = k
            trace.work_to_tol = work
            break

        z = M.apply(r)
        rz_new = float(r @ z)
        if not (rz_new > 0 and np.isfinite(rz_new)):
            status = SolveStatus.BREAKDOWN
            break
        beta = rz_new / rz
        trace.betas.append(beta)
        p = z + beta * p
        rz = rz_new

    if trace.records[-1].iter != k:
        true_norm = float(np.linalg.norm(b - csr @ x))
        trace.records.append(
            IterationRecord(
                k,
                true_norm / b_norm,
                float(np.linalg.norm(r)) / b_norm,
                nrbe(true_norm, float(np.linalg.norm(x))),
                total_work(n, nnz, apply_cost, k),
            )
        )

    trace.status = status
    trace.iterations = k
    trace.final_rel_residual = trace.records[-1].rel_residual
    trace.solution = x
    if x_star is not None:
        x_star_norm = float(np.linalg.norm(x_star))
        error = float(np.linalg.norm(x - x_star))
        trace.final_error_vs_xstar = error / x_star_norm if x_star_norm > 0 else error

    duration_ms = (datetime.now() - start_time).total_seconds() * 1000
    PerformanceLogger().log_solve_performance(
        label=M.config_label,
        duration_ms=duration_ms,
        iterations=k,
        work=trace.work_to_tol,
        status=status.value,
    )
    return trace


__all__ = ["PcgConfig", "pcg"]
