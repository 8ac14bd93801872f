"""Shared fixtures: seeded matrix factories and run-record builders."""

from typing import Callable, Optional

import numpy as np
import pytest
import scipy.sparse as sp

from precond_bench.analysis.records import RunRecord
from precond_bench.harness.generators import poisson2d
from precond_bench.sparse.matrix import ScaledSystem, SparseMatrix, scale_and_symmetrize
from precond_bench.types import RunStatus


@pytest.fixture
def random_spd() -> Callable[..., SparseMatrix]:
    """``random_spd(n, seed, density)``: sparse symmetric pattern plus a dominant diagonal shift."""

    def make(n: int, seed: int = 0, density: float = 0.2) -> SparseMatrix:
        rng = np.random.default_rng(seed)
        R = sp.random(n, n, density=density, random_state=rng, data_rvs=lambda size: rng.uniform(-1.0, 1.0, size))
        S = (R + R.T).tocsr()
        shift = np.asarray(abs(S).sum(axis=1)).ravel() + 1.0
        return SparseMatrix.from_scipy(S + sp.diags(shift), symmetric=True)

    return make


@pytest.fixture
def dense_spd() -> Callable[..., np.ndarray]:
    """``dense_spd(n, seed)``: well-conditioned dense SPD array ``B B^T + n I``."""

    def make(n: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        B = rng.standard_normal((n, n))
        return B @ B.T + n * np.eye(n)

    return make


@pytest.fixture
def poisson_scaled() -> Callable[[int], ScaledSystem]:
    def make(k: int) -> ScaledSystem:
        return scale_and_symmetrize(poisson2d(k))

    return make


@pytest.fixture
def make_record() -> Callable[..., RunRecord]:
    """Build a ``RunRecord`` with a control baseline of 1000 unless told otherwise."""

    def make(
        matrix_id: str,
        precond_label: str = "ic(0)",
        work: Optional[int] = 500,
        status: RunStatus = RunStatus.CONVERGED,
        control_work: Optional[int] = 1000,
        direct_work: Optional[int] = None,
        generation_cost: Optional[int] = 0,
        precond_class: Optional[str] = None,
        ordering_label: str = "natural",
    ) -> RunRecord:
        solved = status not in (RunStatus.GENERATION_FAILURE, RunStatus.INGEST_FAILURE)
        return RunRecord(
            matrix_id=matrix_id,
            ordering_label=ordering_label,
            precond_label=precond_label,
            precond_class=precond_class or precond_label.split("(")[0],
            status=status,
            iters=10 if solved else None,
            work_to_tol=work if status is RunStatus.CONVERGED else None,
            generation_cost=generation_cost,
            control_work=control_work,
            direct_work=direct_work,
            seed=1,
            tol=1e-10,
        )

    return make
