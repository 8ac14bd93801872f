"""Tests for the instrumented PCG solver and its trace."""

import json

import numpy as np
import pytest

from precond_bench.analysis.costs import total_work
from precond_bench.errors import DimensionMismatchError
from precond_bench.harness.generators import poisson2d
from precond_bench.orderings import permute_symmetric, rcm_order
from precond_bench.preconditioners.ic import build_ic
from precond_bench.preconditioners.jacobi import build_jacobi_control
from precond_bench.preconditioners.ssor import SsorConfig, build_ssor
from precond_bench.problem.rhs import generate_problem
from precond_bench.solver.pcg import PcgConfig, pcg
from precond_bench.sparse.matrix import SparseMatrix, scale_and_symmetrize
from precond_bench.types import SolveStatus


def textbook_cg(A: SparseMatrix, b: np.ndarray, tol: float, cap: int) -> tuple[int, list[float], list[float]]:
    """Unpreconditioned CG from x0 = 0, stopping on the recomputed residual."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = r @ r
    b_norm = np.linalg.norm(b)
    alphas, betas = [], []
    for k in range(1, cap + 1):
        q = A.csr @ p
        alpha = rr / (p @ q)
        x += alpha * p
        r -= alpha * q
        alphas.append(alpha)
        if np.linalg.norm(b - A.csr @ x) / b_norm <= tol:
            return k, alphas, betas
        rr_new = r @ r
        betas.append(rr_new / rr)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return cap, alphas, betas


def assert_work_model(trace) -> None:
    for record in trace.records:
        assert record.cumulative_work == total_work(trace.n, trace.nnz, trace.apply_cost, record.iter)


@pytest.mark.unit
class TestPcgBasics:
    def test_identity_converges_in_one_iteration(self):
        b = np.array([1.0, -2.0, 0.5, 4.0])
        trace = pcg(SparseMatrix.identity(4), b, build_jacobi_control(4))
        assert trace.status is SolveStatus.CONVERGED
        assert trace.iters_to_tol == 1
        assert trace.final_rel_residual == 0.0
        np.testing.assert_allclose(trace.solution, b)
        assert trace.work_to_tol == 5 * 4 + 4

    def test_zero_rhs(self):
        trace = pcg(poisson2d(3), np.zeros(9), build_jacobi_control(9))
        assert trace.converged
        assert trace.iters_to_tol == 0
        assert trace.work_to_tol == 0

    def test_breakdown_on_indefinite_matrix(self):
        A = SparseMatrix.from_dense(np.diag([1.0, -1.0]))
        trace = pcg(A, np.array([1.0, 1.0]), build_jacobi_control(2))
        assert trace.status is SolveStatus.BREAKDOWN
        assert trace.work_to_tol is None

    def test_iteration_cap(self):
        A = poisson2d(6)
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n), PcgConfig(max_iters=2))
        assert trace.status is SolveStatus.MAX_ITERS
        assert trace.iterations == 2
        assert trace.records[-1].iter == 2
        assert trace.work_to_tol is None

    def test_default_cap_is_ten_n(self):
        assert PcgConfig().iteration_cap(37) == 370

    @pytest.mark.parametrize("kwargs", [{"rel_res_tol": 0.0}, {"max_iters": 0}, {"record_every": 0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            PcgConfig(**kwargs)

    def test_dimension_checks(self):
        with pytest.raises(DimensionMismatchError):
            pcg(SparseMatrix.identity(3), np.ones(4), build_jacobi_control(3))
        with pytest.raises(DimensionMismatchError):
            pcg(SparseMatrix.identity(3), np.ones(3), build_jacobi_control(4))


@pytest.mark.unit
class TestWorkAccounting:
    def test_formula(self):
        assert total_work(10, 30, 30, 5) == 580
        assert total_work(10, 30, 0, 7) == (50 + 30) * 7

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            total_work(10, 30, -1, 2)

    def test_control_per_iteration(self, poisson_scaled):
        A = poisson_scaled(6).matrix
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n))
        assert trace.work_to_tol == (5 * A.n + A.nnz) * trace.iters_to_tol
        assert_work_model(trace)

    def test_every_record_matches_formula(self, poisson_scaled):
        A = poisson_scaled(8).matrix
        b = generate_problem(A, seed=5).b
        for M in (build_ic(A, droptol=1e-3), build_ssor(A, SsorConfig(sweeps=2))):
            assert_work_model(pcg(A, b, M))
            assert_work_model(pcg(A, b, M, PcgConfig(record_every=3)))

    def test_work_sequence_reproducible(self, poisson_scaled):
        A = poisson_scaled(7).matrix
        b = generate_problem(A).b
        M = build_ic(A)
        assert pcg(A, b, M).cumulative_work == pcg(A, b, M).cumulative_work

    def test_record_every_keeps_first_and_last(self, poisson_scaled):
        A = poisson_scaled(6).matrix
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n), PcgConfig(record_every=4))
        iters = [record.iter for record in trace.records]
        assert iters[0] == 0
        assert iters[-1] == trace.iterations
        assert all(i % 4 == 0 for i in iters[1:-1])


@pytest.mark.unit
class TestConvergenceProperties:
    def test_matches_textbook_cg(self):
        A = poisson2d(32)
        b = generate_problem(A).b
        trace = pcg(A, b, build_jacobi_control(A.n))
        iterations, alphas, betas = textbook_cg(A, b, 1e-10, 10 * A.n)
        assert trace.converged
        assert trace.iters_to_tol == iterations
        np.testing.assert_allclose(trace.alphas, alphas, rtol=1e-14)
        np.testing.assert_allclose(trace.betas, betas, rtol=1e-14)

    def test_converged_residual_below_tolerance(self, poisson_scaled):
        A = poisson_scaled(10).matrix
        trace = pcg(A, generate_problem(A).b, build_ic(A), PcgConfig(rel_res_tol=1e-8))
        assert trace.final_rel_residual <= 1e-8

    def test_a_norm_error_nonincreasing(self, poisson_scaled):
        A = poisson_scaled(10).matrix
        problem = generate_problem(A)
        trace = pcg(A, problem.b, build_ic(A), x_star=problem.x_star)
        errors = np.asarray(trace.a_norm_errors)
        assert errors.size == trace.iterations + 1
        assert np.all(errors[1:] <= errors[:-1] * (1 + 1e-12) + 1e-12 * errors[0])
        assert trace.final_error_vs_xstar < 1e-6

    def test_recursive_and_true_residuals_agree(self, poisson_scaled):
        A = poisson_scaled(8).matrix
        trace = pcg(A, generate_problem(A).b, build_jacobi_control(A.n))
        for record in trace.records:
            if record.rel_residual > 1e-8:
                assert record.rel_residual_recursive == pytest.approx(record.rel_residual, rel=1e-6)

    def test_nrbe_is_recorded(self, poisson_scaled):
        A = poisson_scaled(5).matrix
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n))
        assert all(0.0 <= record.nrbe <= 1.0 for record in trace.records)
        untracked = pcg(A, np.ones(A.n), build_jacobi_control(A.n), PcgConfig(track_nrbe=False))
        assert np.isnan(untracked.records[-1].nrbe)

    def test_trace_jsonl(self, tmp_path, poisson_scaled):
        A = poisson_scaled(4).matrix
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n))
        path = trace.write_jsonl(tmp_path / "traces" / "control.jsonl")
        lines = path.read_text().splitlines()
        assert len(lines) == len(trace.records)
        assert set(json.loads(lines[-1])) == {"iter", "relres", "nrbe", "work"}

    def test_untracked_nrbe_is_null(self, poisson_scaled):
        A = poisson_scaled(4).matrix
        trace = pcg(A, np.ones(A.n), build_jacobi_control(A.n), PcgConfig(track_nrbe=False))
        text = trace.to_jsonl()
        assert "NaN" not in text
        rows = [json.loads(line) for line in text.splitlines()]
        assert all(row["nrbe"] is None for row in rows)
        assert all(isinstance(row["relres"], float) for row in rows)


@pytest.mark.integration
class TestPreconditionerGains:
    def test_ic_and_sgs_beat_control_on_poisson(self):
        scaled = scale_and_symmetrize(poisson2d(32))
        A = permute_symmetric(scaled.matrix, rcm_order(scaled.matrix))
        b = generate_problem(A).b

        control = pcg(A, b, build_jacobi_control(A.n))
        ic = pcg(A, b, build_ic(A, droptol=1e-6))
        sgs = pcg(A, b, build_ssor(A, SsorConfig(sweeps=1)))

        assert control.converged and ic.converged and sgs.converged
        assert ic.work_to_tol <= control.work_to_tol / 2
        assert sgs.work_to_tol <= control.work_to_tol
        for trace in (control, ic, sgs):
            assert_work_model(trace)
