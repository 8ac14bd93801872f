"""Tests for the preconditioner families, the configuration grid and the operator checks."""

import math

import numpy as np
import pytest
import scipy.sparse as sp

from precond_bench.errors import GenerationFailure, LuAdapterFailure, NotSddError, UndefinedOmegaError
from precond_bench.harness.generators import poisson2d, random_sdd, tridiag
from precond_bench.preconditioners.checks import check_linearity, check_symmetry
from precond_bench.preconditioners.ic import build_ic, incomplete_cholesky
from precond_bench.preconditioners.jacobi import build_jacobi_control
from precond_bench.preconditioners.laplacian import LaplacianPipeline, build_laplacian_pipeline
from precond_bench.preconditioners.lu_adapter import load_lu_factors, symmetrize_lu
from precond_bench.preconditioners.registry import PrecondSpec, build_preconditioner, expand_grid, resolve_specs
from precond_bench.preconditioners.sspai import SspaiConfig, build_sspai
from precond_bench.preconditioners.ssor import SsorConfig, build_ssor, jacobi_iteration_norm, optimal_omega
from precond_bench.preconditioners.tns import TnsConfig, build_tns, tns_alpha
from precond_bench.solver.pcg import pcg
from precond_bench.sparse.matrix import SparseMatrix, scale_and_symmetrize
from precond_bench.sparse.matrix_market import write_matrix_market
from precond_bench.types import SddStatus


@pytest.mark.unit
class TestControl:
    def test_identity(self):
        M = build_jacobi_control(2)
        np.testing.assert_array_equal(M.apply([1.0, 2.0]), [1.0, 2.0])
        assert M.apply_cost == 0
        assert M.generation_cost == 0
        assert M.config_label == "control"


@pytest.mark.unit
class TestTns:
    def test_one_term_unit_alpha(self, poisson_scaled):
        A = poisson_scaled(5).matrix
        r = np.random.default_rng(0).standard_normal(A.n)
        M = build_tns(A, TnsConfig(terms=1, alpha=1.0))
        assert np.abs(M.apply(r) - (2 * r - A.csr @ r)).max() <= 1e-14
        assert M.equivalent_to_control
        assert M.apply_cost == A.nnz

    def test_one_term_remainder_gives_a(self, poisson_scaled):
        A = poisson_scaled(4).matrix
        r = np.random.default_rng(1).standard_normal(A.n)
        M = build_tns(A, TnsConfig(terms=1, alpha=1.0, convention="remainder"))
        np.testing.assert_allclose(M.apply(r), A.csr @ r, atol=1e-14)
        assert M.config_label == "tns-remainder(m=1,alpha=unit)"

    def test_identity_matrix(self):
        r = np.array([1.0, -2.0, 3.0])
        M = build_tns(SparseMatrix.identity(3), TnsConfig(terms=3, alpha=1.0))
        np.testing.assert_allclose(M.apply(r), r)

    def test_matches_dense_polynomial(self, random_spd):
        A = scale_and_symmetrize(random_spd(20, seed=6)).matrix
        alpha = tns_alpha(A, "inf")
        dense = A.to_dense()
        step = np.eye(20) - alpha * dense
        expected = alpha * sum(np.linalg.matrix_power(step, k) for k in range(4))
        r = np.random.default_rng(2).standard_normal(20)
        M = build_tns(A, TnsConfig(terms=3, alpha=alpha, alpha_label="inf"))
        assert np.abs(M.apply(r) - expected @ r).max() <= 1e-12
        assert M.apply_cost == 3 * A.nnz

    def test_zero_terms_rejected(self):
        with pytest.raises(ValueError):
            TnsConfig(terms=0)

    def test_alpha_choices(self, poisson_scaled):
        A = poisson_scaled(4).matrix
        assert tns_alpha(A, "unit") == 1.0
        assert tns_alpha(A, "fro") == pytest.approx(1.0 / np.linalg.norm(A.to_dense(), "fro"))
        assert tns_alpha(A, "two") == pytest.approx(2.0 / np.max(np.linalg.eigvalsh(A.to_dense())), rel=1e-5)


@pytest.mark.unit
class TestSsor:
    def test_identity_one_sweep(self):
        r = np.array([1.0, 2.0, 3.0])
        M = build_ssor(SparseMatrix.identity(3), SsorConfig())
        np.testing.assert_allclose(M.apply(r), r)

    @pytest.mark.parametrize("a", [0.3, -0.7])
    def test_hand_sweeps(self, a):
        A = SparseMatrix.from_dense([[1.0, a], [a, 1.0]])
        M = build_ssor(A, SsorConfig())
        np.testing.assert_allclose(M.apply([1.0, 0.0]), [1.0 + a * a, -a], atol=1e-14)

    def test_costs(self, poisson_scaled):
        A = poisson_scaled(4).matrix
        assert build_ssor(A, SsorConfig(sweeps=2)).apply_cost == 2 * 2 * A.nnz
        assert build_ssor(A, SsorConfig(omega=1.5, mode="ssor")).apply_cost == 2 * A.nnz + 4 * A.n

    def test_labels(self):
        assert SsorConfig(sweeps=2).label == "sgs(sweeps=2)"
        assert SsorConfig(omega=1.2, mode="ssor").label == "ssor(omega=1.2,sweeps=1)"

    def test_symmetric_on_random_spd(self, random_spd):
        A = scale_and_symmetrize(random_spd(30, seed=8)).matrix
        M = build_ssor(A, SsorConfig(omega=1.5, sweeps=2, mode="ssor"))
        assert check_symmetry(M, 30).passed

    @pytest.mark.parametrize("omega", [0.5, 1.2, 1.8])
    def test_pcg_converges(self, random_spd, omega):
        A = scale_and_symmetrize(random_spd(50, seed=9)).matrix
        b = np.random.default_rng(3).standard_normal(50)
        trace = pcg(A, b, build_ssor(A, SsorConfig(omega=omega, mode="ssor")))
        assert trace.converged

    @pytest.mark.parametrize("omega", [0.0, 2.0])
    def test_omega_range(self, omega):
        with pytest.raises(ValueError):
            SsorConfig(omega=omega, mode="ssor")


@pytest.mark.unit
class TestOptimalOmega:
    def test_zero(self):
        assert optimal_omega(0.0) == 1.0

    def test_closed_form(self):
        assert optimal_omega(math.sqrt(3) / 2) == pytest.approx(4.0 / 3.0, abs=1e-12)

    def test_limit(self):
        assert abs(optimal_omega(1 - 1e-12) - 2.0) <= 1e-4

    def test_undefined_above_one(self):
        with pytest.raises(UndefinedOmegaError):
            optimal_omega(1.01)

    def test_jacobi_norm_of_poisson(self, poisson_scaled):
        k = 8
        expected = math.cos(math.pi / (k + 1))
        assert jacobi_iteration_norm(poisson_scaled(k).matrix) == pytest.approx(expected, rel=1e-4)


@pytest.mark.unit
class TestIncompleteCholesky:
    def test_tridiagonal_pattern_mode_is_exact(self):
        A = tridiag(10)
        factor = incomplete_cholesky(A, droptol=0.0)
        np.testing.assert_allclose(factor.L.to_dense(), np.linalg.cholesky(A.to_dense()), atol=1e-12)

    def test_identity(self):
        for droptol, modified in [(0.0, False), (1e-4, False), (0.0, True), (1e-4, True)]:
            factor = incomplete_cholesky(SparseMatrix.identity(4), droptol=droptol, modified=modified)
            np.testing.assert_array_equal(factor.L.to_dense(), np.eye(4))

    def test_exact_factor_limit(self, dense_spd):
        for seed in range(10):
            dense = dense_spd(30, seed=seed)
            A = SparseMatrix.from_dense(dense)
            M = build_ic(A, droptol=1e-12)
            L = M.L.to_dense()
            assert np.linalg.norm(L @ L.T - dense, "fro") <= 1e-9 * np.linalg.norm(dense, "fro")
            b = np.random.default_rng(seed).standard_normal(30)
            trace = pcg(A, b, M)
            assert trace.converged
            assert trace.iters_to_tol <= 2

    def test_pattern_mode_keeps_lower_pattern(self, poisson_scaled):
        A = poisson_scaled(6).matrix
        factor = incomplete_cholesky(A, droptol=0.0)
        lower = sp.tril(A.csr)
        assert factor.L.nnz == lower.nnz
        assert factor.fill_ratio == pytest.approx(1.0)

    def test_fill_nonincreasing_in_droptol(self, poisson_scaled):
        A = poisson_scaled(8).matrix
        nnz = [incomplete_cholesky(A, droptol=t).L.nnz for t in (1e-8, 1e-6, 1e-4, 1e-2)]
        assert nnz == sorted(nnz, reverse=True)

    @pytest.mark.parametrize("droptol", [0.0, 1e-3, 1e-1])
    def test_modified_preserves_row_sums(self, poisson_scaled, droptol):
        A = poisson_scaled(6).matrix
        L = incomplete_cholesky(A, droptol=droptol, modified=True).L.to_dense()
        e = np.ones(A.n)
        defect = np.abs((L @ L.T - A.to_dense()) @ e).max()
        assert defect <= 1e-8 * np.abs(A.to_dense()).sum(axis=1).max()

    def test_costs_and_labels(self, poisson_scaled):
        A = poisson_scaled(5).matrix
        M = build_ic(A, droptol=1e-4, modified=True)
        counts = M.factor.column_counts
        assert M.apply_cost == 2 * M.L.nnz
        assert M.generation_cost == int(np.sum(counts * counts))
        assert M.config_label == "mic(droptol=0.0001)"
        assert M.precond_class == "mic"
        assert build_ic(A).config_label == "ic(0)"

    def test_nonpositive_pivot_is_generation_failure(self):
        A = SparseMatrix.from_dense([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(GenerationFailure) as excinfo:
            incomplete_cholesky(A)
        assert excinfo.value.column == 1
        assert excinfo.value.value == pytest.approx(-3.0)


@pytest.mark.unit
class TestSspai:
    def test_diagonal_is_exact(self):
        A = SparseMatrix.from_dense(np.diag([2.0, 4.0]))
        M = build_sspai(A, SspaiConfig(fill_multiplier=2.0))
        np.testing.assert_allclose(M.K.toarray(), np.diag([0.5, 0.25]))

    def test_identity_single_entry_pattern(self):
        M = build_sspai(SparseMatrix.identity(5), SspaiConfig(fill_multiplier=1.0))
        assert M.budget == 1
        np.testing.assert_allclose(M.K.toarray(), np.eye(5))

    def test_full_pattern_is_inverse(self, dense_spd):
        dense = dense_spd(10, seed=4)
        M = build_sspai(SparseMatrix.from_dense(dense), SspaiConfig(fill_multiplier=1.0))
        assert M.budget == 10
        np.testing.assert_allclose(M.K.toarray(), np.linalg.inv(dense), atol=1e-8)
        assert M.apply_cost == M.K.nnz
        assert M.generation_cost is None

    def test_symmetric(self, poisson_scaled):
        M = build_sspai(poisson_scaled(6).matrix, SspaiConfig(fill_multiplier=0.5))
        K = M.K.toarray()
        np.testing.assert_array_equal(K, K.T)

    def test_budget_at_least_one(self):
        assert SspaiConfig(fill_multiplier=0.01).per_column_budget(SparseMatrix.identity(3)) == 1


@pytest.mark.unit
class TestSymmetrizedLu:
    def test_identity_factor(self):
        M = symmetrize_lu(SparseMatrix.identity(2), [4.0, 9.0])
        np.testing.assert_allclose(M.L.to_dense(), np.diag([2.0, 3.0]))
        np.testing.assert_allclose(M.apply([4.0, 9.0]), [1.0, 1.0])

    def test_exact_lu_reproduces_matrix(self, dense_spd):
        dense = dense_spd(12, seed=5)
        C = np.linalg.cholesky(dense)
        d = np.diag(C)
        unit_lower = C / d
        M = symmetrize_lu(SparseMatrix.from_dense(unit_lower), d * d)
        Lp = M.L.to_dense()
        np.testing.assert_allclose(Lp @ Lp.T, dense, atol=1e-10 * np.abs(dense).max())
        assert M.apply_cost == 2 * M.L.nnz

    def test_zero_pivot_rejected(self):
        with pytest.raises(LuAdapterFailure):
            symmetrize_lu(SparseMatrix.identity(2), [1.0, 0.0])

    def test_upper_entries_rejected(self):
        with pytest.raises(ValueError):
            symmetrize_lu(SparseMatrix.from_dense([[1.0, 1.0], [0.0, 1.0]]), [1.0, 1.0])

    def test_load_from_files(self, tmp_path):
        l_path = write_matrix_market(SparseMatrix.from_dense([[1.0, 0.0], [0.5, 1.0]]), tmp_path / "L.mtx")
        diag_path = tmp_path / "diagU.txt"
        diag_path.write_text("4\n9\n")
        L, diagU = load_lu_factors(l_path, diag_path)
        assert L.n == 2
        np.testing.assert_array_equal(diagU, [4.0, 9.0])


@pytest.mark.unit
class TestLaplacianPipeline:
    def test_two_by_two_solve(self):
        pipeline = LaplacianPipeline(SparseMatrix.from_dense([[2.0, -1.0], [-1.0, 2.0]]))
        x, trace = pipeline.solve(np.array([1.0, 0.0]))
        assert trace.converged
        np.testing.assert_allclose(x, [2.0 / 3.0, 1.0 / 3.0], atol=1e-8)

    def test_not_sdd_rejected_without_lift(self):
        with pytest.raises(NotSddError):
            LaplacianPipeline(SparseMatrix.from_dense([[1.0, 0.6, 0.6], [0.6, 1.0, 0.6], [0.6, 0.6, 1.0]]))

    def test_matches_dense_solve_on_random_sdd(self):
        for seed in range(20):
            n = 10 + 4 * seed
            A = random_sdd(n, density=0.1, seed=seed)
            b = np.random.default_rng(seed).standard_normal(n)
            x, trace = LaplacianPipeline(A).solve(b)
            expected = np.linalg.solve(A.to_dense(), b)
            assert trace.converged
            assert np.linalg.norm(x - expected) <= 1e-8 * np.linalg.norm(expected)

    def test_agrees_with_plain_pcg(self, poisson_scaled):
        scaled = poisson_scaled(5)
        A = scaled.matrix
        b = np.random.default_rng(0).standard_normal(A.n)
        x, _ = LaplacianPipeline(A).solve(b)
        plain = pcg(A, b, build_jacobi_control(A.n))
        np.testing.assert_allclose(x, plain.solution, atol=1e-8)

    def test_route_selection(self):
        A = poisson2d(4)
        pipeline, classification = build_laplacian_pipeline(A, scale_and_symmetrize(A))
        assert classification.status is SddStatus.SDD_AS_SCALED
        assert pipeline.augmented_solve

        not_sdd = SparseMatrix.from_dense([[1.0, 0.6, 0.6], [0.6, 1.0, 0.6], [0.6, 0.6, 1.0]])
        pipeline, classification = build_laplacian_pipeline(not_sdd, scale_and_symmetrize(not_sdd))
        assert classification.status is SddStatus.NOT_SDD
        assert not pipeline.augmented_solve

    def test_preconditioner_inside_pcg(self, poisson_scaled):
        A = poisson_scaled(6).matrix
        b = np.random.default_rng(1).standard_normal(A.n)
        trace = pcg(A, b, LaplacianPipeline(A))
        assert trace.converged


@pytest.mark.unit
class TestRegistry:
    def test_default_grid_size(self):
        specs = expand_grid()
        kinds = [spec.kind for spec in specs]
        assert kinds.count("tns") == 20
        assert kinds.count("sgs") == 2
        assert kinds.count("ssor") == 6
        assert kinds.count("ssor_opt") == 2
        assert kinds.count("sspai") == 4
        assert kinds.count("ic") == 12
        assert kinds.count("laplacian") == 1
        assert len({spec.label for spec in specs}) == len(specs)

    @pytest.mark.parametrize(
        "spec, label",
        [
            (PrecondSpec("control"), "control"),
            (PrecondSpec("tns", terms=2, alpha_label="fro"), "tns(m=2,alpha=fro)"),
            (PrecondSpec("ssor", omega=1.5, sweeps=2), "ssor(omega=1.5,sweeps=2)"),
            (PrecondSpec("ssor_opt", sweeps=1), "ssor(omega=opt,sweeps=1)"),
            (PrecondSpec("sspai", fill_multiplier=0.5), "sspai(fill=0.5)"),
            (PrecondSpec("ic", droptol=1e-6, modified=True), "mic(droptol=1e-06)"),
            (PrecondSpec("laplacian", droptol=1e-4), "laplacian(droptol=0.0001)"),
            (PrecondSpec("lu", lu_label="ilu0"), "lu(ilu0)"),
        ],
    )
    def test_labels(self, spec, label):
        assert spec.label == label

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            PrecondSpec("amg")

    def test_optimal_omega_dropped_when_undefined(self):
        A = scale_and_symmetrize(
            SparseMatrix.from_dense([[1.0, 0.6, 0.6], [0.6, 1.0, 0.6], [0.6, 0.6, 1.0]])
        ).matrix
        specs, omega = resolve_specs([PrecondSpec("sgs"), PrecondSpec("ssor_opt")], A)
        assert omega is None
        assert [spec.kind for spec in specs] == ["sgs"]

    def test_optimal_omega_resolved(self, poisson_scaled):
        specs, omega = resolve_specs([PrecondSpec("ssor_opt")], poisson_scaled(6).matrix)
        assert len(specs) == 1
        assert 1.0 < omega < 2.0

    def test_default_grid_operators_are_symmetric_and_linear(self, poisson_scaled):
        scaled = poisson_scaled(8)
        A = scaled.matrix
        assert A.n == 64
        specs, omega = resolve_specs([PrecondSpec("control"), *expand_grid()], A)
        assert omega is not None
        for spec in specs:
            op = build_preconditioner(spec, scaled, A_unscaled=poisson2d(8), optimal_omega_value=omega)
            symmetry = check_symmetry(op, A.n, pairs=20)
            linearity = check_linearity(op, A.n, pairs=20)
            assert symmetry.passed, f"{spec.label}: {symmetry.max_rel_error}"
            assert linearity.passed, f"{spec.label}: {linearity.max_rel_error}"

    def test_lu_spec_needs_factors(self, poisson_scaled):
        with pytest.raises(ValueError):
            build_preconditioner(PrecondSpec("lu", lu_label="x"), poisson_scaled(3))
