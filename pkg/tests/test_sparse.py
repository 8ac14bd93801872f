"""Tests for sparse storage, kernels, scaling and Matrix Market I/O."""

import numpy as np
import pytest
import scipy.sparse as sp

from precond_bench.errors import (
    DimensionMismatchError,
    MatrixMarketFormatError,
    NotSpdCandidateError,
    SingularFactorError,
)
from precond_bench.sparse.kernels import (
    estimate_two_norm,
    lower_tri_solve,
    matvec,
    norms,
    upper_tri_solve,
)
from precond_bench.sparse.matrix import SparseMatrix, bandwidth, scale_and_symmetrize
from precond_bench.sparse.matrix_market import read_matrix_market, write_matrix_market


@pytest.mark.unit
class TestSparseMatrix:
    def test_canonical_storage_drops_explicit_zeros(self):
        csr = sp.csr_matrix((np.array([1.0, 0.0, 2.0]), np.array([0, 1, 1]), np.array([0, 2, 3])), shape=(2, 2))
        A = SparseMatrix.from_scipy(csr)
        assert A.nnz == 2

    def test_symmetry_detected_exactly(self):
        assert SparseMatrix.from_dense([[2.0, -1.0], [-1.0, 2.0]]).symmetric
        assert not SparseMatrix.from_dense([[2.0, -1.0], [-1.0 + 1e-15, 2.0]]).symmetric

    def test_arrays_are_read_only(self):
        A = SparseMatrix.identity(3)
        with pytest.raises(ValueError):
            A.values[0] = 5.0

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatchError):
            SparseMatrix(csr=sp.csr_matrix(np.ones((2, 3))))

    def test_bandwidth(self):
        assert bandwidth(SparseMatrix.identity(4)) == 0
        A = SparseMatrix.from_dense([[1, 0, 1], [0, 1, 0], [1, 0, 1]])
        assert bandwidth(A) == 2


@pytest.mark.unit
class TestKernels:
    def test_matvec_identity(self):
        np.testing.assert_array_equal(matvec(SparseMatrix.identity(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_matvec_row_sums(self):
        A = SparseMatrix.from_dense([[2.0, -1.0], [-1.0, 2.0]])
        np.testing.assert_array_equal(matvec(A, [1.0, 1.0]), [1.0, 1.0])

    def test_matvec_matches_dense(self, random_spd):
        A = random_spd(50, seed=3)
        x = np.random.default_rng(1).standard_normal(50)
        assert np.max(np.abs(matvec(A, x) - A.to_dense() @ x)) <= 1e-13

    def test_matvec_linearity(self, random_spd):
        A = random_spd(30, seed=4)
        rng = np.random.default_rng(2)
        x, y = rng.standard_normal(30), rng.standard_normal(30)
        lhs = matvec(A, 2.5 * x - 0.75 * y)
        rhs = 2.5 * matvec(A, x) - 0.75 * matvec(A, y)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)

    def test_matvec_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            matvec(SparseMatrix.identity(3), np.ones(4))

    def test_lower_solve_diagonal(self):
        L = SparseMatrix.from_dense([[2.0, 0.0], [0.0, 4.0]])
        np.testing.assert_allclose(lower_tri_solve(L, [2.0, 4.0]), [1.0, 1.0])

    def test_lower_solve_forward_substitution(self):
        L = SparseMatrix.from_dense([[1.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(lower_tri_solve(L, [1.0, 2.0]), [1.0, 1.0])

    def test_triangular_solves_match_dense(self):
        rng = np.random.default_rng(7)
        dense = np.tril(rng.uniform(-1.0, 1.0, (30, 30)) * (rng.random((30, 30)) < 0.3), k=-1) + np.eye(30)
        L = SparseMatrix.from_dense(dense)
        b = rng.standard_normal(30)
        assert np.max(np.abs(lower_tri_solve(L, b) - np.linalg.solve(dense, b))) <= 1e-12
        U = SparseMatrix.from_dense(dense.T)
        y = upper_tri_solve(U, b)
        assert np.linalg.norm(dense.T @ y - b) <= 1e-10 * np.linalg.norm(b)

    def test_zero_diagonal_is_singular(self):
        L = SparseMatrix.from_dense([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(SingularFactorError):
            lower_tri_solve(L, [1.0, 1.0])

    def test_wrong_triangle_rejected(self):
        with pytest.raises(ValueError):
            lower_tri_solve(SparseMatrix.from_dense([[1.0, 1.0], [0.0, 1.0]]), [1.0, 1.0])

    def test_norms_identity(self):
        result = norms(SparseMatrix.identity(5))
        assert result.fro == pytest.approx(np.sqrt(5))
        assert result.one == 1.0
        assert result.inf == 1.0
        assert estimate_two_norm(SparseMatrix.identity(5)) == pytest.approx(1.0)

    def test_two_norm_of_diagonal(self):
        A = SparseMatrix.from_dense(np.diag([1.0, 2.0, 3.0]))
        assert estimate_two_norm(A) == pytest.approx(3.0, rel=1e-6)

    def test_two_norm_matches_eigensolver(self):
        rng = np.random.default_rng(11)
        Q, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        eigs = np.concatenate([np.linspace(1.0, 10.0, 39), [20.0]])
        dense = (Q * eigs) @ Q.T
        dense = (dense + dense.T) / 2
        A = SparseMatrix.from_dense(dense)
        expected = np.max(np.abs(np.linalg.eigvalsh(dense)))
        assert estimate_two_norm(A) == pytest.approx(expected, rel=1e-4)

    def test_two_norm_is_reproducible(self, random_spd):
        A = random_spd(40, seed=5)
        assert estimate_two_norm(A, seed=3) == estimate_two_norm(A, seed=3)


@pytest.mark.unit
class TestScaleAndSymmetrize:
    def test_diagonal_matrix_becomes_identity(self):
        scaled = scale_and_symmetrize(SparseMatrix.from_dense(np.diag([4.0, 9.0])))
        np.testing.assert_array_equal(scaled.matrix.to_dense(), np.eye(2))
        np.testing.assert_array_equal(scaled.scale, [2.0, 3.0])

    def test_off_diagonal_scaling(self):
        scaled = scale_and_symmetrize(SparseMatrix.from_dense([[4.0, 2.0], [2.0, 9.0]]))
        dense = scaled.matrix.to_dense()
        assert dense[0, 1] == pytest.approx(1.0 / 3.0)
        assert dense[1, 0] == dense[0, 1]

    def test_unit_diagonal_and_exact_symmetry(self):
        rng = np.random.default_rng(0)
        dense = rng.uniform(-1.0, 1.0, (12, 12)) * (rng.random((12, 12)) < 0.4)
        np.fill_diagonal(dense, rng.uniform(1.0, 5.0, 12))
        scaled = scale_and_symmetrize(SparseMatrix.from_dense(dense))
        out = scaled.matrix.to_dense()
        np.testing.assert_array_equal(np.diag(out), np.ones(12))
        np.testing.assert_array_equal(out, out.T)
        assert scaled.matrix.symmetric

    def test_rhs_round_trip(self):
        scaled = scale_and_symmetrize(SparseMatrix.from_dense(np.diag([4.0, 9.0])))
        b = np.array([2.0, 3.0])
        np.testing.assert_allclose(scaled.scale_rhs(b), [1.0, 1.0])
        np.testing.assert_allclose(scaled.unscale_solution([1.0, 1.0]), [0.5, 1.0 / 3.0])

    @pytest.mark.parametrize("diagonal", [[1.0, 0.0], [1.0, -2.0]])
    def test_nonpositive_diagonal_rejected(self, diagonal):
        with pytest.raises(NotSpdCandidateError):
            scale_and_symmetrize(SparseMatrix.from_dense(np.diag(diagonal)))


@pytest.mark.unit
class TestMatrixMarket:
    def test_symmetric_file_is_mirrored(self, tmp_path):
        path = tmp_path / "a.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 2\n2 1 -1\n2 2 2\n")
        A = read_matrix_market(path)
        np.testing.assert_array_equal(A.to_dense(), [[2.0, -1.0], [-1.0, 2.0]])
        assert A.symmetric

    def test_duplicates_are_summed(self, tmp_path):
        path = tmp_path / "dup.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 1\n1 2 0.5\n1 2 0.5\n2 2 1\n")
        A = read_matrix_market(path)
        assert A.to_dense()[0, 1] == 1.0
        assert A.nnz == 3
        assert not A.symmetric

    def test_round_trip_is_value_identical(self, tmp_path):
        rng = np.random.default_rng(9)
        R = sp.random(25, 25, density=0.2, random_state=rng) + sp.identity(25)
        A = SparseMatrix.from_scipy(R)
        B = read_matrix_market(write_matrix_market(A, tmp_path / "r.mtx"))
        assert (B.n, B.nnz) == (A.n, A.nnz)
        assert (A.csr != B.csr).nnz == 0

    def test_symmetric_round_trip(self, tmp_path, random_spd):
        A = random_spd(20, seed=2)
        B = read_matrix_market(write_matrix_market(A, tmp_path / "s.mtx"))
        assert B.symmetric
        assert (A.csr != B.csr).nnz == 0

    def test_non_square_rejected(self, tmp_path):
        path = tmp_path / "rect.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n")
        with pytest.raises(MatrixMarketFormatError):
            read_matrix_market(path)

    def test_complex_field_rejected(self, tmp_path):
        path = tmp_path / "c.mtx"
        path.write_text("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n")
        with pytest.raises(MatrixMarketFormatError):
            read_matrix_market(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("not a matrix market file\n")
        with pytest.raises(MatrixMarketFormatError):
            read_matrix_market(path)
