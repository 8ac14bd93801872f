"""Deterministic test matrices."""

import numpy as np
import scipy.sparse as sp

from precond_bench.sparse.matrix import SparseMatrix


def poisson2d(k: int) -> SparseMatrix:
    """5-point Laplacian on a ``k x k`` grid: order ``k^2``, diagonal 4, neighbours -1."""
    if k < 1:
        raise ValueError(f"poisson2d needs k >= 1, got {k}")
    T = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(k, k))
    eye = sp.identity(k)
    return SparseMatrix.from_scipy(sp.kron(eye, T) + sp.kron(T, eye), symmetric=True)


def tridiag(n: int, diagonal: float = 2.0, off: float = -1.0) -> SparseMatrix:
    if n < 1:
        raise ValueError(f"tridiag needs n >= 1, got {n}")
    return SparseMatrix.from_scipy(sp.diags([off, diagonal, off], [-1, 0, 1], shape=(n, n)), symmetric=True)


def random_sdd(n: int, density: float = 0.05, seed: int = 0) -> SparseMatrix:
    """
    Symmetric, strictly diagonally dominant, positive diagonal.

    Off-diagonal values are uniform in ``[-1, 1)``; each diagonal entry is its
    row's absolute off-diagonal sum plus one.
    """
    if n < 1:
        raise ValueError(f"random_sdd needs n >= 1, got {n}")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    rng = np.random.default_rng(seed)
    R = sp.random(n, n, density=density, format="csr", random_state=rng, data_rvs=lambda size: rng.uniform(-1.0, 1.0, size))
    upper = sp.triu(R, k=1)
    off = (upper + upper.T).tocsr()
    diagonal = np.asarray(abs(off).sum(axis=1)).ravel() + 1.0
    return SparseMatrix.from_scipy(off + sp.diags(diagonal), symmetric=True)


def generate_test_matrix(kind: str, **params) -> SparseMatrix:
    """Dispatch by ``kind``: ``poisson2d(k)``, ``tridiag(n)`` or ``random_sdd(n, density, seed)``."""
    if kind == "poisson2d":
        return poisson2d(int(params["k"]))
    if kind == "tridiag":
        return tridiag(int(params["n"]))
    if kind == "random_sdd":
        return random_sdd(int(params["n"]), float(params.get("density", 0.05)), int(params.get("seed", 0)))
    raise ValueError(f"Unknown generator '{kind}'")


__all__ = ["poisson2d", "tridiag", "random_sdd", "generate_test_matrix"]
