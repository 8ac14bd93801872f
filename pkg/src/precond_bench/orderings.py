"""
Symmetric orderings: reverse Cuthill-McKee, imported permutations, and
application of a permutation to both rows and columns.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from precond_bench.errors import DimensionMismatchError, PermutationError
from precond_bench.sparse.matrix import SparseMatrix
from precond_bench.types import IndexVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Permutation:
    """``perm`` maps new index to old index; ``inv`` is its inverse."""

    perm: IndexVector
    inv: IndexVector
    label: str = "natural"

    @classmethod
    def from_vector(cls, perm: Iterable[int], label: str = "external") -> "Permutation":
        perm = np.asarray(list(perm) if not isinstance(perm, np.ndarray) else perm, dtype=np.int64)
        n = perm.shape[0]
        if perm.ndim != 1:
            raise PermutationError("Permutation must be a flat index vector")
        if n and (perm.min() < 0 or perm.max() >= n):
            raise PermutationError(f"Permutation entries must lie in 0..{n - 1}")
        inv = np.full(n, -1, dtype=np.int64)
        inv[perm] = np.arange(n, dtype=np.int64)
        if np.any(inv < 0):
            raise PermutationError("Permutation repeats an index")
        perm.flags.writeable = False
        inv.flags.writeable = False
        return cls(perm=perm, inv=inv, label=label)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls.from_vector(np.arange(n, dtype=np.int64), label="natural")

    @property
    def n(self) -> int:
        return int(self.perm.shape[0])

    def inverse(self) -> "Permutation":
        return Permutation.from_vector(self.inv.copy(), label=f"inverse({self.label})")


def _bfs_levels(indptr: np.ndarray, indices: np.ndarray, start: int, members: np.ndarray) -> list[list[int]]:
    """Level structure rooted at ``start`` restricted to one component."""
    level = np.full(indptr.shape[0] - 1, -1, dtype=np.int64)
    level[start] = 0
    levels = [[start]]
    while True:
        nxt = []
        for v in levels[-1]:
            for w in indices[indptr[v]:indptr[v + 1]]:
                if level[w] < 0 and members[w]:
                    level[w] = len(levels)
                    nxt.append(int(w))
        if not nxt:
            return levels
        levels.append(nxt)


def _pseudo_peripheral(indptr: np.ndarray, indices: np.ndarray, degree: np.ndarray, component: np.ndarray) -> int:
    members = np.zeros(indptr.shape[0] - 1, dtype=bool)
    members[component] = True
    # min degree, lowest index on ties (component is sorted)
    start = int(component[np.argmin(degree[component])])
    levels = _bfs_levels(indptr, indices, start, members)
    while True:
        last = sorted(levels[-1], key=lambda v: (degree[v], v))
        candidate = last[0]
        candidate_levels = _bfs_levels(indptr, indices, candidate, members)
        if len(candidate_levels) <= len(levels):
            return start
        start, levels = candidate, candidate_levels


def rcm_order(A: SparseMatrix) -> Permutation:
    """
    Reverse Cuthill-McKee ordering.

    Each connected component is traversed breadth-first from a George-Liu
    pseudo-peripheral vertex, visiting unvisited neighbours by increasing
    degree (lowest index on ties). Components are taken in order of their
    lowest vertex and the concatenated order is reversed.
    """
    n = A.n
    csr = A.csr
    indptr, indices = csr.indptr, csr.indices
    # diagonal entries do not count towards degree
    degree = np.diff(indptr) - (csr.diagonal() != 0).astype(np.int64)

    n_components, labels = connected_components(csr, directed=False)
    components = [np.flatnonzero(labels == c) for c in range(n_components)]
    components.sort(key=lambda comp: int(comp[0]))

    order: list[int] = []
    visited = np.zeros(n, dtype=bool)
    for comp in components:
        start = _pseudo_peripheral(indptr, indices, degree, comp)
        visited[start] = True
        queue = [start]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            nbrs = [int(w) for w in indices[indptr[v]:indptr[v + 1]] if not visited[w]]
            nbrs.sort(key=lambda w: (degree[w], w))
            for w in nbrs:
                visited[w] = True
                queue.append(w)
        order.extend(queue)

    perm = Permutation.from_vector(np.asarray(order[::-1], dtype=np.int64), label="rcm")
    logger.debug(f"RCM ordering over {n_components} component(s) for n={n}")
    return perm


def load_permutation(path: Union[str, Path], n: int, label: str = "") -> Permutation:
    """
    Read a permutation file with one integer per line.

    The base is detected from the range: values spanning ``1..n`` are 1-based,
    anything else is taken as 0-based and must span ``0..n-1``. A file such
    as ``3 1 2`` for ``n = 3`` is therefore accepted as the 1-based
    permutation ``[2, 0, 1]`` rather than rejected as out of range for
    0-based input; ``3 0 2`` mixes both bases and is rejected.

    Raises:
        PermutationError: non-integer entries, wrong length or not a permutation
    """
    path = Path(path)
    tokens = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    try:
        values = np.asarray([int(t) for t in tokens], dtype=np.int64)
    except ValueError as e:
        raise PermutationError(f"{path}: non-integer entry ({e})") from e
    if values.shape[0] != n:
        raise PermutationError(f"{path}: expected {n} entries, found {values.shape[0]}")
    if n and values.min() == 1 and values.max() == n:
        values = values - 1
    return Permutation.from_vector(values, label=label or f"external:{path.stem}")


def permute_symmetric(A: SparseMatrix, p: Permutation) -> SparseMatrix:
    """Return ``P A P^T``: row and column ``i`` of the result are row and column ``p.perm[i]`` of ``A``."""
    if p.n != A.n:
        raise DimensionMismatchError(A.n, p.n, what="permutation")
    permuted = A.csr[p.perm][:, p.perm]
    return SparseMatrix(csr=permuted, symmetric=A.symmetric)


__all__ = ["Permutation", "rcm_order", "load_permutation", "permute_symmetric"]
