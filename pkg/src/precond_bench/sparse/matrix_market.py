"""Matrix Market ingestion and export."""

import logging
from pathlib import Path
from typing import Union

import scipy.sparse as sp
from scipy.io import mminfo, mmread, mmwrite

from precond_bench.errors import MatrixMarketFormatError
from precond_bench.sparse.matrix import SparseMatrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SUPPORTED_FIELDS = ("real", "integer")
SUPPORTED_SYMMETRY = ("general", "symmetric")


def read_matrix_market(path: PathLike) -> SparseMatrix:
    """
    Read a real coordinate Matrix Market file.

    ``symmetric`` files are mirrored into full storage, duplicates are summed
    and indices become 0-based. The symmetry flag of ``general`` files is set
    only when the stored matrix is exactly symmetric.

    Raises:
        MatrixMarketFormatError: malformed header, out-of-range index,
            unsupported field or symmetry, non-square shape
    """
    path = Path(path)
    try:
        rows, cols, entries, fmt, field, symmetry = mminfo(str(path))
    except OSError:
        raise
    except Exception as e:
        raise MatrixMarketFormatError(f"{path}: unreadable header ({e})") from e

    if fmt != "coordinate":
        raise MatrixMarketFormatError(f"{path}: format '{fmt}' is not supported, expected coordinate")
    if field not in SUPPORTED_FIELDS:
        raise MatrixMarketFormatError(f"{path}: field '{field}' is not supported")
    if symmetry not in SUPPORTED_SYMMETRY:
        raise MatrixMarketFormatError(f"{path}: symmetry '{symmetry}' is not supported")
    if rows != cols:
        raise MatrixMarketFormatError(f"{path}: matrix is {rows}x{cols}, expected square")

    try:
        data = mmread(str(path))
        csr = sp.csr_matrix(data)
    except OSError:
        raise
    except Exception as e:
        raise MatrixMarketFormatError(f"{path}: {e}") from e

    if csr.shape != (rows, cols):
        raise MatrixMarketFormatError(f"{path}: size line says {rows}x{cols}, read {csr.shape}")

    matrix = SparseMatrix.from_scipy(csr, symmetric=True if symmetry == "symmetric" else None)
    logger.debug(f"Read {path.name}: n={matrix.n}, nnz={matrix.nnz}, entries={entries}, symmetry={symmetry}")
    return matrix


def write_matrix_market(A: SparseMatrix, path: PathLike) -> Path:
    """Write ``A`` with full double precision; symmetric matrices store the lower triangle."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    symmetry = "symmetric" if A.symmetric else "general"
    with open(path, "wb") as fh:
        mmwrite(fh, A.csr, field="real", precision=17, symmetry=symmetry)
    logger.debug(f"Wrote {path}: n={A.n}, nnz={A.nnz}, symmetry={symmetry}")
    return path


__all__ = ["read_matrix_market", "write_matrix_market"]
