"""
Matrix fetcher with a local cache.

Payloads are either plain Matrix Market files or ``.tar.gz`` archives in the
SuiteSparse layout (``<name>/<name>.mtx``). The cached file is
``<cache>/<matrix id>.mtx``; once present, the network is never touched.
"""

import hashlib
import logging
import shutil
import tarfile
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import httpx

from precond_bench.errors import ChecksumMismatchError, FetchError
from precond_bench.logger import log_benchmark_operation

logger = logging.getLogger(__name__)

ARCHIVE_SUFFIXES = (".tar.gz", ".tgz")
CHUNK_SIZE = 1 << 20


@dataclass(frozen=True)
class FetchResult:
    matrix_id: str
    path: Path
    sha256: str
    cached: bool


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _verify(matrix_id: str, path: Path, expected: Optional[str]) -> str:
    actual = sha256_file(path)
    if expected is not None and actual.lower() != expected.lower():
        raise ChecksumMismatchError(matrix_id, expected, actual)
    return actual


def _download(client: httpx.Client, url: str, target: Path) -> None:
    try:
        with client.stream("GET", url) as response:
            response.raise_for_status()
            with target.open("wb") as handle:
                for chunk in response.iter_bytes(CHUNK_SIZE):
                    handle.write(chunk)
    except httpx.HTTPError as e:
        raise FetchError(f"Download of {url} failed: {e}") from e


def _extract_mtx(archive: Path, target: Path) -> None:
    """Copy the main ``.mtx`` member out of a SuiteSparse archive."""
    try:
        with tarfile.open(archive, "r:gz") as tar:
            members = [m for m in tar.getmembers() if m.isfile() and m.name.endswith(".mtx")]
            if not members:
                raise FetchError(f"{archive.name}: no Matrix Market member")
            # <name>/<name>.mtx; auxiliary members carry a suffix such as _b or _coord
            main = next(
                (m for m in members if Path(m.name).stem == Path(m.name).parent.name),
                min(members, key=lambda m: len(m.name)),
            )
            source = tar.extractfile(main)
            if source is None:
                raise FetchError(f"{archive.name}: cannot read {main.name}")
            with source, target.open("wb") as handle:
                shutil.copyfileobj(source, handle)
    except tarfile.TarError as e:
        raise FetchError(f"{archive.name}: not a readable tar.gz archive: {e}") from e


@log_benchmark_operation("fetch")
def fetch_matrix(
    matrix_id: str,
    url: str,
    cache_dir: Union[str, Path],
    sha256: Optional[str] = None,
    offline: bool = False,
    client: Optional[httpx.Client] = None,
    timeout: float = 60.0,
) -> FetchResult:
    """
    Return the cached Matrix Market file for ``matrix_id``, downloading it if needed.

    Raises:
        FetchError: offline with an empty cache, or a network/archive failure
        ChecksumMismatchError: the file does not match ``sha256`` (a fresh download is discarded)
    """
    cache_dir = Path(cache_dir)
    target = cache_dir / f"{matrix_id}.mtx"
    if target.exists():
        logger.info(f"Cache hit for {matrix_id}: {target}")
        return FetchResult(matrix_id, target, _verify(matrix_id, target, sha256), cached=True)
    if offline:
        raise FetchError(f"{matrix_id} is not cached and offline mode is on")

    cache_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Fetching {matrix_id} from {url}")
    own_client = client is None
    http = client if client is not None else httpx.Client(timeout=timeout, follow_redirects=True)
    try:
        with tempfile.TemporaryDirectory(dir=cache_dir) as tmp:
            payload = Path(tmp) / "payload"
            _download(http, url, payload)
            staged = Path(tmp) / f"{matrix_id}.mtx"
            if url.endswith(ARCHIVE_SUFFIXES):
                _extract_mtx(payload, staged)
            else:
                payload.rename(staged)
            digest = _verify(matrix_id, staged, sha256)
            staged.replace(target)
    finally:
        if own_client:
            http.close()
    return FetchResult(matrix_id, target, digest, cached=False)


__all__ = ["FetchResult", "fetch_matrix", "sha256_file"]
