"""Content-addressed cache for block-density eigendecompositions.

Entries are keyed by (source fingerprint, block length) and stored as
single ``.npz`` files holding the eigenvalues, the eigenvectors, a format
version and a SHA-256 checksum of the payload bytes.  Reloading is bit
exact; a corrupted or truncated file surfaces as ``ChecksumMismatch`` and
callers recompute transparently.
"""

from __future__ import annotations

import hashlib
import os
import threading
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import EigenSystem, hermitian_eig
from .sources import DEFAULT_SIZE_CAP, SourceModel, source_fingerprint

__all__ = [
    "ChecksumMismatch",
    "CACHE_FORMAT_VERSION",
    "CacheEntry",
    "entry_path",
    "store_entry",
    "load_entry",
    "cached_eig_fn",
]

CACHE_FORMAT_VERSION = 1


class ChecksumMismatch(IOError):
    """Cache payload does not match its recorded checksum."""


@dataclass(frozen=True)
class CacheEntry:
    """Eigendecomposition of one block density, keyed by source content."""

    fingerprint: str
    n: int
    values: np.ndarray
    vectors: np.ndarray
    version: int = CACHE_FORMAT_VERSION


def _payload_checksum(values: np.ndarray, vectors: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(str(values.dtype).encode())
    digest.update(str(values.shape).encode())
    digest.update(values.tobytes())
    digest.update(str(vectors.dtype).encode())
    digest.update(str(vectors.shape).encode())
    digest.update(vectors.tobytes())
    return digest.hexdigest()


def entry_path(cache_dir, fingerprint: str, n: int) -> Path:
    return Path(cache_dir) / f"{fingerprint[:32]}_n{n}.npz"


def store_entry(cache_dir, entry: CacheEntry) -> Path:
    """Write an entry to the cache directory; returns the file path.

    The write goes through a temporary file and an atomic rename, so
    concurrent workers storing the same key can never leave a torn file.
    """
    path = entry_path(cache_dir, entry.fingerprint, entry.n)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f"{path.name}.{os.getpid()}.{threading.get_ident()}.tmp")
    with open(tmp, "wb") as handle:
        np.savez(
            handle,
            values=entry.values,
            vectors=entry.vectors,
            version=np.array(entry.version),
            n=np.array(entry.n),
            fingerprint=np.array(entry.fingerprint),
            checksum=np.array(_payload_checksum(entry.values, entry.vectors)),
        )
    os.replace(tmp, path)
    return path


def load_entry(cache_dir, fingerprint: str, n: int) -> CacheEntry | None:
    """Load an entry, or None on a cache miss.

    Raises
    ------
    ChecksumMismatch
        If the file exists but is truncated, unreadable, from a different
        format version, or fails its checksum.
    """
    path = entry_path(cache_dir, fingerprint, n)
    if not path.exists():
        return None
    try:
        with np.load(path, allow_pickle=False) as data:
            values = data["values"]
            vectors = data["vectors"]
            version = int(data["version"])
            stored = str(data["checksum"])
    except (OSError, ValueError, KeyError, EOFError, zipfile.BadZipFile) as exc:
        raise ChecksumMismatch(f"unreadable cache file {path}: {exc}") from exc
    if version != CACHE_FORMAT_VERSION:
        raise ChecksumMismatch(
            f"cache file {path} has format version {version}, "
            f"expected {CACHE_FORMAT_VERSION}"
        )
    if _payload_checksum(values, vectors) != stored:
        raise ChecksumMismatch(f"cache file {path} failed its checksum")
    return CacheEntry(
        fingerprint=fingerprint, n=n, values=values, vectors=vectors, version=version
    )


def cached_eig_fn(source: SourceModel, cache_dir, size_cap: int = DEFAULT_SIZE_CAP):
    """Eigensolver ``(n, matrix) -> EigenSystem`` backed by the cache.

    Results are identical to direct solves: the first call computes and
    stores, later calls reload the stored eigenpairs bit exactly.  A
    corrupted entry is recomputed and overwritten.
    """
    fingerprint = source_fingerprint(source)

    def eig_fn(n: int, matrix) -> EigenSystem:
        try:
            entry = load_entry(cache_dir, fingerprint, n)
        except ChecksumMismatch:
            entry = None
        if entry is None:
            eig = hermitian_eig(matrix, check=False)
            store_entry(
                cache_dir,
                CacheEntry(
                    fingerprint=fingerprint, n=n, values=eig.values, vectors=eig.vectors
                ),
            )
            return eig
        return EigenSystem(values=entry.values, vectors=entry.vectors)

    return eig_fn
