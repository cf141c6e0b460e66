"""Corpus discovery and in-memory ingestion.

A corpus is an ordered list of JPEG files under a root directory. Ordering
is fixed as byte-wise lexicographic on the posix-style relative path, so an
item's index is stable across machines and filesystems; skip reports and
robustness accounting refer to items by that index.

Both timing protocols require the encoded bytes to be memory-resident
before any clock starts, so ingestion is a separate, untimed step that
reads every file once and verifies it begins with a JPEG SOI marker.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ConfigurationError, EmptyCorpusError, IngestionError

SOI_MARKER = b"\xff\xd8"

DEFAULT_SUFFIXES = (".jpg", ".jpeg")


@dataclass(frozen=True)
class CorpusItem:
    """One encoded image, pinned to its position in the corpus ordering."""

    index: int
    relative_path: str
    data: bytes = field(repr=False)

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("item index must be non-negative")
        if len(self.data) == 0:
            raise ValueError(f"{self.relative_path}: empty payload")

    @property
    def byte_length(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class Corpus:
    """Memory-resident corpus with a stable item order."""

    source_root: str
    items: tuple[CorpusItem, ...]

    def __post_init__(self):
        for position, item in enumerate(self.items):
            if item.index != position:
                raise ValueError(
                    f"item {item.relative_path} has index {item.index}, expected {position}"
                )

    def __len__(self) -> int:
        return len(self.items)

    @property
    def total_bytes(self) -> int:
        return sum(item.byte_length for item in self.items)


def scan_corpus(root: str | Path, suffixes: Sequence[str] = DEFAULT_SUFFIXES) -> list[str]:
    """Walk ``root`` and return sorted relative paths of JPEG files.

    Matching is a case-insensitive suffix test. Paths are returned
    posix-style relative to ``root`` and sorted as UTF-8 byte strings,
    which defines the corpus index space.
    """
    root = Path(root)
    if not root.exists():
        raise ConfigurationError(f"corpus root does not exist: {root}")
    if not root.is_dir():
        raise ConfigurationError(f"corpus root is not a directory: {root}")

    lowered = tuple(s.lower() for s in suffixes)
    found: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in filenames:
            if name.lower().endswith(lowered):
                rel = Path(dirpath, name).relative_to(root).as_posix()
                found.append(rel)
    found.sort(key=lambda rel: rel.encode("utf-8"))
    if not found:
        raise EmptyCorpusError(f"no files matching {lowered} under {root}")
    return found


def load_memory_corpus(root: str | Path, relative_paths: Sequence[str]) -> Corpus:
    """Read every listed file into memory, verifying each starts with SOI.

    ``relative_paths`` must already be in corpus order (as produced by
    scan_corpus, possibly truncated); indices are assigned positionally.
    """
    root = Path(root)
    items = []
    for index, rel in enumerate(relative_paths):
        path = root / rel
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise IngestionError(f"cannot read {rel}: {exc}") from exc
        if data[:2] != SOI_MARKER:
            raise IngestionError(f"{rel}: missing JPEG SOI marker")
        items.append(CorpusItem(index=index, relative_path=rel, data=data))
    if not items:
        raise EmptyCorpusError(f"no files to ingest under {root}")
    return Corpus(source_root=str(root), items=tuple(items))


def load_corpus(root: str | Path, limit: int | None = None) -> Corpus:
    """Scan and ingest in one step; ``limit`` truncates after sorting."""
    paths = scan_corpus(root)
    if limit is not None:
        if limit <= 0:
            raise ConfigurationError(f"limit must be positive, got {limit}")
        paths = paths[:limit]
    return load_memory_corpus(root, paths)
