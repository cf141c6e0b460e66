"""Raw result persistence: schema, deterministic serialization, merging.

One file records one run on one platform. Files are the only interface
between measurement and analysis, so the format is versioned, the writer is
deterministic (stable key order, stable float repr) and atomic, and the
reader validates every invariant it can before anything downstream trusts
the data.
"""

from __future__ import annotations

import json
import os
import platform as platform_mod
import sys
import tempfile
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .adapters import AdapterEntry, Skip
from .corpus import Corpus
from .errors import MergeError, ResultFormatError, ResultVersionError
from .loader import CellFailure
from .single_thread import PROTOCOL_SINGLE, ProtocolResult

SCHEMA_VERSION = 1

RESULT_SUFFIX = ".result"


@dataclass(frozen=True)
class PlatformMetadata:
    """Facts about the machine a run executed on."""

    cpu_model: str
    vcpu_count: int
    microarchitecture_label: str
    os_description: str
    runtime_version: str
    machine_type_label: str | None = None
    captured_at: str = ""


@dataclass(frozen=True)
class CorpusSummary:
    item_count: int
    total_bytes: int
    source_label: str


@dataclass(frozen=True)
class AdapterRecord:
    """Adapter facts as persisted with a run."""

    name: str
    backend_version: str
    loader_eligible: bool
    eligibility_reason: str
    strictness_note: str | None
    available: bool
    unavailable_reason: str | None
    thread_control: dict


def record_from_entry(entry: AdapterEntry) -> AdapterRecord:
    d = entry.descriptor
    return AdapterRecord(
        name=d.name,
        backend_version=d.backend_version,
        loader_eligible=d.loader_eligible,
        eligibility_reason=d.eligibility_reason,
        strictness_note=d.strictness_note,
        available=entry.available,
        unavailable_reason=entry.unavailable_reason,
        thread_control=dict(entry.thread_control),
    )


@dataclass(frozen=True)
class BenchmarkResult:
    """Everything one run measured, plus the context needed to interpret it."""

    platform_label: str
    platform: PlatformMetadata
    corpus_summary: CorpusSummary
    run_config: dict
    adapters: tuple[AdapterRecord, ...]
    cells: tuple[ProtocolResult, ...]
    failures: tuple[CellFailure, ...] = field(default_factory=tuple)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not self.platform_label:
            raise ValueError("platform_label must be non-empty")
        names = [record.name for record in self.adapters]
        if len(names) != len(set(names)):
            raise ValueError("duplicate adapter records")
        keys = set()
        for cell in self.cells:
            key = (cell.adapter_name, cell.protocol, cell.worker_count)
            if key in keys:
                raise ValueError(f"duplicate cell {key}")
            keys.add(key)
            if cell.adapter_name not in set(names):
                raise ValueError(
                    f"cell for unrecorded adapter {cell.adapter_name!r}"
                )
            if cell.corpus_size != self.corpus_summary.item_count:
                raise ValueError(
                    f"cell corpus size {cell.corpus_size} != corpus summary "
                    f"{self.corpus_summary.item_count}"
                )


def capture_platform_metadata(
    machine_type_label: str | None = None,
    microarchitecture_label: str | None = None,
) -> PlatformMetadata:
    """Describe the current machine."""
    return PlatformMetadata(
        cpu_model=_cpu_model(),
        vcpu_count=os.cpu_count() or 1,
        microarchitecture_label=microarchitecture_label or platform_mod.machine(),
        os_description=platform_mod.platform(),
        runtime_version=platform_mod.python_version(),
        machine_type_label=machine_type_label,
        captured_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def _cpu_model() -> str:
    if sys.platform.startswith("linux"):
        try:
            with open("/proc/cpuinfo", encoding="utf-8") as stream:
                for line in stream:
                    if line.lower().startswith("model name"):
                        return line.split(":", 1)[1].strip()
        except OSError:
            pass
    return platform_mod.processor() or platform_mod.machine() or "unknown"


def default_platform_label(meta: PlatformMetadata) -> str:
    """Filesystem-safe label derived from CPU model and vCPU count."""
    raw = f"{meta.cpu_model}-{meta.vcpu_count}vcpu".lower()
    out = []
    previous_dash = False
    for ch in raw:
        if ch.isalnum():
            out.append(ch)
            previous_dash = False
        elif not previous_dash:
            out.append("-")
            previous_dash = True
    slug = "".join(out).strip("-")
    return slug[:60].strip("-") or "unknown-platform"


def new_run_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    return f"{stamp}-{uuid.uuid4().hex[:8]}"


def result_path(output_root: str | Path, platform_label: str, run_id: str) -> Path:
    return Path(output_root) / platform_label / f"{run_id}{RESULT_SUFFIX}"


def corpus_summary_of(corpus: Corpus) -> CorpusSummary:
    return CorpusSummary(
        item_count=len(corpus),
        total_bytes=corpus.total_bytes,
        source_label=corpus.source_root,
    )


# ---------------------------------------------------------------------------
# JSON (de)serialization


def _skip_doc(skip: Skip) -> dict:
    return {
        "item_index": skip.item_index,
        "reason": skip.reason,
        "backend_fault": skip.backend_fault,
    }


def _skip_from(doc: dict) -> Skip:
    return Skip(
        reason=doc["reason"],
        item_index=doc["item_index"],
        backend_fault=doc.get("backend_fault", False),
    )


def _cell_doc(cell: ProtocolResult) -> dict:
    return {
        "adapter_name": cell.adapter_name,
        "protocol": cell.protocol,
        "worker_count": cell.worker_count,
        "batch_size": cell.batch_size,
        "repetitions": cell.repetitions,
        "warmup_passes": cell.warmup_passes,
        "corpus_size": cell.corpus_size,
        "decoded_count": cell.decoded_count,
        "wall_times": list(cell.wall_times),
        "samples": list(cell.samples),
        "skips": [_skip_doc(s) for s in cell.skips],
    }


def _cell_from(doc: dict) -> ProtocolResult:
    return ProtocolResult(
        adapter_name=doc["adapter_name"],
        protocol=doc["protocol"],
        worker_count=doc["worker_count"],
        batch_size=doc["batch_size"],
        repetitions=doc["repetitions"],
        warmup_passes=doc["warmup_passes"],
        corpus_size=doc["corpus_size"],
        decoded_count=doc["decoded_count"],
        wall_times=tuple(doc["wall_times"]),
        samples=tuple(doc["samples"]),
        skips=tuple(_skip_from(s) for s in doc["skips"]),
    )


def result_to_doc(result: BenchmarkResult) -> dict:
    return {
        "schema_version": result.schema_version,
        "platform_label": result.platform_label,
        "platform": asdict(result.platform),
        "corpus_summary": asdict(result.corpus_summary),
        "run_config": result.run_config,
        "adapters": [asdict(record) for record in result.adapters],
        "cells": [_cell_doc(cell) for cell in result.cells],
        "failures": [asdict(f) for f in result.failures],
    }


def result_from_doc(doc: dict) -> BenchmarkResult:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ResultVersionError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    try:
        return BenchmarkResult(
            platform_label=doc["platform_label"],
            platform=PlatformMetadata(**doc["platform"]),
            corpus_summary=CorpusSummary(**doc["corpus_summary"]),
            run_config=doc["run_config"],
            adapters=tuple(AdapterRecord(**record) for record in doc["adapters"]),
            cells=tuple(_cell_from(cell) for cell in doc["cells"]),
            failures=tuple(CellFailure(**f) for f in doc.get("failures", [])),
            schema_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ResultFormatError(f"malformed result document: {exc}") from exc


def serialize_result(result: BenchmarkResult) -> str:
    """Deterministic text form: stable key order, stable layout."""
    return json.dumps(result_to_doc(result), sort_keys=True, indent=2) + "\n"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write via a same-directory temp file and rename, so an interrupted
    write never leaves a partial file at the destination."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=path.name + ".", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as stream:
            stream.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return path


def write_result(result: BenchmarkResult, path: str | Path) -> Path:
    """Atomically write one result file (temp file + rename)."""
    return atomic_write_text(path, serialize_result(result))


def read_result(path: str | Path) -> BenchmarkResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ResultFormatError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResultFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ResultFormatError(f"{path}: top level is not an object")
    try:
        return result_from_doc(doc)
    except ResultVersionError as exc:
        raise ResultVersionError(f"{path}: {exc}") from None
    except ResultFormatError as exc:
        raise ResultFormatError(f"{path}: {exc}") from None


def collect_result_paths(paths: Iterable[str | Path]) -> list[Path]:
    """Expand files and directories into a sorted list of result files."""
    collected: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            collected.extend(sorted(path.rglob(f"*{RESULT_SUFFIX}")))
        else:
            collected.append(path)
    return collected


def read_results(paths: Iterable[str | Path]) -> list[BenchmarkResult]:
    files = collect_result_paths(paths)
    if not files:
        raise ResultFormatError("no result files found")
    return [read_result(p) for p in files]


# ---------------------------------------------------------------------------
# Merging


@dataclass
class PlatformData:
    """All cells known for one platform label, merged across files."""

    label: str
    platform: PlatformMetadata
    corpus_summary: CorpusSummary
    run_configs: list[dict]
    adapters: dict[str, AdapterRecord]
    cells: dict[tuple[str, str, int], ProtocolResult]
    failures: list[CellFailure]

    def single_cells(self) -> dict[str, ProtocolResult]:
        return {
            adapter: cell
            for (adapter, protocol, _), cell in sorted(self.cells.items())
            if protocol == PROTOCOL_SINGLE
        }

    def loader_cells(self) -> dict[str, dict[int, ProtocolResult]]:
        sweeps: dict[str, dict[int, ProtocolResult]] = {}
        for (adapter, protocol, workers), cell in sorted(self.cells.items()):
            if protocol != PROTOCOL_SINGLE:
                sweeps.setdefault(adapter, {})[workers] = cell
        return sweeps


@dataclass
class ResultMatrix:
    """Platform-keyed view over every merged cell."""

    platforms: dict[str, PlatformData]

    def labels(self) -> list[str]:
        return sorted(self.platforms)


def merge_platform_results(results: Sequence[BenchmarkResult]) -> ResultMatrix:
    """Merge result files into one matrix, rejecting conflicts loudly.

    Files sharing a platform label must agree on corpus and adapter
    metadata and must not measure the same cell twice. Across platforms the
    corpus must be the same size, or cross-platform comparisons would be
    meaningless.
    """
    if not results:
        raise MergeError("nothing to merge")
    platforms: dict[str, PlatformData] = {}
    for result in results:
        label = result.platform_label
        data = platforms.get(label)
        if data is None:
            data = PlatformData(
                label=label,
                platform=result.platform,
                corpus_summary=result.corpus_summary,
                run_configs=[],
                adapters={},
                cells={},
                failures=[],
            )
            platforms[label] = data
        if result.corpus_summary.item_count != data.corpus_summary.item_count or (
            result.corpus_summary.total_bytes != data.corpus_summary.total_bytes
        ):
            raise MergeError(
                f"{label}: result files disagree on the corpus "
                f"({result.corpus_summary} vs {data.corpus_summary})"
            )
        if result.run_config not in data.run_configs:
            data.run_configs.append(result.run_config)
        for record in result.adapters:
            known = data.adapters.get(record.name)
            if known is None:
                data.adapters[record.name] = record
            elif known != record:
                raise MergeError(
                    f"{label}: conflicting metadata for adapter {record.name!r}"
                )
        for cell in result.cells:
            key = (cell.adapter_name, cell.protocol, cell.worker_count)
            if key in data.cells:
                raise MergeError(f"{label}: duplicate cell {key}")
            data.cells[key] = cell
        data.failures.extend(result.failures)

    sizes = {d.corpus_summary.item_count for d in platforms.values()}
    if len(sizes) > 1:
        raise MergeError(
            f"platforms disagree on corpus size: {sorted(sizes)}; "
            f"cross-platform comparison requires one corpus"
        )
    return ResultMatrix(platforms=dict(sorted(platforms.items())))
