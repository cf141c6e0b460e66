"""Worker-parallel loader protocol.

Models the decode stage of a training input pipeline: W forked worker
processes each decode a contiguous slice of the corpus, assemble fixed-size
batches, and push them through a bounded queue that the parent consumes.
W=0 degenerates to inline loading in the parent process (the no-pool
baseline every speedup is quoted against).

The timed window spans pool creation to the consumption of the final
message, so worker startup is part of every epoch by construction; pools
are never reused across epochs. Worker death surfaces as a cell-level
failure, never a hang.
"""

from __future__ import annotations

import multiprocessing
import queue as queue_mod
import time
import traceback
from dataclasses import dataclass

import numpy as np

from .adapters import AdapterEntry, Skip, decode_one
from .corpus import Corpus, CorpusItem
from .errors import (
    ConfigurationError,
    IntegrityError,
    ProtocolError,
    WorkerFailureError,
)
from .single_thread import (
    PROTOCOL_LOADER,
    ProtocolResult,
    check_skip_consistency,
)

QUEUE_DEPTH_PER_WORKER = 2

# How long the consumer waits on an empty queue before poking worker
# liveness, and how long it grants a dead worker's last messages to drain.
_POLL_SECONDS = 0.2
_DRAIN_SECONDS = 1.0


@dataclass(frozen=True)
class LoaderRunConfig:
    """Loader protocol knobs; worker_counts=0 rows are the inline baseline."""

    worker_counts: tuple[int, ...] = (0, 2, 4, 8)
    batch_size: int = 32
    repetitions: int = 3
    warmup_passes: int = 1

    def __post_init__(self):
        if not self.worker_counts:
            raise ConfigurationError("worker_counts must be non-empty")
        counts = list(self.worker_counts)
        if counts != sorted(set(counts)) or counts[0] < 0:
            raise ConfigurationError(
                f"worker_counts must be unique, sorted, non-negative: {counts}"
            )
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.repetitions < 1:
            raise ConfigurationError(
                f"repetitions must be >= 1, got {self.repetitions}"
            )
        if self.warmup_passes < 0:
            raise ConfigurationError(
                f"warmup_passes must be >= 0, got {self.warmup_passes}"
            )


@dataclass(frozen=True)
class CellFailure:
    """A cell that could not be measured; recorded, not fatal to the run."""

    adapter_name: str
    protocol: str
    worker_count: int
    error: str


def partition_indices(total: int, workers: int) -> list[range]:
    """Split [0, total) into ``workers`` contiguous ranges, sizes within 1."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return [
        range((total * i) // workers, (total * (i + 1)) // workers)
        for i in range(workers)
    ]


def assemble_batch(images: list[np.ndarray]) -> np.ndarray:
    """Collate decoded images into one contiguous 1-D uint8 buffer."""
    return np.concatenate([image.reshape(-1) for image in images])


def _worker_main(worker_id, entry, items, batch_size, out_queue):
    # Runs in a forked child; the corpus slice arrived by inheritance,
    # not pickling. Any unhandled error is reported before exiting.
    try:
        pending: list[np.ndarray] = []
        skips: list[Skip] = []
        for item in items:
            out = decode_one(entry, item)
            if isinstance(out, Skip):
                skips.append(out)
                continue
            pending.append(out.pixels)
            if len(pending) == batch_size:
                out_queue.put(("batch", worker_id, len(pending), assemble_batch(pending)))
                pending = []
        if pending:
            out_queue.put(("batch", worker_id, len(pending), assemble_batch(pending)))
        out_queue.put(("done", worker_id, skips))
    except BaseException:
        out_queue.put(("error", worker_id, traceback.format_exc()))


def _run_inline(entry: AdapterEntry, items, batch_size: int):
    """W=0 baseline: decode, collate, and consume in the parent process."""
    decoded = 0
    skips: list[Skip] = []
    pending: list[np.ndarray] = []
    start = time.perf_counter()
    for item in items:
        out = decode_one(entry, item)
        if isinstance(out, Skip):
            skips.append(out)
            continue
        pending.append(out.pixels)
        if len(pending) == batch_size:
            batch = assemble_batch(pending)
            decoded += len(pending)
            del batch
            pending = []
    if pending:
        batch = assemble_batch(pending)
        decoded += len(pending)
        del batch
    wall = time.perf_counter() - start
    return wall, decoded, skips


def run_loader_once(
    entry: AdapterEntry, corpus: Corpus, workers: int, batch_size: int
) -> tuple[float, int, list[Skip]]:
    """One timed loader epoch. Returns (wall_seconds, decoded, skips)."""
    items = corpus.items
    if workers == 0:
        wall, decoded, skips = _run_inline(entry, items, batch_size)
    else:
        wall, decoded, skips = _run_pool(entry, items, workers, batch_size)
    if decoded == 0:
        raise ProtocolError(
            f"all_skipped: adapter {entry.descriptor.name!r} decoded nothing "
            f"under the loader protocol"
        )
    if decoded + len(skips) != len(items):
        raise IntegrityError(
            f"loader epoch accounted for {decoded} decodes + {len(skips)} skips "
            f"out of {len(items)} items"
        )
    skips.sort(key=lambda s: s.item_index)
    return wall, decoded, skips


def _run_pool(entry: AdapterEntry, items: tuple[CorpusItem, ...], workers, batch_size):
    ctx = multiprocessing.get_context("fork")
    out_queue = ctx.Queue(maxsize=QUEUE_DEPTH_PER_WORKER * workers)
    slices = partition_indices(len(items), workers)

    start = time.perf_counter()
    procs = []
    for worker_id, span in enumerate(slices):
        proc = ctx.Process(
            target=_worker_main,
            args=(worker_id, entry, items[span.start : span.stop], batch_size, out_queue),
            daemon=True,
        )
        proc.start()
        procs.append(proc)

    decoded = 0
    skips: list[Skip] = []
    pending = set(range(workers))
    try:
        while pending:
            try:
                message = out_queue.get(timeout=_POLL_SECONDS)
            except queue_mod.Empty:
                dead = [w for w in sorted(pending) if procs[w].exitcode is not None]
                if not dead:
                    continue
                # A finished worker's last messages may still be in flight;
                # grant one drain window before declaring failure.
                try:
                    message = out_queue.get(timeout=_DRAIN_SECONDS)
                except queue_mod.Empty:
                    worker_id = dead[0]
                    raise WorkerFailureError(
                        f"worker_failure: worker {worker_id} exited with code "
                        f"{procs[worker_id].exitcode} before reporting completion",
                        worker_id=worker_id,
                    ) from None
            kind = message[0]
            if kind == "batch":
                _, _, count, _buffer = message
                decoded += count
            elif kind == "done":
                _, worker_id, worker_skips = message
                skips.extend(worker_skips)
                pending.discard(worker_id)
            elif kind == "error":
                _, worker_id, text = message
                raise WorkerFailureError(
                    f"worker_failure: worker {worker_id} raised:\n{text}",
                    worker_id=worker_id,
                )
            else:
                raise ProtocolError(f"unexpected loader message {kind!r}")
        wall = time.perf_counter() - start
    finally:
        for proc in procs:
            if proc.is_alive():
                proc.terminate()
            proc.join(timeout=5)
        out_queue.close()

    return wall, decoded, skips


def run_loader_cell(
    entry: AdapterEntry,
    corpus: Corpus,
    workers: int,
    config: LoaderRunConfig,
) -> ProtocolResult:
    """Measure one (adapter, worker count) loader cell."""
    name = entry.descriptor.name
    context = f"{name} loader w={workers}"

    reference: list[Skip] | None = None
    for _ in range(config.warmup_passes):
        _, _, skips = run_loader_once(entry, corpus, workers, config.batch_size)
        if reference is None:
            reference = skips
        else:
            check_skip_consistency(reference, skips, context + " warmup")

    walls: list[float] = []
    decoded_count = 0
    for _ in range(config.repetitions):
        wall, decoded, skips = run_loader_once(entry, corpus, workers, config.batch_size)
        if reference is None:
            reference = skips
        else:
            check_skip_consistency(reference, skips, context)
        decoded_count = decoded
        walls.append(wall)

    return ProtocolResult(
        adapter_name=name,
        protocol=PROTOCOL_LOADER,
        worker_count=workers,
        batch_size=config.batch_size,
        repetitions=config.repetitions,
        warmup_passes=config.warmup_passes,
        corpus_size=len(corpus),
        decoded_count=decoded_count,
        wall_times=tuple(walls),
        samples=tuple(decoded_count / wall for wall in walls),
        skips=tuple(sorted(reference or [], key=lambda s: s.item_index)),
    )


def run_loader_sweep(
    entry: AdapterEntry, corpus: Corpus, config: LoaderRunConfig | None = None
) -> tuple[list[ProtocolResult], list[CellFailure]]:
    """Run every worker count in the sweep; cell failures do not stop it.

    Returns the measured cells plus explicit failure records for cells that
    raised, so partial sweeps stay auditable.
    """
    config = config or LoaderRunConfig()
    if not entry.available:
        raise ConfigurationError(
            f"adapter {entry.descriptor.name!r} is unavailable: "
            f"{entry.unavailable_reason}"
        )
    if not entry.descriptor.loader_eligible:
        raise ConfigurationError(
            f"adapter {entry.descriptor.name!r} is not loader-eligible "
            f"({entry.descriptor.eligibility_reason})"
        )

    results: list[ProtocolResult] = []
    failures: list[CellFailure] = []
    for workers in config.worker_counts:
        try:
            results.append(run_loader_cell(entry, corpus, workers, config))
        except (ProtocolError, IntegrityError) as exc:
            failures.append(
                CellFailure(
                    adapter_name=entry.descriptor.name,
                    protocol=PROTOCOL_LOADER,
                    worker_count=workers,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return results, failures
