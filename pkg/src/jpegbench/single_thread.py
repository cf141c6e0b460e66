"""Isolated single-thread decode protocol.

One adapter decodes the whole memory-resident corpus on the calling
thread. A pass is timed end to end with perf_counter; throughput for the
pass is decoded_count / wall_seconds, so skipped items sit inside the
timed denominator but never in the numerator. Skip sets must be identical
across every pass of a run or the run is rejected outright.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .adapters import AdapterEntry, Skip, decode_one
from .corpus import Corpus
from .errors import ConfigurationError, IntegrityError, ProtocolError

PROTOCOL_SINGLE = "single_thread"
PROTOCOL_LOADER = "loader"

PROTOCOLS = (PROTOCOL_SINGLE, PROTOCOL_LOADER)

# worker_count carried by single-thread results, where the notion of a
# worker pool does not apply.
NO_WORKERS = -1


@dataclass(frozen=True)
class RunConfig:
    """Single-thread protocol knobs."""

    repetitions: int = 3
    warmup_passes: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigurationError(
                f"repetitions must be >= 1, got {self.repetitions}"
            )
        if self.warmup_passes < 0:
            raise ConfigurationError(
                f"warmup_passes must be >= 0, got {self.warmup_passes}"
            )


@dataclass(frozen=True)
class ProtocolResult:
    """One fully-measured cell: an adapter under one protocol setting.

    Invariants are enforced at construction so a result object is valid
    wherever it came from (a live run or a deserialized file).
    """

    adapter_name: str
    protocol: str
    worker_count: int
    batch_size: int | None
    repetitions: int
    warmup_passes: int
    corpus_size: int
    decoded_count: int
    wall_times: tuple[float, ...]
    samples: tuple[float, ...]
    skips: tuple[Skip, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.protocol == PROTOCOL_SINGLE and self.worker_count != NO_WORKERS:
            raise ValueError(
                f"single-thread results must carry worker_count={NO_WORKERS}"
            )
        if self.protocol == PROTOCOL_LOADER and self.worker_count < 0:
            raise ValueError("loader results must carry worker_count >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if len(self.wall_times) != self.repetitions:
            raise ValueError(
                f"{len(self.wall_times)} wall times for {self.repetitions} repetitions"
            )
        if len(self.samples) != self.repetitions:
            raise ValueError(
                f"{len(self.samples)} samples for {self.repetitions} repetitions"
            )
        if self.decoded_count < 1:
            raise ValueError("decoded_count must be >= 1")
        if self.decoded_count + len(self.skips) != self.corpus_size:
            raise ValueError(
                f"decoded_count {self.decoded_count} + {len(self.skips)} skips "
                f"!= corpus size {self.corpus_size}"
            )
        for wall in self.wall_times:
            if not (wall > 0.0 and math.isfinite(wall)):
                raise ValueError(f"wall time must be finite and positive, got {wall}")
        for wall, sample in zip(self.wall_times, self.samples):
            if not (sample > 0.0 and math.isfinite(sample)):
                raise ValueError(f"sample must be finite and positive, got {sample}")
            if not math.isclose(sample, self.decoded_count / wall, rel_tol=1e-9):
                raise ValueError(
                    f"sample {sample} inconsistent with decoded/wall "
                    f"{self.decoded_count / wall}"
                )
        indices = [skip.item_index for skip in self.skips]
        if indices != sorted(set(indices)):
            raise ValueError("skip records must be unique and sorted by item index")
        if indices and not (0 <= indices[0] and indices[-1] < self.corpus_size):
            raise ValueError("skip index out of corpus range")

    @property
    def skipped_indices(self) -> tuple[int, ...]:
        return tuple(skip.item_index for skip in self.skips)


def time_full_pass(entry: AdapterEntry, corpus: Corpus) -> tuple[float, int, list[Skip]]:
    """Time one full decode pass over the corpus.

    Returns (wall_seconds, decoded_count, skips). Decoded outputs get a
    shape-only validity check inside the timed region; a pass in which
    every item is skipped is a protocol failure.
    """
    skips: list[Skip] = []
    decoded = 0
    start = time.perf_counter()
    for item in corpus.items:
        out = decode_one(entry, item)
        if isinstance(out, Skip):
            skips.append(out)
            continue
        shape = out.pixels.shape
        if shape[0] < 1 or shape[1] < 1:
            skips.append(
                Skip(
                    reason=f"backend_fault: degenerate shape {shape}",
                    item_index=item.index,
                    backend_fault=True,
                )
            )
            continue
        decoded += 1
    wall = time.perf_counter() - start
    if decoded == 0:
        raise ProtocolError(
            f"all_skipped: adapter {entry.descriptor.name!r} decoded nothing "
            f"({len(skips)} skips)"
        )
    return wall, decoded, skips


def check_skip_consistency(
    reference: list[Skip], observed: list[Skip], context: str
) -> None:
    """Raise IntegrityError when two passes disagree on what was skipped."""
    ref = {s.item_index for s in reference}
    obs = {s.item_index for s in observed}
    if ref != obs:
        extra = sorted(obs - ref)
        missing = sorted(ref - obs)
        raise IntegrityError(
            f"{context}: skip sets differ between passes "
            f"(new: {extra}, vanished: {missing})"
        )


def run_single_thread(
    entry: AdapterEntry, corpus: Corpus, config: RunConfig | None = None
) -> ProtocolResult:
    """Run the single-thread protocol for one adapter over one corpus."""
    config = config or RunConfig()
    if not entry.available:
        raise ConfigurationError(
            f"adapter {entry.descriptor.name!r} is unavailable: "
            f"{entry.unavailable_reason}"
        )
    name = entry.descriptor.name

    reference: list[Skip] | None = None
    for _ in range(config.warmup_passes):
        _, _, skips = time_full_pass(entry, corpus)
        if reference is None:
            reference = skips
        else:
            check_skip_consistency(reference, skips, f"{name} single_thread warmup")

    walls: list[float] = []
    decoded_count = 0
    for _ in range(config.repetitions):
        wall, decoded, skips = time_full_pass(entry, corpus)
        if reference is None:
            reference = skips
        else:
            check_skip_consistency(reference, skips, f"{name} single_thread")
        decoded_count = decoded
        walls.append(wall)

    skips_sorted = tuple(sorted(reference or [], key=lambda s: s.item_index))
    return ProtocolResult(
        adapter_name=name,
        protocol=PROTOCOL_SINGLE,
        worker_count=NO_WORKERS,
        batch_size=None,
        repetitions=config.repetitions,
        warmup_passes=config.warmup_passes,
        corpus_size=len(corpus),
        decoded_count=decoded_count,
        wall_times=tuple(walls),
        samples=tuple(decoded_count / wall for wall in walls),
        skips=skips_sorted,
    )
