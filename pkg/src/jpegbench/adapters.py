"""Adapter model: named decode paths behind a uniform bytes-to-RGB contract.

An adapter owns one backend decode call plus the layout fix-up needed to
turn its native output into an (H, W, 3) uint8 RGB array. Strict backends
that refuse uncommon-but-valid JPEG variants are first-class citizens: a
clean rejection becomes a Skip record, never a crash, so robustness can be
measured instead of hidden.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import ConfigurationError

ELIGIBLE = "eligible"
NOT_PROCESS_SAFE = "not_process_safe"
SEPARATE_PIPELINE_STACK = "separate_pipeline_stack"

ELIGIBILITY_REASONS = (ELIGIBLE, NOT_PROCESS_SAFE, SEPARATE_PIPELINE_STACK)

# Layouts an adapter may declare for its backend's native output.
KNOWN_LAYOUTS = ("rgb", "bgr", "gray")

BACKEND_FAULT = "backend_fault"

# Exception types that indicate the backend misbehaved rather than
# declined the input.
_FAULT_EXCEPTIONS = (MemoryError, SystemError)


@dataclass(frozen=True)
class AdapterDescriptor:
    """Identity and policy facts about one decode path."""

    name: str
    backend_version: str
    loader_eligible: bool
    eligibility_reason: str
    strictness_note: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("adapter name must be non-empty")
        if self.eligibility_reason not in ELIGIBILITY_REASONS:
            raise ValueError(
                f"{self.name}: unknown eligibility reason {self.eligibility_reason!r}"
            )
        if self.loader_eligible != (self.eligibility_reason == ELIGIBLE):
            raise ValueError(
                f"{self.name}: loader_eligible must hold exactly when the "
                f"eligibility reason is {ELIGIBLE!r}"
            )


@dataclass(frozen=True)
class DecodedImage:
    """Normalized decode output: (H, W, 3) uint8 RGB, C-contiguous."""

    pixels: np.ndarray = field(repr=False)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


@dataclass(frozen=True)
class Skip:
    """A per-item decode refusal, attributable and auditable."""

    reason: str
    item_index: int
    backend_fault: bool = False


class UnsupportedLayoutError(Exception):
    """Backend output cannot be normalized to RGB8; internal signal only."""


def normalize_to_rgb8(raw: np.ndarray, source_layout: str) -> np.ndarray:
    """Convert a backend's native array to contiguous (H, W, 3) uint8 RGB.

    Grayscale is replicated across channels, BGR is reversed, an alpha
    channel is dropped. RGB input that is already contiguous uint8 passes
    through untouched. Anything else raises UnsupportedLayoutError.
    """
    if not isinstance(raw, np.ndarray):
        raise UnsupportedLayoutError(f"expected ndarray, got {type(raw).__name__}")
    if raw.dtype != np.uint8:
        raise UnsupportedLayoutError(f"expected uint8, got {raw.dtype}")

    if source_layout == "gray":
        if raw.ndim == 3 and raw.shape[2] == 1:
            raw = raw[:, :, 0]
        if raw.ndim != 2:
            raise UnsupportedLayoutError(f"gray layout with shape {raw.shape}")
        return np.ascontiguousarray(np.repeat(raw[:, :, None], 3, axis=2))

    if raw.ndim != 3:
        raise UnsupportedLayoutError(f"{source_layout} layout with shape {raw.shape}")
    channels = raw.shape[2]
    if source_layout == "rgb":
        if channels == 3:
            return np.ascontiguousarray(raw)
        if channels == 4:
            return np.ascontiguousarray(raw[:, :, :3])
    elif source_layout == "bgr":
        if channels == 3:
            return np.ascontiguousarray(raw[:, :, ::-1])
        if channels == 4:
            return np.ascontiguousarray(raw[:, :, 2::-1])
    else:
        raise UnsupportedLayoutError(f"unknown layout {source_layout!r}")
    raise UnsupportedLayoutError(f"{source_layout} layout with {channels} channels")


def _effective_layout(raw: np.ndarray, declared: str) -> str:
    # 2-D (or single-channel 3-D) output means the backend collapsed a
    # grayscale JPEG regardless of its declared color layout.
    if isinstance(raw, np.ndarray) and (
        raw.ndim == 2 or (raw.ndim == 3 and raw.shape[-1] == 1)
    ):
        return "gray"
    return declared


DecodeFn = Callable[[bytes], np.ndarray]


@dataclass
class AdapterEntry:
    """Registry slot: descriptor plus runtime state for one adapter.

    ``available`` is resolved at registration (direct registration) or on
    first use (lazy registration of optional backends). An unavailable
    backend is an inert, listable entry, not an error.
    """

    descriptor: AdapterDescriptor
    decode: DecodeFn | None
    layout: str = "rgb"
    available: bool = True
    unavailable_reason: str | None = None
    thread_control: dict = field(default_factory=dict)
    _factory: Callable[[], "Binding"] | None = field(default=None, repr=False)
    _probed: bool = field(default=True, repr=False)

    def ensure_probed(self) -> "AdapterEntry":
        if self._probed:
            return self
        self._probed = True
        try:
            binding = self._factory()
        except Exception as exc:
            self.available = False
            self.unavailable_reason = f"{type(exc).__name__}: {exc}"
            return self
        self.decode = binding.decode
        self.layout = binding.layout
        self.available = True
        self.thread_control = dict(binding.thread_control)
        self.descriptor = dataclasses.replace(
            self.descriptor, backend_version=binding.version
        )
        return self


@dataclass(frozen=True)
class Binding:
    """What a backend factory hands back once its import succeeded."""

    decode: DecodeFn
    layout: str
    version: str
    thread_control: dict = field(default_factory=dict)


class AdapterRegistry:
    """Named collection of adapters; names are unique, lookups sorted."""

    def __init__(self):
        self._entries: dict[str, AdapterEntry] = {}

    def register(
        self,
        descriptor: AdapterDescriptor,
        decode: DecodeFn,
        layout: str = "rgb",
        thread_control: dict | None = None,
    ) -> AdapterEntry:
        """Register an importable adapter under a unique name."""
        if layout not in KNOWN_LAYOUTS:
            raise ConfigurationError(f"unknown layout {layout!r}")
        entry = AdapterEntry(
            descriptor=descriptor,
            decode=decode,
            layout=layout,
            thread_control=dict(thread_control or {}),
        )
        self._add(entry)
        return entry

    def register_lazy(
        self,
        name: str,
        eligibility_reason: str,
        factory: Callable[[], Binding],
        strictness_note: str | None = None,
    ) -> AdapterEntry:
        """Register an optional backend probed on first use.

        A factory that raises marks the entry unavailable with the failure
        reason instead of failing the program.
        """
        descriptor = AdapterDescriptor(
            name=name,
            backend_version="unprobed",
            loader_eligible=eligibility_reason == ELIGIBLE,
            eligibility_reason=eligibility_reason,
            strictness_note=strictness_note,
        )
        entry = AdapterEntry(
            descriptor=descriptor,
            decode=None,
            _factory=factory,
            _probed=False,
        )
        self._add(entry)
        return entry

    def _add(self, entry: AdapterEntry):
        name = entry.descriptor.name
        if name in self._entries:
            raise ConfigurationError(f"adapter {name!r} is already registered")
        self._entries[name] = entry

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def names(self) -> list[str]:
        return sorted(self._entries)

    def get(self, name: str) -> AdapterEntry:
        try:
            entry = self._entries[name]
        except KeyError:
            raise ConfigurationError(f"unknown adapter {name!r}") from None
        return entry.ensure_probed()

    def entries(self) -> Iterator[AdapterEntry]:
        for name in self.names():
            yield self.get(name)

    def available_entries(self) -> Iterator[AdapterEntry]:
        for entry in self.entries():
            if entry.available:
                yield entry


def decode_one(entry: AdapterEntry, item) -> DecodedImage | Skip:
    """Decode one corpus item through one adapter; never raises for bad input.

    Backend exceptions are clean rejections (Skip carrying the backend's
    message). Structurally invalid outputs and backend fault exceptions
    become Skip records flagged as backend faults so they can be told apart
    from honest strictness.
    """
    if not entry.available:
        raise ConfigurationError(
            f"adapter {entry.descriptor.name!r} is unavailable: "
            f"{entry.unavailable_reason}"
        )
    try:
        raw = entry.decode(item.data)
    except _FAULT_EXCEPTIONS as exc:
        return Skip(
            reason=f"{BACKEND_FAULT}: {type(exc).__name__}: {exc}",
            item_index=item.index,
            backend_fault=True,
        )
    except Exception as exc:
        message = str(exc).strip() or type(exc).__name__
        return Skip(reason=_clip(message), item_index=item.index)
    try:
        pixels = normalize_to_rgb8(raw, _effective_layout(raw, entry.layout))
    except UnsupportedLayoutError as exc:
        return Skip(
            reason=f"{BACKEND_FAULT}: {exc}",
            item_index=item.index,
            backend_fault=True,
        )
    return DecodedImage(pixels=pixels)


def _clip(message: str, limit: int = 200) -> str:
    return message if len(message) <= limit else message[: limit - 3] + "..."
