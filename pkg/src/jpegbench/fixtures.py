"""Synthetic corpora and synthetic adapters.

Real-world JPEG corpora contain rare variants that strict decoders refuse;
reproducing that behavior on demand needs a planted trigger. The trick: a
JPEG comment (COM) segment is ignored by every real decoder, so inserting
one right after the SOI marker plants a byte token that leaves the image
decodable everywhere while a synthetic "strict" adapter can detect the
token and cleanly reject the item, exactly like a strict backend meeting a
rare variant.

Also provides deterministic fixture image generation and cheap in-memory
corpora for protocol tests that never touch a real decoder.
"""

from __future__ import annotations

import argparse
import io
import os
import time

import numpy as np

from .adapters import AdapterDescriptor, ELIGIBLE
from .corpus import Corpus, CorpusItem, SOI_MARKER

STRICT_MARKER = b"x-rare-variant-token"
KILL_MARKER = b"x-worker-kill-token"

PURE_RED_INDEX = 3
REJECT_INDEX = 7
GRAY_INDEX = 11


def insert_jpeg_comment(data: bytes, payload: bytes) -> bytes:
    """Insert a COM segment directly after SOI; decoders ignore it."""
    if data[:2] != SOI_MARKER:
        raise ValueError("not a JPEG stream")
    if len(payload) + 2 > 0xFFFF:
        raise ValueError("comment payload too large")
    segment = b"\xff\xfe" + (len(payload) + 2).to_bytes(2, "big") + payload
    return data[:2] + segment + data[2:]


def encode_rgb_jpeg(array: np.ndarray, quality: int = 85) -> bytes:
    from PIL import Image

    out = io.BytesIO()
    Image.fromarray(array, mode="RGB").save(out, format="JPEG", quality=quality)
    return out.getvalue()


def encode_gray_jpeg(array: np.ndarray, quality: int = 85) -> bytes:
    from PIL import Image

    out = io.BytesIO()
    Image.fromarray(array, mode="L").save(out, format="JPEG", quality=quality)
    return out.getvalue()


def pure_red_image(height: int = 48, width: int = 64) -> np.ndarray:
    array = np.zeros((height, width, 3), dtype=np.uint8)
    array[:, :, 0] = 255
    return array


def _fixture_image(index: int, seed: int) -> np.ndarray:
    # Sizes vary so batches collate images of different pixel counts.
    height = 48 + 4 * (index % 5)
    width = 64 + 8 * (index % 3)
    rng = np.random.default_rng(seed + index)
    yy = np.linspace(0, 255, height, dtype=np.float64)[:, None]
    xx = np.linspace(0, 255, width, dtype=np.float64)[None, :]
    base = np.stack(
        [
            (yy + xx) / 2,
            np.broadcast_to(yy, (height, width)),
            np.broadcast_to(xx, (height, width)),
        ],
        axis=2,
    )
    noise = rng.normal(0.0, 12.0, size=(height, width, 3))
    return np.clip(base + noise, 0, 255).astype(np.uint8)


def write_fixture_corpus(
    root,
    count: int = 20,
    seed: int = 2024,
    reject_index: int | None = REJECT_INDEX,
    red_index: int | None = PURE_RED_INDEX,
    gray_index: int | None = GRAY_INDEX,
) -> list[str]:
    """Write a deterministic JPEG corpus under ``root``.

    One item is pure red (channel-order sentinel), one is grayscale-encoded,
    and one carries the planted rare-variant token. Returns the relative
    file names in corpus order.
    """
    from pathlib import Path

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    names = []
    for index in range(count):
        if red_index is not None and index == red_index:
            data = encode_rgb_jpeg(pure_red_image(), quality=95)
        elif gray_index is not None and index == gray_index and index < count:
            data = encode_gray_jpeg(_fixture_image(index, seed)[:, :, 0])
        else:
            data = encode_rgb_jpeg(_fixture_image(index, seed))
        if reject_index is not None and index == reject_index:
            data = insert_jpeg_comment(data, STRICT_MARKER)
        name = f"img_{index:03d}.jpg"
        (root / name).write_bytes(data)
        names.append(name)
    return names


def make_synthetic_corpus(
    count: int,
    marked_indices: dict[int, bytes] | None = None,
    payload_size: int = 24,
) -> Corpus:
    """In-memory corpus of SOI-prefixed pseudo-JPEG payloads.

    Only synthetic adapters can decode these; protocol tests use them to
    exercise timing, partitioning, and skip accounting without real decode
    cost. ``marked_indices`` plants byte tokens at chosen positions.
    """
    marked = marked_indices or {}
    items = []
    for index in range(count):
        payload = SOI_MARKER + index.to_bytes(4, "big")
        payload += bytes((index + offset) % 256 for offset in range(payload_size))
        if index in marked:
            payload += marked[index]
        items.append(
            CorpusItem(index=index, relative_path=f"item_{index:05d}.jpg", data=payload)
        )
    return Corpus(source_root="synthetic", items=tuple(items))


def make_descriptor(
    name: str,
    eligibility_reason: str = ELIGIBLE,
    strictness_note: str | None = None,
    version: str = "synthetic",
) -> AdapterDescriptor:
    return AdapterDescriptor(
        name=name,
        backend_version=version,
        loader_eligible=eligibility_reason == ELIGIBLE,
        eligibility_reason=eligibility_reason,
        strictness_note=strictness_note,
    )


def make_strict_decode(marker: bytes = STRICT_MARKER):
    """Pillow-backed decode that cleanly rejects token-marked items."""
    from PIL import Image

    def decode(data: bytes) -> np.ndarray:
        if marker in data:
            raise ValueError("unsupported rare JPEG variant")
        image = Image.open(io.BytesIO(data))
        if image.mode != "RGB":
            image = image.convert("RGB")
        return np.asarray(image)

    return decode


def make_sleep_decode(
    delay_seconds: float = 0.001,
    shape: tuple[int, int] = (16, 16),
    reject_marker: bytes | None = None,
):
    """Fixed-cost decode: sleeps, then returns a constant RGB image.

    Ignores the payload (an optional marker still triggers rejection), so
    loader-scaling behavior can be measured without a real backend.
    """
    template = np.full(shape + (3,), 127, dtype=np.uint8)

    def decode(data: bytes) -> np.ndarray:
        if reject_marker is not None and reject_marker in data:
            raise ValueError("marked item rejected")
        time.sleep(delay_seconds)
        return template

    return decode


def make_kill_decode(marker: bytes = KILL_MARKER, exit_code: int = 13):
    """Decode that hard-kills its process on a token-marked item.

    Simulates a worker dying mid-epoch; os._exit bypasses all exception
    handling, like a native crash would.
    """
    template = np.full((8, 8, 3), 64, dtype=np.uint8)

    def decode(data: bytes) -> np.ndarray:
        if marker in data:
            os._exit(exit_code)
        return template

    return decode


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="write a synthetic JPEG corpus")
    parser.add_argument("outdir")
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args(argv)
    names = write_fixture_corpus(args.outdir, count=args.count, seed=args.seed)
    print(f"wrote {len(names)} files under {args.outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
