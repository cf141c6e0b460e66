"""Built-in decoder bindings for the thirteen named decode paths.

Each binding is registered lazily: the backend is imported and smoke-tested
on first use, and a backend that is missing (or imports but cannot decode a
known-good JPEG) is recorded as unavailable with the failure reason instead
of failing the program. This keeps one registry definition valid on hosts
where only a subset of the backends is installed.

Backend-internal thread pools are capped through whatever control each
backend exposes; the attempted cap and an ``uncontrolled`` flag are recorded
per adapter so measurements stay interpretable where no control exists.
"""

from __future__ import annotations

import functools
import importlib.metadata
import io
import os

import numpy as np

from .adapters import (
    ELIGIBLE,
    NOT_PROCESS_SAFE,
    SEPARATE_PIPELINE_STACK,
    AdapterRegistry,
    Binding,
    UnsupportedLayoutError,
    _effective_layout,
    normalize_to_rgb8,
)

THREADS_ENV = "JPEGBENCH_BACKEND_THREADS"

STRICT_NOTE = "strict: cleanly rejects rare JPEG variants instead of decoding them"


def backend_thread_cap() -> int:
    """Requested per-backend thread cap (default 1, overridable via env)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def _version(module, dist_name: str) -> str:
    version = getattr(module, "__version__", None)
    if version:
        return str(version)
    try:
        return importlib.metadata.version(dist_name)
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


@functools.lru_cache(maxsize=1)
def _smoke_jpeg() -> bytes:
    """Tiny known-good JPEG used to verify a binding actually decodes."""
    from PIL import Image

    arr = np.zeros((8, 8, 3), dtype=np.uint8)
    arr[:, :, 0] = 255
    out = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(out, format="JPEG", quality=90)
    return out.getvalue()


def _smoke_test(binding: Binding) -> Binding:
    raw = binding.decode(_smoke_jpeg())
    pixels = normalize_to_rgb8(raw, _effective_layout(raw, binding.layout))
    if pixels.shape != (8, 8, 3):
        raise UnsupportedLayoutError(f"smoke decode produced shape {pixels.shape}")
    return binding


def _control(requested: int, mechanism: str, uncontrolled: bool) -> dict:
    return {
        "requested": requested,
        "mechanism": mechanism,
        "uncontrolled": uncontrolled,
    }


def _bind_pillow(threads: int) -> Binding:
    import PIL
    from PIL import Image

    def decode(data: bytes) -> np.ndarray:
        image = Image.open(io.BytesIO(data))
        if image.mode != "RGB":
            image = image.convert("RGB")
        return np.asarray(image)

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(PIL, "Pillow"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_opencv(threads: int) -> Binding:
    import cv2

    cv2.setNumThreads(threads)

    def decode(data: bytes) -> np.ndarray:
        arr = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_COLOR)
        if arr is None:
            raise ValueError("imdecode returned no image")
        return arr

    return _smoke_test(
        Binding(
            decode=decode,
            layout="bgr",
            version=_version(cv2, "opencv-python-headless"),
            thread_control=_control(threads, "cv2.setNumThreads", False),
        )
    )


def _bind_skimage(threads: int) -> Binding:
    import skimage
    import skimage.io

    def decode(data: bytes) -> np.ndarray:
        return skimage.io.imread(io.BytesIO(data))

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(skimage, "scikit-image"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_imageio(threads: int) -> Binding:
    import imageio
    import imageio.v3 as iio

    def decode(data: bytes) -> np.ndarray:
        return iio.imread(data, extension=".jpg")

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(imageio, "imageio"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_torchvision(threads: int) -> Binding:
    import torch
    import torchvision
    from torchvision.io import ImageReadMode, decode_jpeg

    torch.set_num_threads(threads)

    def decode(data: bytes) -> np.ndarray:
        buf = torch.frombuffer(bytearray(data), dtype=torch.uint8)
        chw = decode_jpeg(buf, mode=ImageReadMode.RGB)
        return chw.permute(1, 2, 0).numpy()

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(torchvision, "torchvision"),
            thread_control=_control(threads, "torch.set_num_threads", False),
        )
    )


def _bind_tensorflow(threads: int) -> Binding:
    os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")
    import tensorflow as tf

    uncontrolled = False
    try:
        tf.config.threading.set_intra_op_parallelism_threads(threads)
        tf.config.threading.set_inter_op_parallelism_threads(threads)
    except RuntimeError:
        # Runtime already initialized elsewhere in this process.
        uncontrolled = True

    def decode(data: bytes) -> np.ndarray:
        return tf.io.decode_jpeg(data, channels=3).numpy()

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(tf, "tensorflow"),
            thread_control=_control(
                threads, "tf.config.threading.set_*_parallelism_threads", uncontrolled
            ),
        )
    )


def _bind_simplejpeg(threads: int) -> Binding:
    import simplejpeg

    def decode(data: bytes) -> np.ndarray:
        return simplejpeg.decode_jpeg(data, colorspace="RGB")

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(simplejpeg, "simplejpeg"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_turbojpeg(threads: int) -> Binding:
    import turbojpeg
    from turbojpeg import TJPF_RGB, TurboJPEG

    codec = TurboJPEG()

    def decode(data: bytes) -> np.ndarray:
        return codec.decode(data, pixel_format=TJPF_RGB)

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(turbojpeg, "PyTurboJPEG"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_jpeg4py(threads: int) -> Binding:
    import jpeg4py

    def decode(data: bytes) -> np.ndarray:
        return jpeg4py.JPEG(np.frombuffer(data, dtype=np.uint8)).decode()

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(jpeg4py, "jpeg4py"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_kornia_rs(threads: int) -> Binding:
    import kornia_rs

    decoder = kornia_rs.ImageDecoder()

    def decode(data: bytes) -> np.ndarray:
        return np.from_dlpack(decoder.decode(bytes(data)))

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(kornia_rs, "kornia-rs"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_ajpegli(threads: int) -> Binding:
    import ajpegli

    fn = getattr(ajpegli, "decode_jpeg", None) or getattr(ajpegli, "decode", None)
    if fn is None:
        raise ImportError("ajpegli exposes no decode entry point")

    def decode(data: bytes) -> np.ndarray:
        return np.asarray(fn(data))

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(ajpegli, "ajpegli"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_imagecodecs(threads: int) -> Binding:
    import imagecodecs

    def decode(data: bytes) -> np.ndarray:
        return imagecodecs.jpeg8_decode(data)

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(imagecodecs, "imagecodecs"),
            thread_control=_control(threads, "none (no pool control)", True),
        )
    )


def _bind_pyvips(threads: int) -> Binding:
    os.environ.setdefault("VIPS_CONCURRENCY", str(threads))
    import pyvips

    def decode(data: bytes) -> np.ndarray:
        image = pyvips.Image.new_from_buffer(data, "", access="sequential")
        buf = image.write_to_memory()
        return np.frombuffer(buf, dtype=np.uint8).reshape(
            image.height, image.width, image.bands
        )

    return _smoke_test(
        Binding(
            decode=decode,
            layout="rgb",
            version=_version(pyvips, "pyvips"),
            thread_control=_control(threads, "env:VIPS_CONCURRENCY", False),
        )
    )


# name -> (eligibility reason, strictness note, factory)
BUILTIN_ADAPTERS = {
    "simplejpeg": (ELIGIBLE, None, _bind_simplejpeg),
    "turbojpeg": (ELIGIBLE, STRICT_NOTE, _bind_turbojpeg),
    "jpeg4py": (ELIGIBLE, STRICT_NOTE, _bind_jpeg4py),
    "kornia-rs": (ELIGIBLE, STRICT_NOTE, _bind_kornia_rs),
    "ajpegli": (ELIGIBLE, STRICT_NOTE, _bind_ajpegli),
    "opencv": (ELIGIBLE, None, _bind_opencv),
    "imagecodecs": (ELIGIBLE, None, _bind_imagecodecs),
    "pyvips": (NOT_PROCESS_SAFE, None, _bind_pyvips),
    "pillow": (ELIGIBLE, None, _bind_pillow),
    "skimage": (ELIGIBLE, None, _bind_skimage),
    "imageio": (ELIGIBLE, None, _bind_imageio),
    "torchvision": (ELIGIBLE, None, _bind_torchvision),
    "tensorflow": (SEPARATE_PIPELINE_STACK, None, _bind_tensorflow),
}


def build_default_registry(threads: int | None = None) -> AdapterRegistry:
    """Registry holding every built-in adapter, probed lazily."""
    cap = backend_thread_cap() if threads is None else max(1, threads)
    registry = AdapterRegistry()
    for name, (reason, note, bind) in BUILTIN_ADAPTERS.items():
        registry.register_lazy(
            name=name,
            eligibility_reason=reason,
            factory=functools.partial(bind, cap),
            strictness_note=note,
        )
    return registry
