"""Focus-blur preprocessing and image-to-vector embedding backends.

For every object we build a view of the full frame where everything except
the object's bounding box is heavily Gaussian-blurred, then map that view to
a fixed-length feature vector.  Keeping the whole frame (rather than a crop)
lets the vector carry the object's position and coarse surroundings, which
is what makes the visual-similarity score spatially aware.

Backends are pluggable: :func:`test_backend` returns a dependency-free,
fully deterministic reducer for tests and CI; :func:`onnx_backend` wraps an
exported CNN feature extractor through onnxruntime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image
from scipy.ndimage import convolve1d

from .errors import BackendError, ValidationError
from .ingest import ObjectState


@dataclass(frozen=True)
class BlurSpec:
    """Gaussian blur parameters applied to the frame background."""

    kernel_size: int = 201
    sigma: float = 38.0

    def __post_init__(self) -> None:
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ValidationError(f"kernel_size must be odd and positive, got {self.kernel_size}")
        if self.sigma <= 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class FeatureVector:
    """Embedding of one object state; values are finite floats."""

    values: np.ndarray
    frame: int
    track_id: int

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValidationError(
                f"non-finite embedding values (frame {self.frame}, id {self.track_id})"
            )


class EmbeddingBackend:
    """Maps a preprocessed frame image to a fixed-length vector.

    Implementations must be deterministic (same image, same vector) and safe
    to call from multiple threads.
    """

    name: str = "abstract"
    dimension: int = 0

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized 1-D sampled Gaussian with ``size`` taps centered at zero."""
    offsets = np.arange(size, dtype=float) - (size - 1) / 2.0
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    return kernel / kernel.sum()


def blur_image(image: np.ndarray, spec: BlurSpec = BlurSpec()) -> np.ndarray:
    """Full-frame separable Gaussian blur with edge-clamp padding.

    Two 1-D passes of the same normalized kernel, computed in float64 and
    rounded back to uint8, so a constant image stays constant to within one
    quantization level.
    """
    kernel = gaussian_kernel(spec.kernel_size, spec.sigma)
    data = np.asarray(image, dtype=float)
    blurred = convolve1d(data, kernel, axis=0, mode="nearest")
    blurred = convolve1d(blurred, kernel, axis=1, mode="nearest")
    return np.clip(np.rint(blurred), 0, 255).astype(np.uint8)


def _focus_region(
    box: Sequence[float], width: int, height: int
) -> tuple[int, int, int, int]:
    """Integer pixel window (x0, y0, x1, y1) of a float box clipped to the image."""
    left, top, box_w, box_h = (float(v) for v in box)
    x0 = max(0, int(np.floor(left)))
    y0 = max(0, int(np.floor(top)))
    x1 = min(width, int(np.ceil(left + box_w)))
    y1 = min(height, int(np.ceil(top + box_h)))
    if x1 <= x0 or y1 <= y0:
        raise ValidationError(
            f"box {tuple(box)} lies entirely outside a {width}x{height} image"
        )
    return x0, y0, x1, y1


def blur_except_box(
    frame_image: np.ndarray,
    box: Sequence[float] | ObjectState,
    spec: BlurSpec = BlurSpec(),
) -> np.ndarray:
    """Blur the whole frame, then restore the original pixels inside the box.

    The box is (left, top, width, height) in pixels and is clipped to the
    image; pixels inside the clipped box are bit-identical to the input.

    Raises:
        ValidationError: box entirely outside the image.
    """
    if isinstance(box, ObjectState):
        box = box.box
    image = np.asarray(frame_image)
    height, width = image.shape[:2]
    x0, y0, x1, y1 = _focus_region(box, width, height)
    out = blur_image(image, spec)
    out[y0:y1, x0:x1] = image[y0:y1, x0:x1]
    return out


def compose_focus(
    frame_image: np.ndarray, blurred: np.ndarray, box: Sequence[float]
) -> np.ndarray:
    """Paste the original box region onto an already-blurred copy of the frame.

    Lets callers blur each frame once and reuse it for every object in it;
    equivalent to :func:`blur_except_box` given a matching blur.
    """
    image = np.asarray(frame_image)
    height, width = image.shape[:2]
    x0, y0, x1, y1 = _focus_region(box, width, height)
    out = blurred.copy()
    out[y0:y1, x0:x1] = image[y0:y1, x0:x1]
    return out


def _area_reduce_axis(data: np.ndarray, out_len: int, axis: int) -> np.ndarray:
    """Exact area-average reduction of one axis to ``out_len`` cells."""
    moved = np.moveaxis(np.asarray(data, dtype=float), axis, 0)
    n = moved.shape[0]
    out = np.empty((out_len,) + moved.shape[1:], dtype=float)
    for i in range(out_len):
        start = i * n / out_len
        end = (i + 1) * n / out_len
        acc = np.zeros(moved.shape[1:], dtype=float)
        for j in range(int(np.floor(start)), int(np.ceil(end))):
            weight = min(end, j + 1.0) - max(start, float(j))
            if weight > 0:
                acc = acc + weight * moved[j]
        out[i] = acc / (end - start)
    return np.moveaxis(out, 0, axis)


class GridAverageBackend(EmbeddingBackend):
    """Deterministic test backend: 16x16 grayscale area averages in [0, 1].

    Grayscale is the plain channel mean, downsampling is an exact area
    average, so the embedding is linear in pixel values: inverting image
    brightness maps the vector v to 1 - v componentwise.
    """

    grid = 16
    name = "grid16"
    dimension = 256

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        data = np.asarray(image, dtype=float)
        if data.ndim == 3:
            data = data.mean(axis=2)
        if data.ndim != 2:
            raise BackendError(f"expected a HxW or HxWxC image, got shape {data.shape}")
        reduced = _area_reduce_axis(_area_reduce_axis(data, self.grid, 0), self.grid, 1)
        return (reduced / 255.0).ravel()


def test_backend() -> EmbeddingBackend:
    """Dependency-free deterministic backend for tests and reproducible runs."""
    return GridAverageBackend()


class OnnxFeatureBackend(EmbeddingBackend):
    """Feature extraction through an exported ONNX model.

    Expects a sidecar manifest JSON next to the model file (same stem,
    ``.json`` suffix) with keys ``input_size``, ``mean``, ``std`` and
    ``output_dim``.  The preprocessed frame is resized (plain bilinear, no
    letterboxing) to input_size x input_size, scaled to [0, 1], normalized
    channel-wise, and fed as a single NCHW tensor.
    """

    def __init__(self, model_path: Path | str):
        model_path = Path(model_path)
        if not model_path.exists():
            raise BackendError(f"model file not found: {model_path}")
        manifest_path = model_path.with_suffix(".json")
        if not manifest_path.exists():
            raise BackendError(f"missing model manifest: {manifest_path}")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            self.input_size = int(manifest["input_size"])
            self.mean = np.asarray(manifest["mean"], dtype=np.float32).reshape(3, 1, 1)
            self.std = np.asarray(manifest["std"], dtype=np.float32).reshape(3, 1, 1)
            self.dimension = int(manifest["output_dim"])
        except (KeyError, ValueError, TypeError) as exc:
            raise BackendError(f"invalid model manifest {manifest_path}: {exc}") from exc
        try:
            import onnxruntime
        except ImportError as exc:
            raise BackendError(
                "onnxruntime is required for the ONNX backend "
                "(pip install motcom[onnx])"
            ) from exc
        try:
            self._session = onnxruntime.InferenceSession(
                str(model_path), providers=["CPUExecutionProvider"]
            )
        except Exception as exc:
            raise BackendError(f"failed to load ONNX model {model_path}: {exc}") from exc
        self._input_name = self._session.get_inputs()[0].name
        out_shape = self._session.get_outputs()[0].shape
        static_dims = [d for d in out_shape if isinstance(d, int)]
        if static_dims and static_dims[-1] != self.dimension:
            raise BackendError(
                f"model output shape {out_shape} does not match manifest "
                f"output_dim {self.dimension}"
            )
        self.name = f"onnx:{model_path.stem}"

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        data = np.asarray(image)
        if data.ndim == 2:
            data = np.stack([data] * 3, axis=2)
        pil = Image.fromarray(data.astype(np.uint8))
        resized = pil.resize((self.input_size, self.input_size), Image.BILINEAR)
        arr = np.asarray(resized, dtype=np.float32) / 255.0
        arr = (arr.transpose(2, 0, 1) - self.mean) / self.std
        (output,) = self._session.run(None, {self._input_name: arr[np.newaxis]})
        vector = np.asarray(output, dtype=float).reshape(-1)
        if vector.shape[0] != self.dimension:
            raise BackendError(
                f"model produced {vector.shape[0]} values, expected {self.dimension}"
            )
        return vector


def onnx_backend(model_path: Path | str) -> EmbeddingBackend:
    """Backend running an exported feature-extractor model via onnxruntime."""
    return OnnxFeatureBackend(model_path)


def embed_object(
    frame_image: np.ndarray,
    state: ObjectState,
    spec: BlurSpec = BlurSpec(),
    backend: EmbeddingBackend | None = None,
) -> FeatureVector:
    """Blur-preprocess the frame for one object and embed it.

    Raises:
        BackendError: backend failure, annotated with frame/track context.
    """
    if backend is None:
        backend = test_backend()
    focused = blur_except_box(frame_image, state, spec)
    try:
        values = np.asarray(backend.embed_image(focused), dtype=float)
    except BackendError:
        raise
    except Exception as exc:
        raise BackendError(
            f"backend {backend.name} failed on frame {state.frame}, id {state.track_id}: {exc}"
        ) from exc
    if values.ndim != 1 or values.shape[0] != backend.dimension:
        raise BackendError(
            f"backend {backend.name} returned shape {values.shape}, "
            f"expected ({backend.dimension},)"
        )
    return FeatureVector(values=values, frame=state.frame, track_id=state.track_id)
