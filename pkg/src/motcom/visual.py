"""Spatial-aware visual-similarity scoring (VCOM).

Every target in frame t is compared against all targets in frame t+1 by
Euclidean distance between their focus-blur embeddings.  The candidate set
is everything within an adaptive radius scaled off the nearest-neighbor
distance; the candidate carrying the target's identity is the one true
positive and everything else in the radius is a false positive.  Averaging
the resulting false discovery rate over targets, frames, and a sweep of
radius ratios yields a score in [0, 1] where higher means easier-to-confuse
objects.

Embeddings are computed once per object state and reused for every ratio in
the sweep; an optional on-disk cache makes repeated runs cheap.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
from PIL import Image

from .embed import BlurSpec, EmbeddingBackend, FeatureVector, blur_image, compose_focus, test_backend
from .errors import BackendError, ValidationError
from .ingest import ObjectState, SequenceGT, TargetFilter, frame_image_path

#: default radius-ratio sweep {0.01, 0.02, ..., 1.00}
DEFAULT_RATIO_SET: tuple[float, ...] = tuple(i / 100.0 for i in range(1, 101))


@dataclass(frozen=True)
class VisualConfig:
    """Radius-ratio sweep, blur parameters, and optional embedding cache."""

    ratio_set: tuple[float, ...] = DEFAULT_RATIO_SET
    blur: BlurSpec = BlurSpec()
    cache_path: Optional[Path] = None

    def __post_init__(self) -> None:
        if not self.ratio_set:
            raise ValidationError("ratio_set must not be empty")
        if any(r <= 0 for r in self.ratio_set):
            raise ValidationError("all ratios must be positive")


@dataclass(frozen=True)
class VisualReport:
    """VCOM plus per-frame means and the count of unmatchable target states.

    ``per_frame_mean_fdr`` maps each contributing frame t to its inner mean
    averaged over the ratio sweep.  ``skipped_targets`` counts target states
    whose frame has a successor inside the sequence's frame range but whose
    identity does not continue into frame t+1, so no true positive exists
    for them.
    """

    vcom: float
    per_frame_mean_fdr: Mapping[int, float]
    skipped_targets: int


def radius(d_nn: float, r: float) -> float:
    """Adaptive candidate radius: nearest-neighbor distance grown by ratio r."""
    if d_nn < 0:
        raise ValidationError(f"d_nn must be non-negative, got {d_nn}")
    if r <= 0:
        raise ValidationError(f"ratio must be positive, got {r}")
    return d_nn * (1.0 + r)


def _fdr_curve(
    distances: np.ndarray, true_index: int, ratios: np.ndarray
) -> np.ndarray:
    """False discovery rate for every ratio given precomputed distances.

    ``distances`` are the target-to-candidate embedding distances for one
    (target, next frame) pair; ``true_index`` marks the candidate sharing
    the target's identity.  Membership uses <=, so the nearest neighbor is
    always a candidate and zero nearest-neighbor distance admits exactly the
    zero-distance candidates.
    """
    d_nn = distances.min()
    thresholds = d_nn * (1.0 + ratios)
    candidate_counts = (distances[np.newaxis, :] <= thresholds[:, np.newaxis]).sum(axis=1)
    tp = (distances[true_index] <= thresholds).astype(float)
    fp = candidate_counts - tp
    return fp / (fp + tp)


def fdr_for_target(
    target_vec: FeatureVector,
    next_frame_vecs: Sequence[FeatureVector],
    target_id: int,
    r: float,
) -> float:
    """False discovery rate for one target against the next frame's objects.

    Candidates are the next-frame vectors within the adaptive radius of the
    target vector; the one sharing ``target_id`` counts as the true positive
    and the rest as false positives.

    Raises:
        ValidationError: empty next frame, or ``target_id`` absent from it
            (callers must filter those states out and count them skipped).
    """
    if not next_frame_vecs:
        raise ValidationError("next frame holds no feature vectors")
    ids = [v.track_id for v in next_frame_vecs]
    if target_id not in ids:
        raise ValidationError(
            f"identity {target_id} has no vector in the next frame; "
            "callers must skip such targets"
        )
    matrix = np.stack([v.values for v in next_frame_vecs])
    distances = np.linalg.norm(matrix - target_vec.values, axis=1)
    curve = _fdr_curve(distances, ids.index(target_id), np.asarray([r], dtype=float))
    return float(curve[0])


class EmbeddingCache:
    """Thread-safe (frame, track_id) -> vector cache with optional persistence.

    The on-disk layout is an ``.npz`` archive holding a JSON header (sequence
    name, backend name, dimension) plus parallel ``frames``, ``ids`` and
    ``vectors`` arrays.  A cache written for a different sequence or backend
    is rejected rather than silently reused.
    """

    def __init__(self, sequence: str, backend_name: str, dimension: int):
        self.sequence = sequence
        self.backend_name = backend_name
        self.dimension = dimension
        self._data: dict[tuple[int, int], np.ndarray] = {}
        self._lock = threading.Lock()

    def get(self, frame: int, track_id: int) -> Optional[np.ndarray]:
        with self._lock:
            return self._data.get((frame, track_id))

    def put(self, frame: int, track_id: int, values: np.ndarray) -> None:
        with self._lock:
            self._data.setdefault((frame, track_id), values)

    def __len__(self) -> int:
        return len(self._data)

    @classmethod
    def load(cls, path: Path, sequence: str, backend_name: str, dimension: int) -> "EmbeddingCache":
        cache = cls(sequence, backend_name, dimension)
        with np.load(path, allow_pickle=False) as archive:
            header = json.loads(str(archive["header"]))
            if (
                header.get("sequence") != sequence
                or header.get("backend") != backend_name
                or header.get("dimension") != dimension
            ):
                raise ValidationError(
                    f"embedding cache {path} was written for "
                    f"{header.get('sequence')}/{header.get('backend')}"
                    f"/{header.get('dimension')}, not {sequence}/{backend_name}/{dimension}"
                )
            frames = archive["frames"]
            ids = archive["ids"]
            vectors = archive["vectors"]
        for frame, track_id, vector in zip(frames, ids, vectors):
            cache._data[(int(frame), int(track_id))] = np.asarray(vector, dtype=float)
        return cache

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        keys = sorted(self._data)
        header = json.dumps(
            {"sequence": self.sequence, "backend": self.backend_name, "dimension": self.dimension}
        )
        np.savez(
            path,
            header=np.asarray(header),
            frames=np.asarray([k[0] for k in keys], dtype=np.int64),
            ids=np.asarray([k[1] for k in keys], dtype=np.int64),
            vectors=np.stack([self._data[k] for k in keys])
            if keys
            else np.zeros((0, self.dimension)),
        )


def _load_frame_image(seq: SequenceGT, frame: int) -> np.ndarray:
    path = frame_image_path(seq, frame)
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def _embeddings_for_frame(
    seq: SequenceGT,
    frame: int,
    states: Sequence[ObjectState],
    cfg: VisualConfig,
    backend: EmbeddingBackend,
    cache: EmbeddingCache,
) -> dict[int, FeatureVector]:
    """Embed the given states of one frame, blurring the frame only once."""
    missing = [s for s in states if cache.get(frame, s.track_id) is None]
    if missing:
        image = _load_frame_image(seq, frame)
        blurred = blur_image(image, cfg.blur)
        for s in missing:
            focused = compose_focus(image, blurred, s.box)
            try:
                values = np.asarray(backend.embed_image(focused), dtype=float)
            except Exception as exc:
                raise BackendError(
                    f"backend {backend.name} failed on frame {frame}, id {s.track_id}: {exc}"
                ) from exc
            cache.put(frame, s.track_id, values)
    return {
        s.track_id: FeatureVector(values=cache.get(frame, s.track_id), frame=frame, track_id=s.track_id)
        for s in states
    }


def compute_vcom(
    seq: SequenceGT,
    flt: TargetFilter = TargetFilter(),
    cfg: VisualConfig = VisualConfig(),
    backend: EmbeddingBackend | None = None,
) -> VisualReport:
    """Sequence-level visual-similarity score.

    For each frame t with targets continuing into frame t+1, every such
    target contributes its FDR against all targets of frame t+1; the frame
    mean is averaged over contributing frames and over the ratio sweep.
    Frames whose successor holds no continuing target do not contribute to
    the denominator.  Targets without a next-frame identity match are
    excluded and counted in ``skipped_targets``.

    Raises:
        ValidationError: no (t, t+1) pair has a continuing target.
        MissingFrameError: a required frame image is absent.
    """
    if backend is None:
        backend = test_backend()
    tracks = seq.target_tracks(flt)
    if not tracks:
        raise ValidationError(f"{seq.name}: no target objects")

    targets_by_frame: dict[int, list[ObjectState]] = {}
    for states in tracks.values():
        for s in states:
            targets_by_frame.setdefault(s.frame, []).append(s)
    for states in targets_by_frame.values():
        states.sort(key=lambda s: s.track_id)

    if cfg.cache_path is not None and cfg.cache_path.exists():
        cache = EmbeddingCache.load(cfg.cache_path, seq.name, backend.name, backend.dimension)
    else:
        cache = EmbeddingCache(seq.name, backend.name, backend.dimension)

    ratios = np.asarray(cfg.ratio_set, dtype=float)
    frame_curves: dict[int, np.ndarray] = {}
    skipped = 0
    last_seq_frame = seq.frames[-1] if seq.frames else 0
    for frame in sorted(targets_by_frame):
        if frame + 1 > last_seq_frame:
            continue
        current = targets_by_frame[frame]
        nxt = targets_by_frame.get(frame + 1, [])
        next_ids = {s.track_id for s in nxt}
        evaluable = [s for s in current if s.track_id in next_ids]
        skipped += len(current) - len(evaluable)
        if not evaluable:
            continue

        current_vecs = _embeddings_for_frame(seq, frame, evaluable, cfg, backend, cache)
        next_vecs = _embeddings_for_frame(seq, frame + 1, nxt, cfg, backend, cache)
        pool_ids = [s.track_id for s in nxt]
        pool = np.stack([next_vecs[i].values for i in pool_ids])

        curves = []
        for s in evaluable:
            distances = np.linalg.norm(pool - current_vecs[s.track_id].values, axis=1)
            curves.append(_fdr_curve(distances, pool_ids.index(s.track_id), ratios))
        frame_curves[frame] = np.mean(curves, axis=0)

    if not frame_curves:
        raise ValidationError(
            f"{seq.name}: no consecutive frame pair with a continuing target"
        )

    if cfg.cache_path is not None:
        cache.save(cfg.cache_path)

    stacked = np.stack([frame_curves[f] for f in sorted(frame_curves)])
    vcom = float(stacked.mean(axis=0).mean())
    per_frame = {f: float(frame_curves[f].mean()) for f in sorted(frame_curves)}
    return VisualReport(vcom=vcom, per_frame_mean_fdr=per_frame, skipped_targets=skipped)
