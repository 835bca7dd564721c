"""Erratic-motion scoring: size-compensated prediction error and MCOM.

Each object is assumed to move linearly over small time steps.  For every
state we predict the next position with a constant-velocity step, measure
the Euclidean error against the true next position, divide by the object's
size at that target frame, and average over all evaluated terms.  The mean
is squashed into [0, 1) through x / (x + alpha), averaged over a whole
sweep of alpha values so no single steepness has to be hand-picked.

Positions are box centers in pixels; no image-size normalization is applied
because the size denominator already cancels resolution.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .ingest import ObjectState, SequenceGT, TargetFilter

#: default steepness sweep {0.01, 0.02, ..., 1.00}
DEFAULT_ALPHA_SET: tuple[float, ...] = tuple(i / 100.0 for i in range(1, 101))


@dataclass(frozen=True)
class MotionConfig:
    """Temporal step size and the steepness sweep for the squashing function."""

    beta: int = 1
    alpha_set: tuple[float, ...] = DEFAULT_ALPHA_SET

    def __post_init__(self) -> None:
        if self.beta < 1:
            raise ValidationError(f"beta must be >= 1, got {self.beta}")
        if not self.alpha_set:
            raise ValidationError("alpha_set must not be empty")
        if any(a <= 0 for a in self.alpha_set):
            raise ValidationError("all alpha values must be positive")


@dataclass(frozen=True)
class MotionReport:
    """MCOM plus the per-term intermediates.

    ``mean_relative_error`` divides the summed size-compensated errors by
    ``evaluated_term_count`` (terms that actually had a prediction target).
    ``mean_relative_error_literal`` divides by ``state_count``, the total
    number of target states; both are reported because track endpoints have
    no prediction target and the two denominators differ.
    ``per_track_terms`` lists (frame, error, size, error/size) per track.
    """

    mcom: float
    mean_relative_error: float
    per_track_terms: Mapping[int, tuple[tuple[int, float, float, float], ...]]
    evaluated_term_count: int
    state_count: int
    mean_relative_error_literal: float


def _centers(track: Sequence[ObjectState]) -> dict[int, np.ndarray]:
    return {s.frame: np.array([s.center_x, s.center_y], dtype=float) for s in track}


def _lookback_frame(frames: Sequence[int], index: int, beta: int) -> int:
    """Frame used as the displacement origin for frames[index].

    Prefers the presence frame at or before t - beta; when the step reaches
    past the start of the trajectory, the first frame caps it.  ``index``
    must be > 0 (the first frame has no lookback).
    """
    t = frames[index]
    pos = bisect.bisect_right(frames, t - beta)
    if pos == 0:
        return frames[0]
    return frames[pos - 1]


def _target_frame(frames: Sequence[int], index: int, beta: int) -> int | None:
    """Frame whose true position the prediction is scored against.

    Prefers the presence frame at or after t + beta; when the step reaches
    past the end of the trajectory, the last frame caps it.  Returns None
    for the last frame of the trajectory (nothing left to predict).
    """
    t = frames[index]
    if index == len(frames) - 1:
        return None
    pos = bisect.bisect_left(frames, t + beta)
    if pos >= len(frames):
        return frames[-1]
    return frames[pos]


def displacement(track: Sequence[ObjectState], t: int, beta: int = 1) -> np.ndarray:
    """Center displacement vector ending at frame t, with step capping.

    The vector is p_t minus the position at the nearest presence frame at or
    before t - beta; gaps shrink the step to the closest earlier presence and
    the trajectory start caps it entirely.  At the first frame of the track
    the displacement is defined as the zero vector.

    Raises:
        ValidationError: the object is not present at frame t.
    """
    frames = [s.frame for s in track]
    if t not in frames:
        raise ValidationError(f"object not present at frame {t}")
    index = frames.index(t)
    if index == 0:
        return np.zeros(2)
    centers = _centers(track)
    origin = _lookback_frame(frames, index, beta)
    return centers[t] - centers[origin]


def predict_position(p_t: np.ndarray, displacement_vec: np.ndarray) -> np.ndarray:
    """Constant-velocity prediction: current position plus the last displacement."""
    return np.asarray(p_t, dtype=float) + np.asarray(displacement_vec, dtype=float)


def prediction_error(p_true: np.ndarray, predicted: np.ndarray) -> float:
    """Euclidean distance between the true and predicted positions."""
    diff = np.asarray(p_true, dtype=float) - np.asarray(predicted, dtype=float)
    return float(np.hypot(diff[0], diff[1]))


def transformed_size(state_next: ObjectState) -> float:
    """Object size at the prediction target frame: sqrt(width * height).

    Using the size at the *next* step folds the direction of size change
    into the denominator: growth softens the error, shrinkage sharpens it.
    """
    return float(np.sqrt(state_next.width * state_next.height))


def log_sigmoid_weight(x: float, alpha: float) -> float:
    """Squash x >= 0 into [0, 1): x / (x + alpha).

    Monotonically increasing, reaching 0.5 exactly at x == alpha; small
    displacements move the output more than increments on top of already
    erratic motion.
    """
    if x < 0:
        raise ValidationError(f"x must be non-negative, got {x}")
    if alpha <= 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    return x / (x + alpha)


def compute_mcom(
    seq: SequenceGT,
    flt: TargetFilter = TargetFilter(),
    cfg: MotionConfig = MotionConfig(),
) -> MotionReport:
    """Sequence-level erratic-motion score.

    For every target state with a later presence frame, the constant-velocity
    prediction error divided by the target-frame size contributes one term.
    First frames use a zero displacement vector, so their term is the raw
    first step.  The per-term mean is squashed by x / (x + alpha) and
    averaged over the configured alpha sweep.

    Raises:
        ValidationError: no track has an evaluable prediction (all tracks
            are single-state).
    """
    tracks = seq.target_tracks(flt)
    if not tracks:
        raise ValidationError(f"{seq.name}: no target objects")

    per_track: dict[int, tuple[tuple[int, float, float, float], ...]] = {}
    total = 0.0
    term_count = 0
    state_count = 0
    for track_id, states in tracks.items():
        frames = [s.frame for s in states]
        by_frame = {s.frame: s for s in states}
        centers = _centers(states)
        state_count += len(states)
        terms: list[tuple[int, float, float, float]] = []
        for index, t in enumerate(frames):
            target = _target_frame(frames, index, cfg.beta)
            if target is None:
                continue
            if index == 0:
                disp = np.zeros(2)
            else:
                disp = centers[t] - centers[_lookback_frame(frames, index, cfg.beta)]
            predicted = centers[t] + disp
            error = prediction_error(centers[target], predicted)
            size = transformed_size(by_frame[target])
            terms.append((t, error, size, error / size))
            total += error / size
            term_count += 1
        per_track[track_id] = tuple(terms)

    if term_count == 0:
        raise ValidationError(
            f"{seq.name}: motion undefined, no track has more than one state"
        )

    inner = total / term_count
    mcom = sum(log_sigmoid_weight(inner, a) for a in cfg.alpha_set) / len(cfg.alpha_set)
    return MotionReport(
        mcom=mcom,
        mean_relative_error=inner,
        per_track_terms=per_track,
        evaluated_term_count=term_count,
        state_count=state_count,
        mean_relative_error_literal=total / state_count,
    )
