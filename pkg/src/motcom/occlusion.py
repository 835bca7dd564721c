"""Occlusion scoring: per-state occlusion levels and the sequence-level OCOM.

A state's occlusion level is the fraction of its bounding box covered by
boxes of objects judged closer to the camera.  For ground-plane scenes the
bottom edge of a box (foot position) serves as pseudo-depth: a strictly
larger bottom y means strictly closer.  Overlapping occluders are merged
exactly with a coordinate sweep before measuring covered area, so the level
never exceeds 1 regardless of how many occluders pile up.

When a sequence carries annotated visibility, OCOM can instead be read
directly as 1 - visibility; both routes produce the same report shape.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError
from .ingest import ObjectState, SequenceGT, TargetFilter

Rect = tuple[float, float, float, float]  # (left, top, width, height)


class OcclusionMode(str, enum.Enum):
    """How per-state occlusion levels are obtained."""

    PREFER_ANNOTATED = "prefer_annotated"
    FORCE_COMPUTED = "force_computed"


@dataclass(frozen=True)
class OcclusionReport:
    """OCOM plus the per-object and per-state intermediates behind it.

    ``source`` records whether levels came from annotated visibility
    ("annotated_visibility") or from box geometry ("computed_ioa").
    """

    ocom: float
    per_object_mean: Mapping[int, float]
    per_state_occlusion: Mapping[tuple[int, int], float]
    source: str


def _as_rect(box: ObjectState | Sequence[float]) -> Rect:
    if isinstance(box, ObjectState):
        return box.box
    left, top, width, height = box
    return (float(left), float(top), float(width), float(height))


def _clip(rect: Rect, frame: Rect) -> Rect | None:
    """Intersection of two rects, or None when empty."""
    left = max(rect[0], frame[0])
    top = max(rect[1], frame[1])
    right = min(rect[0] + rect[2], frame[0] + frame[2])
    bottom = min(rect[1] + rect[3], frame[1] + frame[3])
    if right <= left or bottom <= top:
        return None
    return (left, top, right - left, bottom - top)


def _union_area(rects: list[Rect]) -> float:
    """Exact area of the union of axis-aligned rectangles.

    Coordinate sweep: slice the plane at every distinct x edge, then merge
    the y intervals active inside each vertical slab.
    """
    if not rects:
        return 0.0
    xs = sorted({r[0] for r in rects} | {r[0] + r[2] for r in rects})
    area = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        if x1 <= x0:
            continue
        spans = sorted(
            (r[1], r[1] + r[3]) for r in rects if r[0] <= x0 and r[0] + r[2] >= x1
        )
        if not spans:
            continue
        covered = 0.0
        cur_top, cur_bottom = spans[0]
        for top, bottom in spans[1:]:
            if top > cur_bottom:
                covered += cur_bottom - cur_top
                cur_top, cur_bottom = top, bottom
            else:
                cur_bottom = max(cur_bottom, bottom)
        covered += cur_bottom - cur_top
        area += covered * (x1 - x0)
    return area


def intersection_over_area(target: ObjectState | Sequence[float],
                           other: ObjectState | Sequence[float]) -> float:
    """Intersection area divided by the target's own area, in [0, 1].

    Asymmetric by design: measures how much of *target* is covered by
    *other*, not their mutual overlap.

    Raises:
        ValidationError: target has zero or negative area.
    """
    t = _as_rect(target)
    o = _as_rect(other)
    t_area = t[2] * t[3]
    if t_area <= 0:
        raise ValidationError(f"degenerate target box {t}: area must be positive")
    inter = _clip(o, t)
    if inter is None:
        return 0.0
    return (inter[2] * inter[3]) / t_area


def occlusion_level(target: ObjectState, others_in_frame: Iterable[ObjectState]) -> float:
    """Fraction of the target box covered by strictly nearer objects.

    "Nearer" is decided by pseudo-depth: an object with a strictly larger
    bottom-edge y is in front.  Equal bottom edges tie and neither box
    occludes the other.  The union of the nearer boxes is measured exactly,
    so two occluders hiding the same half of the target yield 0.5, not 1.0.

    All states must belong to the same frame as the target.
    """
    if target.area <= 0:
        raise ValidationError(
            f"degenerate target box (frame {target.frame}, id {target.track_id})"
        )
    target_rect = target.box
    occluders: list[Rect] = []
    for other in others_in_frame:
        if other.frame != target.frame:
            raise ValidationError(
                f"occlusion_level: state from frame {other.frame} mixed into frame {target.frame}"
            )
        if other.track_id == target.track_id:
            continue
        if other.bottom > target.bottom:
            clipped = _clip(other.box, target_rect)
            if clipped is not None:
                occluders.append(clipped)
    if not occluders:
        return 0.0
    covered = _union_area(occluders)
    return min(covered / target.area, 1.0)


def compute_ocom(
    seq: SequenceGT,
    flt: TargetFilter = TargetFilter(),
    mode: OcclusionMode | str = OcclusionMode.PREFER_ANNOTATED,
) -> OcclusionReport:
    """Sequence-level occlusion score: mean over objects of their mean occlusion.

    Each target object contributes its occlusion level averaged over exactly
    the frames where it is present, and OCOM averages those per-object means
    with equal weight regardless of track length.

    In ``prefer_annotated`` mode the annotated visibility is used when every
    target state carries one (level = 1 - visibility); otherwise, and always
    in ``force_computed`` mode, levels are computed from box geometry with
    pseudo-depth ordering.  Occluders include every annotated state the
    filter lets occlude, targets and scene objects alike.

    Raises:
        ValidationError: the sequence has no target objects.
    """
    mode = OcclusionMode(mode)
    tracks = seq.target_tracks(flt)
    if not tracks:
        raise ValidationError(f"{seq.name}: no target objects")

    all_states = [s for states in tracks.values() for s in states]
    use_annotated = mode is OcclusionMode.PREFER_ANNOTATED and all(
        s.visibility is not None for s in all_states
    )

    per_state: dict[tuple[int, int], float] = {}
    if use_annotated:
        for s in all_states:
            per_state[(s.frame, s.track_id)] = 1.0 - s.visibility
        source = "annotated_visibility"
    else:
        occluders_by_frame: dict[int, tuple[ObjectState, ...]] = {}
        for track_states in tracks.values():
            for s in track_states:
                if s.frame not in occluders_by_frame:
                    occluders_by_frame[s.frame] = seq.occluders_in_frame(s.frame, flt)
                per_state[(s.frame, s.track_id)] = occlusion_level(
                    s, occluders_by_frame[s.frame]
                )
        source = "computed_ioa"

    per_object = {
        track_id: sum(per_state[(s.frame, track_id)] for s in states) / len(states)
        for track_id, states in tracks.items()
    }
    ocom = sum(per_object.values()) / len(per_object)
    return OcclusionReport(
        ocom=ocom,
        per_object_mean=per_object,
        per_state_occlusion=per_state,
        source=source,
    )
