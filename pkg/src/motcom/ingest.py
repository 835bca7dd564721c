"""Loading of MOTChallenge-style sequences into validated in-memory structures.

A sequence on disk looks like::

    <seq_dir>/
        seqinfo.ini          # [Sequence] section with name, frameRate, seqLength, ...
        gt/gt.txt            # frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility
        img1/000001.jpg      # frame images, six-digit zero-padded, .jpg or .png

``parse_gt_file`` reads the annotation rows, ``parse_seqinfo`` the metadata
sidecar, and ``load_sequence`` combines both with the image directory into a
single :class:`SequenceGT`.  All parsing is pure and reentrant; the returned
structures are treated as immutable and are safe to share across threads.
"""

from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import MissingFrameError, ParseError, ValidationError

#: default frame rate (Hz) when seqinfo.ini omits frameRate
DEFAULT_FRAME_RATE = 30.0


@dataclass(frozen=True)
class ObjectState:
    """One annotated object in one frame.

    Coordinates follow the on-disk convention: ``left``/``top`` is the
    top-left corner of the bounding box in pixels.  The box center used by
    the motion and occlusion computations is exposed as derived properties.
    ``visibility`` is the annotated visible fraction in [0, 1]; a negative
    value in the file (unknown) is stored as ``None``.
    """

    frame: int
    track_id: int
    left: float
    top: float
    width: float
    height: float
    confidence: float = 1.0
    class_id: int = 1
    visibility: Optional[float] = None

    @property
    def center_x(self) -> float:
        return self.left + self.width / 2.0

    @property
    def center_y(self) -> float:
        return self.top + self.height / 2.0

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        """Bottom edge y, used as pseudo-depth for ground-plane objects."""
        return self.top + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def box(self) -> tuple[float, float, float, float]:
        """(left, top, width, height) tuple."""
        return (self.left, self.top, self.width, self.height)


@dataclass(frozen=True)
class TargetFilter:
    """Decides which annotated rows count as targets and which may occlude.

    ``included_class_ids`` are the classes evaluated as targets (MOT
    convention: class 1 = pedestrian).  ``occluder_class_ids`` are classes
    that may hide a target without being targets themselves; ``None`` means
    every annotated class may occlude, which honors scene objects such as
    static occluders present in the ground truth.

    Rows with ``conf == 0`` (ignore regions) are never targets but still
    occlude while ``ignore_regions_occlude`` is set.  Rows below
    ``min_visibility_for_parse`` are parsed and retained; the threshold only
    removes them from the target set, and the default of 0.0 removes nothing.
    """

    included_class_ids: frozenset[int] = frozenset({1})
    occluder_class_ids: Optional[frozenset[int]] = None
    min_visibility_for_parse: float = 0.0
    ignore_regions_occlude: bool = True

    def accepts_class(self, class_id: int) -> bool:
        """Whether a row of this class is kept at parse time."""
        if self.occluder_class_ids is None:
            return True
        return class_id in self.included_class_ids or class_id in self.occluder_class_ids

    def is_target(self, state: ObjectState) -> bool:
        if state.class_id not in self.included_class_ids:
            return False
        if state.confidence == 0:
            return False
        if state.visibility is not None and state.visibility < self.min_visibility_for_parse:
            return False
        return True

    def is_occluder(self, state: ObjectState) -> bool:
        if not self.accepts_class(state.class_id):
            return False
        if state.confidence == 0 and not self.ignore_regions_occlude:
            return False
        return True


@dataclass(frozen=True)
class SequenceGT:
    """All annotated object states of one sequence.

    ``tracks`` maps track id to the states of that identity ordered by frame;
    ``per_frame`` maps frame index to the states present in that frame
    ordered by track id.  Both views hold the same states.  ``frames`` is the
    full 1..n frame range of the sequence, which may extend past the last
    annotated frame when seqinfo.ini declares a longer sequence.
    """

    name: str
    tracks: Mapping[int, tuple[ObjectState, ...]]
    per_frame: Mapping[int, tuple[ObjectState, ...]]
    frames: tuple[int, ...]
    frame_rate: float = DEFAULT_FRAME_RATE
    img_width: Optional[int] = None
    img_height: Optional[int] = None
    img_dir: Optional[Path] = None

    @classmethod
    def from_states(
        cls,
        name: str,
        states: Iterable[ObjectState],
        *,
        frame_rate: float = DEFAULT_FRAME_RATE,
        img_width: Optional[int] = None,
        img_height: Optional[int] = None,
        img_dir: Optional[Path] = None,
        seq_length: Optional[int] = None,
    ) -> "SequenceGT":
        """Build a validated sequence from loose states.

        Raises:
            ValidationError: on non-positive box sizes, out-of-range
                visibility, or duplicate (frame, track_id) pairs.
        """
        states = list(states)
        bad_geometry = [s for s in states if s.width <= 0 or s.height <= 0]
        if bad_geometry:
            rows = ", ".join(f"(frame {s.frame}, id {s.track_id})" for s in bad_geometry[:10])
            raise ValidationError(
                f"{name}: {len(bad_geometry)} rows with non-positive width/height: {rows}"
            )
        bad_vis = [
            s for s in states if s.visibility is not None and not 0.0 <= s.visibility <= 1.0
        ]
        if bad_vis:
            rows = ", ".join(f"(frame {s.frame}, id {s.track_id})" for s in bad_vis[:10])
            raise ValidationError(f"{name}: visibility outside [0, 1] for rows: {rows}")

        seen: set[tuple[int, int]] = set()
        for s in states:
            key = (s.frame, s.track_id)
            if key in seen:
                raise ValidationError(f"{name}: duplicate (frame, id) pair {key}")
            seen.add(key)

        tracks: dict[int, list[ObjectState]] = {}
        per_frame: dict[int, list[ObjectState]] = {}
        for s in states:
            tracks.setdefault(s.track_id, []).append(s)
            per_frame.setdefault(s.frame, []).append(s)

        max_frame = max((s.frame for s in states), default=0)
        n_frames = max(max_frame, seq_length or 0)
        return cls(
            name=name,
            tracks={k: tuple(sorted(v, key=lambda s: s.frame)) for k, v in sorted(tracks.items())},
            per_frame={
                f: tuple(sorted(v, key=lambda s: s.track_id)) for f, v in sorted(per_frame.items())
            },
            frames=tuple(range(1, n_frames + 1)),
            frame_rate=frame_rate,
            img_width=img_width,
            img_height=img_height,
            img_dir=img_dir,
        )

    def states(self) -> Iterator[ObjectState]:
        """All states, frame-major, track-id order inside a frame."""
        for frame in sorted(self.per_frame):
            yield from self.per_frame[frame]

    def states_in_frame(self, frame: int) -> tuple[ObjectState, ...]:
        return self.per_frame.get(frame, ())

    def target_tracks(self, flt: TargetFilter) -> dict[int, tuple[ObjectState, ...]]:
        """Target states grouped per track; tracks without target states are dropped."""
        out: dict[int, tuple[ObjectState, ...]] = {}
        for track_id, states in self.tracks.items():
            kept = tuple(s for s in states if flt.is_target(s))
            if kept:
                out[track_id] = kept
        return out

    def targets_in_frame(self, frame: int, flt: TargetFilter) -> tuple[ObjectState, ...]:
        return tuple(s for s in self.states_in_frame(frame) if flt.is_target(s))

    def occluders_in_frame(self, frame: int, flt: TargetFilter) -> tuple[ObjectState, ...]:
        return tuple(s for s in self.states_in_frame(frame) if flt.is_occluder(s))

    def with_images(self, img_dir: Path, img_width: int, img_height: int) -> "SequenceGT":
        return replace(self, img_dir=img_dir, img_width=img_width, img_height=img_height)


@dataclass(frozen=True)
class SeqInfo:
    """Parsed seqinfo.ini metadata.  Missing optional keys stay ``None``."""

    name: Optional[str] = None
    frame_rate: float = DEFAULT_FRAME_RATE
    img_width: Optional[int] = None
    img_height: Optional[int] = None
    seq_length: Optional[int] = None
    img_dir_name: str = "img1"
    img_ext: Optional[str] = None


def _parse_visibility(raw: str) -> Optional[float]:
    value = float(raw)
    return None if value < 0 else value


def parse_gt_file(path: Path | str, flt: TargetFilter = TargetFilter()) -> SequenceGT:
    """Parse a MOTChallenge gt.txt file.

    Every line must carry at least 9 comma-separated fields
    (frame, id, bb_left, bb_top, bb_width, bb_height, conf, class, visibility);
    additional trailing fields are ignored.  Rows whose class the filter does
    not accept are dropped; rows with ``conf == 0`` are retained and merely
    flagged through their stored confidence.  Line order on disk does not
    affect the result.

    Args:
        path: gt.txt location; LF or CRLF line endings are both accepted.
        flt: class filter deciding which rows are kept at all.

    Returns:
        A validated SequenceGT named after the sequence directory
        (the grandparent of gt.txt when laid out as <seq>/gt/gt.txt).

    Raises:
        ParseError: malformed line, reported with its 1-based line number.
        ValidationError: non-positive box sizes or duplicate (frame, id).
    """
    path = Path(path)
    name = _sequence_name_for(path)
    states: list[ObjectState] = []
    with open(path, "r", encoding="utf-8-sig", newline=None) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 9:
                raise ParseError(
                    f"{path}:{lineno}: expected at least 9 comma-separated fields, got {len(parts)}"
                )
            try:
                state = ObjectState(
                    frame=int(float(parts[0])),
                    track_id=int(float(parts[1])),
                    left=float(parts[2]),
                    top=float(parts[3]),
                    width=float(parts[4]),
                    height=float(parts[5]),
                    confidence=float(parts[6]),
                    class_id=int(float(parts[7])),
                    visibility=_parse_visibility(parts[8]),
                )
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if state.frame < 1 or state.track_id < 1:
                raise ParseError(
                    f"{path}:{lineno}: frame and id must be positive integers, "
                    f"got frame={state.frame} id={state.track_id}"
                )
            if flt.accepts_class(state.class_id):
                states.append(state)
    return SequenceGT.from_states(name, states)


def _sequence_name_for(gt_path: Path) -> str:
    # <seq>/gt/gt.txt -> <seq>; otherwise fall back to the parent directory.
    parent = gt_path.resolve().parent
    if parent.name == "gt" and parent.parent.name:
        return parent.parent.name
    return parent.name or gt_path.stem


def parse_seqinfo(path: Path | str) -> SeqInfo:
    """Parse a seqinfo.ini sidecar.

    Raises:
        ParseError: file has no [Sequence] section.
    """
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8-sig") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not parser.has_section("Sequence"):
        raise ParseError(f"{path}: missing [Sequence] section")
    section = parser["Sequence"]

    def _get_int(key: str) -> Optional[int]:
        raw = section.get(key)
        return int(raw) if raw not in (None, "") else None

    return SeqInfo(
        name=section.get("name") or None,
        frame_rate=float(section.get("frameRate", DEFAULT_FRAME_RATE)),
        img_width=_get_int("imWidth"),
        img_height=_get_int("imHeight"),
        seq_length=_get_int("seqLength"),
        img_dir_name=section.get("imDir", "img1"),
        img_ext=section.get("imExt") or None,
    )


def load_sequence(seq_dir: Path | str, flt: TargetFilter = TargetFilter()) -> SequenceGT:
    """Load gt/gt.txt plus seqinfo.ini from a sequence directory.

    When seqLength disagrees with the annotations (gt rows beyond the declared
    length) a warning is emitted and the ground truth wins.  A missing
    seqinfo.ini falls back to defaults derived from the annotations alone.
    """
    seq_dir = Path(seq_dir)
    gt_path = seq_dir / "gt" / "gt.txt"
    info = SeqInfo()
    info_path = seq_dir / "seqinfo.ini"
    if info_path.exists():
        info = parse_seqinfo(info_path)

    base = parse_gt_file(gt_path, flt)
    max_gt_frame = max((f for f, states in base.per_frame.items() if states), default=0)
    seq_length = info.seq_length
    if seq_length is not None and max_gt_frame > seq_length:
        warnings.warn(
            f"{seq_dir.name}: gt contains frames up to {max_gt_frame} but seqinfo "
            f"declares seqLength={seq_length}; using the annotations",
            stacklevel=2,
        )
        seq_length = max_gt_frame

    states = [s for states in base.per_frame.values() for s in states]
    return SequenceGT.from_states(
        info.name or seq_dir.name,
        states,
        frame_rate=info.frame_rate,
        img_width=info.img_width,
        img_height=info.img_height,
        img_dir=seq_dir / info.img_dir_name,
        seq_length=seq_length,
    )


def frame_image_path(seq: SequenceGT, frame: int) -> Path:
    """Image path for a frame: six-digit zero-padded name, .jpg probed before .png.

    Raises:
        MissingFrameError: no image file exists for that frame index.
        ValueError: the sequence has no image directory configured.
    """
    if seq.img_dir is None:
        raise ValueError(f"{seq.name}: sequence has no image directory")
    stem = f"{frame:06d}"
    for ext in (".jpg", ".png"):
        candidate = seq.img_dir / (stem + ext)
        if candidate.exists():
            return candidate
    raise MissingFrameError(f"{seq.name}: no image for frame {frame} under {seq.img_dir}")


def gt_rows(seq: SequenceGT) -> list[str]:
    """Serialize back to gt.txt rows (inverse of parse_gt_file).

    Floats are written with repr so re-parsing reproduces them exactly;
    absent visibility becomes -1 per MOT convention.
    """
    rows = []
    for s in seq.states():
        vis = -1.0 if s.visibility is None else s.visibility
        rows.append(
            f"{s.frame},{s.track_id},{s.left!r},{s.top!r},{s.width!r},{s.height!r},"
            f"{s.confidence!r},{s.class_id},{vis!r}"
        )
    return rows


def write_gt_file(seq: SequenceGT, path: Path | str) -> None:
    """Write the sequence back to a gt.txt file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = "\n".join(gt_rows(seq))
    path.write_text(text + ("\n" if text else ""), encoding="utf-8")
