"""Shared fixture builders: in-memory sequences and on-disk datasets."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pytest
from PIL import Image

from motcom.ingest import ObjectState, SequenceGT

PALETTE = [
    (220, 40, 40),
    (40, 180, 60),
    (50, 90, 230),
    (230, 200, 40),
    (160, 40, 200),
    (40, 210, 210),
    (240, 130, 30),
    (120, 120, 120),
]


def state(
    frame: int,
    track_id: int,
    left: float,
    top: float,
    width: float,
    height: float,
    confidence: float = 1.0,
    class_id: int = 1,
    visibility: Optional[float] = None,
) -> ObjectState:
    return ObjectState(frame, track_id, left, top, width, height, confidence, class_id, visibility)


def make_seq(states: Sequence[ObjectState], name: str = "synthetic", **kwargs) -> SequenceGT:
    return SequenceGT.from_states(name, states, **kwargs)


def track_color(track_id: int) -> tuple[int, int, int]:
    return PALETTE[track_id % len(PALETTE)]


def render_frame(
    states: Sequence[ObjectState], width: int, height: int
) -> np.ndarray:
    """Deterministic synthetic frame: gradient background, solid colored boxes."""
    image = np.zeros((height, width, 3), dtype=np.uint8)
    image[:, :, 0] = np.linspace(20, 120, width, dtype=np.uint8)[np.newaxis, :]
    image[:, :, 1] = np.linspace(30, 110, height, dtype=np.uint8)[:, np.newaxis]
    image[:, :, 2] = 60
    for s in states:
        x0 = max(0, int(round(s.left)))
        y0 = max(0, int(round(s.top)))
        x1 = min(width, int(round(s.left + s.width)))
        y1 = min(height, int(round(s.top + s.height)))
        if x1 > x0 and y1 > y0:
            image[y0:y1, x0:x1] = track_color(s.track_id)
    return image


def write_sequence_dir(
    root: Path,
    name: str,
    states: Sequence[ObjectState],
    img_size: tuple[int, int] = (64, 48),
    frame_rate: int = 25,
    seq_length: Optional[int] = None,
    with_images: bool = True,
    image_ext: str = ".png",
    with_visibility: bool = False,
) -> Path:
    """Write a MOTChallenge-style sequence directory under ``root``."""
    width, height = img_size
    seq_dir = root / name
    (seq_dir / "gt").mkdir(parents=True, exist_ok=True)

    max_frame = max((s.frame for s in states), default=0)
    n_frames = seq_length if seq_length is not None else max_frame

    rows = []
    for s in sorted(states, key=lambda s: (s.frame, s.track_id)):
        vis = s.visibility if (with_visibility and s.visibility is not None) else -1
        rows.append(
            f"{s.frame},{s.track_id},{s.left:g},{s.top:g},{s.width:g},{s.height:g},"
            f"{s.confidence:g},{s.class_id},{vis:g}"
        )
    (seq_dir / "gt" / "gt.txt").write_text("\n".join(rows) + "\n", encoding="utf-8")

    (seq_dir / "seqinfo.ini").write_text(
        "[Sequence]\n"
        f"name={name}\n"
        "imDir=img1\n"
        f"frameRate={frame_rate}\n"
        f"seqLength={n_frames}\n"
        f"imWidth={width}\n"
        f"imHeight={height}\n"
        f"imExt={image_ext}\n",
        encoding="utf-8",
    )

    if with_images:
        img_dir = seq_dir / "img1"
        img_dir.mkdir(exist_ok=True)
        by_frame: dict[int, list[ObjectState]] = {}
        for s in states:
            by_frame.setdefault(s.frame, []).append(s)
        for frame in range(1, n_frames + 1):
            image = render_frame(by_frame.get(frame, []), width, height)
            Image.fromarray(image).save(img_dir / f"{frame:06d}{image_ext}")
    return seq_dir


def two_sequence_dataset(root: Path) -> Path:
    """The bundled synthetic two-sequence dataset used by end-to-end tests."""
    data = root / "dataset"
    seq_a = [
        # track 1 drifts right, track 2 crosses it, track 3 sits still
        *[state(f, 1, 4 + 3 * (f - 1), 10, 10, 14, visibility=1.0) for f in range(1, 7)],
        *[state(f, 2, 30 - 2 * (f - 1), 12, 9, 16, visibility=0.8) for f in range(1, 7)],
        *[state(f, 3, 44, 26, 12, 12, visibility=1.0) for f in range(1, 7)],
    ]
    write_sequence_dir(data, "synth-01", seq_a, with_visibility=True)
    seq_b = [
        *[state(f, 1, 6 + 4 * (f - 1), 8 + (f % 2) * 5, 11, 15) for f in range(1, 6)],
        *[state(f, 2, 40, 20, 10, 18) for f in range(1, 6)],
    ]
    write_sequence_dir(data, "synth-02", seq_b)
    return data


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    return two_sequence_dataset(tmp_path)
