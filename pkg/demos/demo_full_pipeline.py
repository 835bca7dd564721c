#!/usr/bin/env python3
"""The whole batch pipeline in one script: dataset -> scores -> ranks -> plots.

Generates a small MOTChallenge-style dataset (gt.txt, seqinfo.ini, PNG
frames) in a temporary directory, scores it with the deterministic test
backend through the same code path as the ``motcom`` CLI, ranks the metric
columns against a fabricated tracker-score file, and renders scatter SVGs.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from motcom.cli import main


def write_sequence(root: Path, name: str, tracks: dict[int, list[tuple[float, float]]],
                   size=(96, 64), box=(12, 16)):
    seq_dir = root / name
    (seq_dir / "gt").mkdir(parents=True)
    (seq_dir / "img1").mkdir()
    width, height = size
    bw, bh = box
    n_frames = max(len(path) for path in tracks.values())

    rows = []
    per_frame: dict[int, list[tuple[int, float, float]]] = {}
    for track_id, path in tracks.items():
        for f, (x, y) in enumerate(path, start=1):
            rows.append(f"{f},{track_id},{x - bw / 2},{y - bh / 2},{bw},{bh},1,1,-1")
            per_frame.setdefault(f, []).append((track_id, x, y))
    (seq_dir / "gt" / "gt.txt").write_text("\n".join(rows) + "\n")
    (seq_dir / "seqinfo.ini").write_text(
        f"[Sequence]\nname={name}\nimDir=img1\nframeRate=25\nseqLength={n_frames}\n"
        f"imWidth={width}\nimHeight={height}\nimExt=.png\n"
    )
    palette = [(200, 60, 60), (60, 180, 80), (70, 90, 220), (220, 200, 60)]
    for f in range(1, n_frames + 1):
        image = np.full((height, width, 3), 40, dtype=np.uint8)
        image[:, :, 0] = np.linspace(30, 110, width, dtype=np.uint8)[np.newaxis, :]
        for track_id, x, y in per_frame.get(f, []):
            x0, y0 = int(x - bw / 2), int(y - bh / 2)
            image[max(0, y0) : y0 + bh, max(0, x0) : x0 + bw] = palette[track_id % 4]
        Image.fromarray(image).save(seq_dir / "img1" / f"{f:06d}.png")


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    data = root / "dataset"

    rng = np.random.RandomState(1)
    # calm sequence: two well-separated linear walkers
    write_sequence(data, "calm", {
        1: [(12 + 5 * i, 20) for i in range(8)],
        2: [(80 - 4 * i, 45) for i in range(8)],
    })
    # busy sequence: three walkers, two of which shadow each other closely
    write_sequence(data, "busy", {
        1: [(15 + 6 * i + rng.uniform(-4, 4), 24 + rng.uniform(-4, 4)) for i in range(8)],
        2: [(18 + 6 * i + rng.uniform(-4, 4), 28 + rng.uniform(-4, 4)) for i in range(8)],
        3: [(70 - 6 * i + rng.uniform(-6, 6), 40 + rng.uniform(-6, 6)) for i in range(8)],
    })

    out = root / "out"
    print("== motcom compute ==")
    main(["compute", "--data", str(data), "--out", str(out), "--backend", "test"])

    print("\nsummary.csv:")
    print((out / "summary.csv").read_text())

    scores = root / "scores.csv"
    scores.write_text("sequence,hota\ncalm,67.0\nbusy,49.5\n")

    print("== motcom rank ==")
    main(["rank", "--reports", str(out / "summary.csv"), "--scores", str(scores)])

    print("\n== motcom plot ==")
    plots = root / "plots"
    main(["plot", "--reports", str(out / "summary.csv"), "--scores", str(scores),
          "--out", str(plots)])
    print("SVGs written:", sorted(p.name for p in plots.glob("*.svg"))[:4], "...")
