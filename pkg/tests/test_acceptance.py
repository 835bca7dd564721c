"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  The final criterion
needs real MOT17 ground truth plus tracker scores and is skipped unless
MOTCOM_MOT17_ROOT and MOTCOM_MOT17_SCORES point at them.
"""

from __future__ import annotations

import os
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from motcom.cli import main
from motcom.combine import combine
from motcom.embed import BlurSpec, embed_object
from motcom.embed import test_backend as make_test_backend
from motcom.ingest import frame_image_path, load_sequence
from motcom.motion import DEFAULT_ALPHA_SET, compute_mcom, log_sigmoid_weight
from motcom.occlusion import compute_ocom, intersection_over_area, occlusion_level
from motcom.ranking import footrule_max
from motcom.report import cmd_rank
from motcom.visual import DEFAULT_RATIO_SET, VisualConfig, compute_vcom
from motcom.visual import fdr_for_target
from motcom.embed import FeatureVector

from conftest import make_seq, state, two_sequence_dataset, write_sequence_dir
from oracles import (
    brute_force_footrule_max,
    brute_force_vcom,
    exact_squashed_mean,
    grid_occlusion_level,
)


def _report(name: str, started: float, budget_s: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget_s, f"{name} exceeded its {budget_s:.0f}s budget ({elapsed:.1f}s)"
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.2f}s)")


def test_formula_unit_suite():
    started = time.perf_counter()
    # squashing function hits 0.5 exactly at x == alpha for the whole sweep
    assert len(DEFAULT_ALPHA_SET) == 100
    for alpha in DEFAULT_ALPHA_SET:
        assert log_sigmoid_weight(alpha, alpha) == 0.5
    # intersection-over-area endpoints
    assert intersection_over_area((0, 0, 10, 10), (0, 0, 10, 10)) == 1.0
    assert intersection_over_area((0, 0, 10, 10), (30, 30, 5, 5)) == 0.0
    # maximal footrule distance, both parity branches plus brute force
    assert footrule_max(4) == 8
    assert footrule_max(7) == 24
    for n in range(2, 7):
        assert footrule_max(n) == brute_force_footrule_max(n)
    _report("formula-unit-suite", started, budget_s=1.0)


def test_occlusion_oracle():
    started = time.perf_counter()
    rng = np.random.RandomState(2024)
    for _ in range(50):
        n_boxes = rng.randint(2, 11)
        boxes = [
            state(
                1,
                track_id,
                int(rng.randint(0, 880)),
                int(rng.randint(0, 880)),
                int(rng.randint(4, 120)),
                int(rng.randint(4, 120)),
            )
            for track_id in range(1, n_boxes + 1)
        ]
        for target in boxes:
            others = [b for b in boxes if b.track_id != target.track_id]
            got = occlusion_level(target, others)
            want = grid_occlusion_level(target.box, [b.box for b in others], canvas=1000)
            assert abs(got - want) <= 1e-9

    # translation and integer-scale invariance of the whole-sequence score,
    # exact because integer-valued coordinates stay exact in float
    states = [
        state(f, t, int(rng.randint(0, 700)), int(rng.randint(0, 700)),
              int(rng.randint(5, 90)), int(rng.randint(5, 90)))
        for t in range(1, 8)
        for f in range(1, 5)
    ]
    base = compute_ocom(make_seq(states), mode="force_computed").ocom
    moved = [
        state(s.frame, s.track_id, s.left + 211, s.top + 97, s.width, s.height) for s in states
    ]
    scaled = [
        state(s.frame, s.track_id, 4 * s.left, 4 * s.top, 4 * s.width, 4 * s.height)
        for s in states
    ]
    assert compute_ocom(make_seq(moved), mode="force_computed").ocom == base
    assert compute_ocom(make_seq(scaled), mode="force_computed").ocom == base
    _report("occlusion-oracle", started, budget_s=10.0)


def test_motion_properties():
    started = time.perf_counter()
    # constant velocity with a zero first step (i.e. no motion at all)
    stationary = [state(f, t, 15 * t, 30, 10, 12) for t in (1, 2, 3) for f in range(1, 9)]
    assert compute_mcom(make_seq(stationary)).mcom == 0.0

    # single evaluable term with error/size == 1 against exact arithmetic
    single = [state(1, 1, 0, 0, 10, 10), state(2, 1, 10, 0, 10, 10)]
    report = compute_mcom(make_seq(single))
    exact = exact_squashed_mean(Fraction(1))
    assert abs(report.mcom - float(exact)) <= 1e-9

    # translation and joint-scale invariance
    rng = np.random.RandomState(7)
    states = [
        state(f, t, float(rng.uniform(0, 400)), float(rng.uniform(0, 400)),
              float(rng.uniform(5, 60)), float(rng.uniform(5, 60)))
        for t in range(1, 6)
        for f in range(1, 10)
    ]
    base = compute_mcom(make_seq(states)).mcom
    moved = [
        state(s.frame, s.track_id, s.left + 5000.5, s.top - 321.75, s.width, s.height)
        for s in states
    ]
    scaled = [
        state(s.frame, s.track_id, 2.5 * s.left, 2.5 * s.top, 2.5 * s.width, 2.5 * s.height)
        for s in states
    ]
    assert abs(compute_mcom(make_seq(moved)).mcom - base) <= 1e-9
    assert abs(compute_mcom(make_seq(scaled)).mcom - base) <= 1e-9
    _report("motion-properties", started, budget_s=5.0)


def test_visual_oracle(tmp_path):
    started = time.perf_counter()
    backend = make_test_backend()
    blur = BlurSpec(kernel_size=21, sigma=4.0)
    rng = np.random.RandomState(55)

    # synthetic two-frame fixtures, full 100-ratio sweep against brute force
    for case in range(3):
        states = []
        for track_id in range(1, 4 + case):
            for frame in (1, 2):
                states.append(
                    state(
                        frame,
                        track_id,
                        float(rng.randint(2, 44)),
                        float(rng.randint(2, 30)),
                        float(rng.randint(6, 14)),
                        float(rng.randint(6, 14)),
                    )
                )
        seq_dir = write_sequence_dir(tmp_path, f"pair-{case}", states)
        seq = load_sequence(seq_dir)
        got = compute_vcom(seq, cfg=VisualConfig(blur=blur), backend=backend)

        from PIL import Image

        vectors: dict[int, dict[int, list[float]]] = {}
        for s in states:
            with Image.open(frame_image_path(seq, s.frame)) as img:
                image = np.asarray(img.convert("RGB"))
            fv = embed_object(image, s, blur, backend)
            vectors.setdefault(s.frame, {})[s.track_id] = fv.values.tolist()
        want, _ = brute_force_vcom(vectors, list(DEFAULT_RATIO_SET))
        assert abs(got.vcom - want) <= 1e-9

        # per-ratio agreement across the whole sweep, reusing the embeddings
        # through the on-disk cache so each single-ratio run is cheap
        cache_path = tmp_path / f"pair-{case}.npz"
        compute_vcom(
            seq, cfg=VisualConfig(blur=blur, cache_path=cache_path), backend=backend
        )
        for ratio in DEFAULT_RATIO_SET:
            single = compute_vcom(
                seq,
                cfg=VisualConfig(ratio_set=(ratio,), blur=blur, cache_path=cache_path),
                backend=backend,
            )
            want_single, _ = brute_force_vcom(vectors, [ratio])
            assert abs(single.vcom - want_single) <= 1e-9

    # the three-vector radius example reproduces exactly
    target = FeatureVector(values=np.array([0.0, 0.0]), frame=1, track_id=1)
    pool = [
        FeatureVector(values=np.array([1.0, 0.0]), frame=2, track_id=2),
        FeatureVector(values=np.array([1.6, 0.0]), frame=2, track_id=1),
        FeatureVector(values=np.array([9.0, 0.0]), frame=2, track_id=3),
    ]
    assert fdr_for_target(target, pool, 1, 0.5) == 1.0
    assert fdr_for_target(target, pool, 1, 0.7) == 0.5
    _report("visual-oracle", started, budget_s=30.0)


def test_combiner_properties():
    started = time.perf_counter()
    rng = np.random.RandomState(31415)
    for _ in range(1000):
        o, m, v = rng.uniform(0.0005, 1.0, size=3)
        quadratic = combine(o, m, v, kind="quadratic").motcom
        arithmetic = combine(o, m, v, kind="arithmetic").motcom
        geometric = combine(o, m, v, kind="geometric").motcom
        harmonic = combine(o, m, v, kind="harmonic").motcom
        assert quadratic >= arithmetic - 1e-12
        assert arithmetic >= geometric - 1e-12
        assert geometric >= harmonic - 1e-12
    assert abs(combine(0.3, 0.6, 0.9, kind="harmonic").motcom - 0.49091) <= 1e-6
    _report("combiner-properties", started, budget_s=5.0)


def test_end_to_end_determinism(tmp_path):
    started = time.perf_counter()
    dataset = two_sequence_dataset(tmp_path)
    scores = tmp_path / "scores.csv"
    scores.write_text("sequence,hota\nsynth-01,48\nsynth-02,63\n")

    artifacts: list[dict[str, bytes]] = []
    for run, threads in (("run-a", 1), ("run-b", 1), ("run-c", 8)):
        out = tmp_path / run
        plots = out / "plots"
        assert main(["compute", "--data", str(dataset), "--out", str(out),
                     "--backend", "test", "--threads", str(threads)]) == 0
        assert main(["plot", "--reports", str(out / "summary.csv"),
                     "--scores", str(scores), "--out", str(plots)]) == 0
        svgs = sorted(plots.glob("*.svg"))
        assert svgs, "plot step produced no SVG files"
        artifacts.append(
            {
                "summary.csv": (out / "summary.csv").read_bytes(),
                **{p.name: p.read_bytes() for p in svgs},
            }
        )

    rows = artifacts[0]["summary.csv"].decode().strip().splitlines()
    assert len(rows) == 3  # header + 2 sequences
    assert artifacts[0] == artifacts[1] == artifacts[2]
    _report("end-to-end-determinism", started, budget_s=60.0)


@pytest.mark.skipif(
    not (os.environ.get("MOTCOM_MOT17_ROOT") and os.environ.get("MOTCOM_MOT17_SCORES")),
    reason="MOT17 ground truth and tracker scores not supplied "
    "(set MOTCOM_MOT17_ROOT and MOTCOM_MOT17_SCORES)",
)
def test_mot17_rank_reproduction(tmp_path):
    started = time.perf_counter()
    root = Path(os.environ["MOTCOM_MOT17_ROOT"])
    scores = Path(os.environ["MOTCOM_MOT17_SCORES"])
    out = tmp_path / "mot17"

    has_images = any(p.is_dir() for p in root.glob("*/img1"))
    args = ["compute", "--data", str(root), "--out", str(out)]
    if not has_images:
        args.append("--no-vcom")
    assert main(args) == 0

    comparisons = cmd_rank(out / "summary.csv", scores, None, "hota", out)
    motcom_fd = comparisons["motcom"].mean_fd
    assert motcom_fd <= comparisons["density"].mean_fd
    assert motcom_fd <= comparisons["tracks"].mean_fd
    assert motcom_fd <= 1.15  # target 0.86 (NFD 0.25) within one rank swap
    _report("mot17-rank-reproduction", started, budget_s=3600.0)
