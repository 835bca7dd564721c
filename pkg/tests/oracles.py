"""Independent reference implementations used to cross-check the library.

Everything here is deliberately brute force (rasterization, exhaustive
enumeration, exact rational arithmetic) and imports nothing from the
package, so an agreement between the two routes actually means something.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations

import numpy as np

Box = tuple[float, float, float, float]  # (left, top, width, height)


def grid_occlusion_level(target: Box, others: list[Box], canvas: int = 1024) -> float:
    """Occlusion level by counting covered grid cells.

    Boxes must have integer coordinates inside the canvas so rasterized cell
    counts equal exact areas.  An "other" box occludes when its bottom edge
    (top + height) is strictly greater than the target's.
    """
    mask = np.zeros((canvas, canvas), dtype=bool)
    t_left, t_top, t_w, t_h = (int(v) for v in target)
    t_bottom = t_top + t_h
    for left, top, width, height in others:
        left, top, width, height = int(left), int(top), int(width), int(height)
        if top + height > t_bottom:
            mask[max(top, 0) : top + height, max(left, 0) : left + width] = True
    covered = mask[t_top : t_top + t_h, t_left : t_left + t_w].sum()
    return float(covered) / float(t_w * t_h)


def grid_intersection_over_area(target: Box, other: Box, canvas: int = 1024) -> float:
    """IoA by rasterizing both boxes on an integer grid."""
    t_left, t_top, t_w, t_h = (int(v) for v in target)
    mask = np.zeros((canvas, canvas), dtype=bool)
    left, top, width, height = (int(v) for v in other)
    mask[max(top, 0) : top + height, max(left, 0) : left + width] = True
    covered = mask[t_top : t_top + t_h, t_left : t_left + t_w].sum()
    return float(covered) / float(t_w * t_h)


def brute_force_fdr(
    target_vec: list[float],
    pool: dict[int, list[float]],
    target_id: int,
    ratio: float,
) -> float:
    """FDR for one target with plain-python distance enumeration."""
    distances = {i: math.dist(target_vec, v) for i, v in pool.items()}
    d_nn = min(distances.values())
    threshold = d_nn * (1.0 + ratio)
    candidates = [i for i, d in distances.items() if d <= threshold]
    tp = 1 if target_id in candidates else 0
    fp = len(candidates) - tp
    return fp / (fp + tp)


def brute_force_vcom(
    vectors: dict[int, dict[int, list[float]]],
    ratios: list[float],
    last_frame: int | None = None,
) -> tuple[float, int]:
    """(VCOM, skipped count) over hand-placed per-frame, per-id vectors.

    ``vectors`` maps frame -> track_id -> embedding.  Frames whose successor
    holds no continuing identity contribute nothing; identities that do not
    continue are counted as skipped.
    """
    if last_frame is None:
        last_frame = max(vectors)
    skipped = 0
    per_ratio_sums: list[float] = [0.0 for _ in ratios]
    contributing = 0
    for frame in sorted(vectors):
        if frame + 1 > last_frame:
            continue
        pool = vectors.get(frame + 1, {})
        evaluable = [i for i in vectors[frame] if i in pool]
        skipped += len(vectors[frame]) - len(evaluable)
        if not evaluable:
            continue
        contributing += 1
        for ri, ratio in enumerate(ratios):
            frame_sum = 0.0
            for i in evaluable:
                frame_sum += brute_force_fdr(vectors[frame][i], pool, i, ratio)
            per_ratio_sums[ri] += frame_sum / len(evaluable)
    vcom = sum(s / contributing for s in per_ratio_sums) / len(ratios)
    return vcom, skipped


def brute_force_footrule_max(n: int) -> int:
    """Maximum footrule distance by enumerating all permutations of 1..n."""
    identity = list(range(1, n + 1))
    return max(
        sum(abs(a - b) for a, b in zip(identity, perm))
        for perm in permutations(identity)
    )


def exact_squashed_mean(x: Fraction, n_alphas: int = 100) -> Fraction:
    """Exact mean of x / (x + i/n) over the alpha sweep i = 1..n."""
    return sum(x / (x + Fraction(i, n_alphas)) for i in range(1, n_alphas + 1)) / n_alphas


def pearson(xs: list[float], ys: list[float]) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


def rank_then_pearson_spearman(xs: list[float], ys: list[float]) -> float:
    """Spearman correlation built from first principles: average-tie ranks
    computed by sorting, then the textbook Pearson formula."""

    def ranks(values: list[float]) -> list[float]:
        order = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        i = 0
        while i < len(values):
            j = i
            while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                out[order[k]] = avg
            i = j + 1
        return out

    return pearson(ranks(xs), ranks(ys))
