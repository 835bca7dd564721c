"""Rank-based comparison of complexity metrics against tracker performance.

Sequences are ranked from simple to complex: complexity metrics ascending
(lowest value is rank 1), performance scores descending (highest score is
rank 1).  Two rankings are compared with the footrule distance (sum of
absolute rank differences), normalized by its maximum so differently sized
sets stay comparable, plus rank correlation for the full matrix view.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError

ASCENDING_IS_SIMPLE = "ascending_is_simple"
DESCENDING_IS_SIMPLE = "descending_is_simple"


@dataclass(frozen=True)
class ScoredSequences:
    """Named values plus the direction in which low complexity sorts first."""

    entries: tuple[tuple[str, float], ...]
    direction: str = ASCENDING_IS_SIMPLE

    def __post_init__(self) -> None:
        names = [name for name, _ in self.entries]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate sequence names: {dupes}")
        if any(not np.isfinite(v) for _, v in self.entries):
            raise ValidationError("all values must be finite")
        if self.direction not in (ASCENDING_IS_SIMPLE, DESCENDING_IS_SIMPLE):
            raise ValidationError(f"unknown direction {self.direction!r}")

    def restricted_to(self, names: set[str]) -> "ScoredSequences":
        return ScoredSequences(
            tuple((n, v) for n, v in self.entries if n in names), self.direction
        )


@dataclass(frozen=True)
class RankComparison:
    """Footrule comparison of a metric ranking against a reference ranking."""

    fd: int
    fd_max: int
    nfd: float
    n: int
    rank_table: tuple[tuple[str, int, int], ...]  # (name, metric_rank, reference_rank)

    @property
    def mean_fd(self) -> float:
        return self.fd / self.n


def rank(scored: ScoredSequences) -> dict[str, int]:
    """1-based ranks from simple (1) to complex (n).

    Exact value ties break lexicographically by sequence name so the result
    is always a proper permutation.

    Raises:
        ValidationError: fewer than 2 entries.
    """
    if len(scored.entries) < 2:
        raise ValidationError(f"need at least 2 entries to rank, got {len(scored.entries)}")
    reverse = scored.direction == DESCENDING_IS_SIMPLE
    ordered = sorted(scored.entries, key=lambda e: (-e[1] if reverse else e[1], e[0]))
    return {name: position for position, (name, _) in enumerate(ordered, start=1)}


def footrule_distance(ranks_a: Mapping[str, int], ranks_b: Mapping[str, int]) -> int:
    """Sum of absolute rank differences over a shared name set.

    Raises:
        ValidationError: the two rankings cover different names.
    """
    if set(ranks_a) != set(ranks_b):
        only_a = sorted(set(ranks_a) - set(ranks_b))
        only_b = sorted(set(ranks_b) - set(ranks_a))
        raise ValidationError(
            f"rankings cover different sequences (only in first: {only_a}, "
            f"only in second: {only_b})"
        )
    return sum(abs(ranks_a[name] - ranks_b[name]) for name in ranks_a)


def footrule_max(n: int) -> int:
    """Largest possible footrule distance between two rankings of n items.

    Even n: sum(1..n) - n/2; odd n: sum(1..n) - (n+1)/2.  Either way this is
    achieved by the full reversal.

    Raises:
        ValidationError: n < 2.
    """
    if n < 2:
        raise ValidationError(f"footrule_max requires n >= 2, got {n}")
    total = n * (n + 1) // 2
    return total - (n // 2 if n % 2 == 0 else (n + 1) // 2)


def normalized_fd(fd: int, fd_max: int) -> float:
    """fd / fd_max, in [0, 1].

    Raises:
        ValidationError: fd_max is not positive.
    """
    if fd_max <= 0:
        raise ValidationError(f"fd_max must be positive, got {fd_max}")
    return fd / fd_max


def compare_rankings(metric: ScoredSequences, reference: ScoredSequences) -> RankComparison:
    """Rank both inputs and compare them with the footrule distance."""
    shared = {n for n, _ in metric.entries} & {n for n, _ in reference.entries}
    metric_ranks = rank(metric.restricted_to(shared))
    reference_ranks = rank(reference.restricted_to(shared))
    fd = footrule_distance(metric_ranks, reference_ranks)
    n = len(shared)
    fd_max = footrule_max(n)
    table = tuple(
        (name, metric_ranks[name], reference_ranks[name]) for name in sorted(shared)
    )
    return RankComparison(fd=fd, fd_max=fd_max, nfd=normalized_fd(fd, fd_max), n=n, rank_table=table)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation: Pearson correlation of the average-tie rank vectors.

    Raises:
        ValidationError: unequal lengths, fewer than 3 pairs, or a constant
            input column (correlation undefined).
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 3:
        raise ValidationError(f"need at least 3 pairs, got {len(x)}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValidationError("undefined correlation: constant input column")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.dot(rx, ry) / np.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


def load_tracker_scores(path: Path | str, metric: str = "hota") -> ScoredSequences:
    """Load per-sequence tracker performance scores from CSV.

    Two layouts are accepted (detected from the header, case-insensitive):

    * wide: ``sequence,hota,mota,...`` with one row per sequence;
    * long: ``tracker,sequence,hota,...`` with one row per (tracker,
      sequence), averaged per sequence over all trackers.

    Returns the requested column as a descending-is-simple ranking input
    (higher score = easier sequence).

    Raises:
        ParseError: missing header or missing sequence column.
        ValidationError: unknown metric column, duplicate rows.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        columns = {name.strip().lower(): i for i, name in enumerate(header)}
        if "sequence" not in columns:
            raise ParseError(f"{path}: header must contain a 'sequence' column")
        metric_key = metric.strip().lower()
        if metric_key not in columns:
            available = sorted(set(columns) - {"sequence", "tracker"})
            raise ValidationError(
                f"{path}: unknown column {metric!r}; available: {available}"
            )
        long_form = "tracker" in columns
        seq_col = columns["sequence"]
        val_col = columns[metric_key]
        tracker_col = columns.get("tracker")

        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        seen_pairs: set[tuple[str, str]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            seq_name = row[seq_col].strip()
            try:
                value = float(row[val_col])
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}:{lineno}: bad value for {metric!r}: {exc}") from exc
            if long_form:
                pair = (row[tracker_col].strip(), seq_name)
                if pair in seen_pairs:
                    raise ValidationError(f"{path}:{lineno}: duplicate (tracker, sequence) {pair}")
                seen_pairs.add(pair)
            elif seq_name in sums:
                raise ValidationError(f"{path}:{lineno}: duplicate sequence row {seq_name!r}")
            sums[seq_name] = sums.get(seq_name, 0.0) + value
            counts[seq_name] = counts.get(seq_name, 0) + 1

    entries = tuple((name, sums[name] / counts[name]) for name in sorted(sums))
    return ScoredSequences(entries=entries, direction=DESCENDING_IS_SIMPLE)
