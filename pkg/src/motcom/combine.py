"""Fusion of the three sub-scores into a single complexity value.

The default is a weighted arithmetic mean with equal weights.  Quadratic,
geometric, and harmonic variants are available for comparison; those are
defined unweighted, so requesting custom weights with them only triggers a
warning.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .errors import ValidationError


class MeanKind(str, enum.Enum):
    ARITHMETIC = "arithmetic"
    QUADRATIC = "quadratic"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class Weights:
    """Non-negative weights for (occlusion, motion, visual); not all zero."""

    w_ocom: float = 1.0
    w_mcom: float = 1.0
    w_vcom: float = 1.0

    def __post_init__(self) -> None:
        values = (self.w_ocom, self.w_mcom, self.w_vcom)
        if any(w < 0 for w in values):
            raise ValidationError(f"weights must be non-negative, got {values}")
        if sum(values) <= 0:
            raise ValidationError("at least one weight must be positive")


@dataclass(frozen=True)
class MotcomScore:
    """Combined score with a record of how it was produced.

    ``partial`` marks scores combined from fewer than three sub-scores
    (the visual score can be skipped when no images are available); the
    missing entry is ``None`` in ``sub_scores``.
    """

    motcom: float
    mean_kind: str
    weights: Weights
    sub_scores: tuple[float, float, Optional[float]]
    partial: bool = False


def _mean(values: list[float], weights: list[float], kind: MeanKind) -> float:
    if kind is MeanKind.ARITHMETIC:
        return sum(w * v for w, v in zip(weights, values)) / sum(weights)
    if kind is MeanKind.QUADRATIC:
        return math.sqrt(sum(v * v for v in values) / len(values))
    if kind is MeanKind.GEOMETRIC:
        if any(v == 0 for v in values):
            return 0.0
        return math.prod(values) ** (1.0 / len(values))
    if kind is MeanKind.HARMONIC:
        if any(v == 0 for v in values):
            return 0.0
        return len(values) / sum(1.0 / v for v in values)
    raise ValidationError(f"unknown mean kind {kind!r}")


def combine(
    ocom: float,
    mcom: float,
    vcom: Optional[float],
    weights: Weights = Weights(),
    kind: MeanKind | str = MeanKind.ARITHMETIC,
) -> MotcomScore:
    """Combine sub-scores into the overall complexity score.

    All sub-scores must lie in [0, 1].  ``vcom=None`` produces a partial
    score over the remaining two sub-scores (with their weights for the
    arithmetic mean).  Geometric and harmonic means of any zero sub-score
    are 0 by continuity.

    Raises:
        ValidationError: sub-score outside [0, 1], or all-zero weights.
    """
    kind = MeanKind(kind)
    named = [("ocom", ocom, weights.w_ocom), ("mcom", mcom, weights.w_mcom)]
    if vcom is not None:
        named.append(("vcom", vcom, weights.w_vcom))
    for name, value, _ in named:
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"{name} must be in [0, 1], got {value}")

    active = [(v, w) for _, v, w in named]
    if kind is MeanKind.ARITHMETIC and sum(w for _, w in active) <= 0:
        raise ValidationError("active weights sum to zero")
    if kind is not MeanKind.ARITHMETIC and (weights.w_ocom, weights.w_mcom, weights.w_vcom) != (
        1.0,
        1.0,
        1.0,
    ):
        warnings.warn(
            f"{kind.value} mean is defined unweighted; custom weights are ignored",
            stacklevel=2,
        )

    value = _mean([v for v, _ in active], [w for _, w in active], kind)
    return MotcomScore(
        motcom=value,
        mean_kind=kind.value,
        weights=weights,
        sub_scores=(ocom, mcom, vcom),
        partial=vcom is None,
    )
