"""Six-objective scoring of candidate sequences, compared lexicographically."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

from .folding.engine import FoldingEngine
from .structure import (
    LengthMismatch,
    TargetStructure,
    base_pair_distance,
    hamming_distance,
)

LESS = -1
EQUAL = 0
GREATER = 1

SCORE_FIELDS = (
    "bpd",
    "hamming",
    "neg_target_probability",
    "ensemble_energy_gap",
    "ensemble_defect",
    "gc_distance",
)


@dataclass(frozen=True, order=True)
class ScoreVector:
    """All six objectives, in comparison order, every one minimized.

    Field order is the comparison order, so the generated tuple ordering
    is exactly the lexicographic multi-objective comparison.
    """

    bpd: int
    hamming: int
    neg_target_probability: float
    ensemble_energy_gap: float
    ensemble_defect: float
    gc_distance: float

    @property
    def solved(self) -> bool:
        return self.bpd == 0

    def as_tuple(self) -> tuple:
        return astuple(self)

    def as_dict(self) -> dict:
        return {name: value for name, value in zip(SCORE_FIELDS, astuple(self))}


def gc_fraction(sequence: str) -> float:
    if not sequence:
        return 0.0
    gc = sum(1 for b in sequence if b in "GC")
    return gc / len(sequence)


def evaluate(
    sequence: str,
    target: TargetStructure,
    engine: FoldingEngine,
    gc_target: float = 0.5,
) -> ScoreVector:
    """Score one candidate with a single (memoized) fold request.

    The energy gap objective is -kT * ln(target probability): zero when
    the ensemble sits entirely on the target, +inf when the target is
    unreachable. Like every other field, smaller is better.
    """
    if len(sequence) != target.length:
        raise LengthMismatch(len(sequence), target.length)
    result = engine.fold(sequence, target)
    p = result.target_probability
    if p > 0.0:
        gap = -engine.config.kT * math.log(p)
    else:
        gap = math.inf
    return ScoreVector(
        bpd=base_pair_distance(result.mfe_structure, target.dotbracket),
        hamming=hamming_distance(result.mfe_structure, target.dotbracket),
        neg_target_probability=-p,
        ensemble_energy_gap=gap,
        ensemble_defect=result.ensemble_defect,
        gc_distance=abs(gc_fraction(sequence) - gc_target),
    )


def compare(a: ScoreVector, b: ScoreVector) -> int:
    """LESS (-1) when a is better, GREATER (1) when worse, else EQUAL."""
    if a < b:
        return LESS
    if b < a:
        return GREATER
    return EQUAL
