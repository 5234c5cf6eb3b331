"""Builtin folding model: every pair scores -1, hairpins have a minimum size.

Maximum-pairing MFE plus exact ensemble quantities from the partition
function. Sequences longer than SCALE_AFTER get a per-position rescaling
so the inside values stay inside float range; all reported quantities are
ratios or logs, so the rescaling cancels.
"""

from __future__ import annotations

import math

import numpy as np

from ..structure import (
    SEQUENCE_ALPHABET,
    TargetStructure,
    render_dotbracket,
    validate_sequence,
)
from .base import FoldResult
from . import kernels

SCALE_AFTER = 200

_BASE_INDEX = {b: i for i, b in enumerate(SEQUENCE_ALPHABET)}

# A=0 C=1 G=2 U=3; true where the two bases may pair.
_PAIR_OK = np.zeros((4, 4), dtype=np.bool_)
for _a, _b in ("CG", "GC", "AU", "UA", "UG", "GU"):
    _PAIR_OK[_BASE_INDEX[_a], _BASE_INDEX[_b]] = True


def encode_sequence(sequence: str) -> np.ndarray:
    validate_sequence(sequence)
    return np.array([_BASE_INDEX[b] for b in sequence], dtype=np.int64)


def pairability(sequence: str, min_hairpin: int) -> np.ndarray:
    """Upper-triangular matrix: can positions i < j pair in this sequence."""
    enc = encode_sequence(sequence)
    n = len(enc)
    ok = _PAIR_OK[enc[:, None], enc[None, :]]
    span = np.arange(n)[None, :] - np.arange(n)[:, None]
    return np.ascontiguousarray(ok & (span > min_hairpin))


def _scale(n: int, kT: float) -> float:
    if n <= SCALE_AFTER:
        return 1.0
    # Rough per-position growth of the inside values: branching ~2 plus
    # half a pair weight per position. Only has to keep floats finite.
    return 1.0 / (2.0 * math.exp(0.5 / kT))


def builtin_fold(sequence: str, target: TargetStructure, min_hairpin: int, kT: float) -> FoldResult:
    n = len(sequence)
    ok = pairability(sequence, min_hairpin)
    w = math.exp(1.0 / kT)
    invrho = _scale(n, kT)

    dp = kernels.max_pairing_table(ok, min_hairpin)
    partner = kernels.mfe_partners(ok, min_hairpin, dp)
    mfe_structure = render_dotbracket(tuple(int(p) for p in partner))
    mfe_energy = -float(dp[0, n - 1]) if n else 0.0

    q = kernels.inside_partition(ok, min_hairpin, w, invrho)
    log_z = math.log(q[0, n - 1]) - n * math.log(invrho) if n else 0.0
    probs = kernels.pair_probability_matrix(ok, min_hairpin, w, invrho, q)

    target_ok = all(ok[p.i, p.j] for p in target.pairs)
    if target_ok:
        target_probability = math.exp(target.n_pairs / kT - log_z)
    else:
        target_probability = 0.0

    sym = probs + probs.T
    paired_any = sym.sum(axis=1)
    defect = float(n)
    for p in target.pairs:
        defect -= 2.0 * float(probs[p.i, p.j])
    for i in target.unpaired_positions():
        defect -= 1.0 - float(paired_any[i])
    defect = min(max(defect, 0.0), float(n))

    return FoldResult(
        mfe_structure=mfe_structure,
        mfe_energy=mfe_energy,
        ensemble_free_energy=-kT * log_z,
        target_probability=target_probability,
        ensemble_defect=defect,
        pair_probabilities=probs,
    )


def builtin_partition_function(sequence: str, min_hairpin: int, kT: float) -> float:
    """Exact Z. Overflows for very long sequences; use logs above that."""
    n = len(sequence)
    if n == 0:
        return 1.0
    ok = pairability(sequence, min_hairpin)
    q = kernels.inside_partition(ok, min_hairpin, math.exp(1.0 / kT), 1.0)
    return float(q[0, n - 1])
