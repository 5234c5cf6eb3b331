"""Brute-force ensemble computation by enumerating every structure.

Exponential in sequence length. Intended for short sequences (roughly
length <= 25) where it is cheap enough to serve as ground truth for the
dynamic-programming path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..structure import TargetStructure, is_valid_pair, validate_sequence

Pairing = tuple[tuple[int, int], ...]


def enumerate_structures(sequence: str, min_hairpin: int = 3) -> list[Pairing]:
    """Every non-crossing set of valid pairs, each as a sorted pair tuple.

    Includes the empty structure. Pairs (i, j) obey j - i > min_hairpin
    and sequence compatibility.
    """
    validate_sequence(sequence)
    n = len(sequence)
    ok = [
        [j - i > min_hairpin and is_valid_pair(sequence[i], sequence[j]) for j in range(n)]
        for i in range(n)
    ]
    memo: dict[tuple[int, int], list[Pairing]] = {}

    def region(i: int, j: int) -> list[Pairing]:
        if j - i <= min_hairpin:
            return [()]
        key = (i, j)
        cached = memo.get(key)
        if cached is not None:
            return cached
        out: list[Pairing] = list(region(i, j - 1))
        for k in range(i, j - min_hairpin):
            if not ok[k][j]:
                continue
            for left in region(i, k - 1):
                for inner in region(k + 1, j - 1):
                    out.append(left + ((k, j),) + inner)
        memo[key] = out
        return out

    if n == 0:
        return [()]
    return region(0, n - 1)


@dataclass(frozen=True)
class ExhaustiveEnsemble:
    """Aggregates over the full structure list of one sequence."""

    sequence: str
    min_hairpin: int
    kT: float
    structures: tuple[Pairing, ...]
    partition_function: float
    max_pairs: int
    pair_probability: dict[tuple[int, int], float]

    def unpaired_probability(self, i: int) -> float:
        paired = sum(p for (a, b), p in self.pair_probability.items() if i in (a, b))
        return 1.0 - paired


def exhaustive_ensemble(sequence: str, min_hairpin: int = 3, kT: float = 1.0) -> ExhaustiveEnsemble:
    structures = enumerate_structures(sequence, min_hairpin)
    w = math.exp(1.0 / kT)
    weights = [w ** len(s) for s in structures]
    z = sum(weights)
    probs: dict[tuple[int, int], float] = {}
    for s, wt in zip(structures, weights):
        for pair in s:
            probs[pair] = probs.get(pair, 0.0) + wt
    for pair in probs:
        probs[pair] /= z
    return ExhaustiveEnsemble(
        sequence=sequence,
        min_hairpin=min_hairpin,
        kT=kT,
        structures=tuple(structures),
        partition_function=z,
        max_pairs=max(len(s) for s in structures),
        pair_probability=probs,
    )


def exhaustive_partition_function(sequence: str, min_hairpin: int = 3, kT: float = 1.0) -> float:
    return exhaustive_ensemble(sequence, min_hairpin, kT).partition_function


def exhaustive_max_pairs(sequence: str, min_hairpin: int = 3) -> int:
    return max(len(s) for s in enumerate_structures(sequence, min_hairpin))


def exhaustive_target_probability(
    sequence: str, target: TargetStructure, min_hairpin: int = 3, kT: float = 1.0
) -> float:
    ens = exhaustive_ensemble(sequence, min_hairpin, kT)
    want = tuple(sorted((p.i, p.j) for p in target.pairs))
    weight = sum(
        math.exp(len(s) / kT) for s in ens.structures if tuple(sorted(s)) == want
    )
    return weight / ens.partition_function


def exhaustive_ensemble_defect(
    sequence: str, target: TargetStructure, min_hairpin: int = 3, kT: float = 1.0
) -> float:
    ens = exhaustive_ensemble(sequence, min_hairpin, kT)
    defect = float(target.length)
    for p in target.pairs:
        defect -= 2.0 * ens.pair_probability.get((p.i, p.j), 0.0)
    for i in target.unpaired_positions():
        defect -= ens.unpaired_probability(i)
    return defect
