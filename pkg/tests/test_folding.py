"""Builtin engine against the exhaustive-enumeration oracle."""

from __future__ import annotations

import math
import random

import pytest

from montparnasse.folding import (
    EXHAUSTIVE_LIMIT,
    EngineConfig,
    FoldingEngine,
    builtin_fold,
    builtin_partition_function,
    enumerate_structures,
    exhaustive_ensemble,
    exhaustive_ensemble_defect,
    exhaustive_max_pairs,
    exhaustive_partition_function,
    exhaustive_target_probability,
)
from montparnasse.structure import LengthMismatch, parse_dotbracket

REL = 1e-9


def random_sequence(rng: random.Random, length: int) -> str:
    return "".join(rng.choice("ACGU") for _ in range(length))


def open_target(length: int):
    return parse_dotbracket("." * length)


def fold(sequence: str, target_text: str, min_hairpin: int = 3, kT: float = 1.0):
    return builtin_fold(sequence, parse_dotbracket(target_text), min_hairpin, kT)


def test_fold_three_pair_hairpin() -> None:
    result = fold("GGGAAACCC", "(((...)))")
    assert result.mfe_structure == "(((...)))"
    assert result.mfe_energy == -3.0


def test_fold_unpairable_sequence() -> None:
    result = fold("AAAAAAA", ".......")
    assert result.mfe_structure == "......."
    assert result.target_probability == 1.0
    assert result.ensemble_defect == 0.0


def test_fold_hairpin_constraint_limits_pairs() -> None:
    # GCGCGC admits only the (0,5) pair once hairpins need 3 unpaired sites.
    result = fold("GCGCGC", "((..))")
    assert result.mfe_structure.count("(") == 1
    assert exhaustive_max_pairs("GCGCGC") == 1


def test_mfe_tie_break_is_deterministic() -> None:
    # Both sequences have two single-pair optima; the backtrace must pick
    # the earliest opening position and its nearest closing partner.
    assert fold("CAAAGAAAC", ".........").mfe_structure == "(...)...."
    assert fold("GAAACAAAC", ".........").mfe_structure == "(...)...."


def test_mfe_pair_count_matches_oracle() -> None:
    rng = random.Random(21)
    for length in range(4, 13):
        for _ in range(20):
            seq = random_sequence(rng, length)
            result = fold(seq, "." * length)
            assert result.mfe_structure.count("(") == exhaustive_max_pairs(seq)


def test_partition_function_examples() -> None:
    assert builtin_partition_function("AAAA", 3, 1.0) == 1.0
    z = builtin_partition_function("GAAAC", 3, 1.0)
    assert z == pytest.approx(1.0 + math.e, rel=REL)


def test_partition_function_matches_oracle_at_length_15() -> None:
    rng = random.Random(22)
    for _ in range(10):
        seq = random_sequence(rng, 15)
        dp = builtin_partition_function(seq, 3, 1.0)
        exact = exhaustive_partition_function(seq, 3, 1.0)
        assert dp == pytest.approx(exact, rel=REL)


def test_ensemble_quantities_match_oracle() -> None:
    rng = random.Random(23)
    for _ in range(25):
        length = rng.randrange(8, 17)
        seq = random_sequence(rng, length)
        ens = exhaustive_ensemble(seq)
        result = builtin_fold(seq, open_target(length), 3, 1.0)

        assert math.exp(-result.ensemble_free_energy) == pytest.approx(
            ens.partition_function, rel=REL
        )
        for (i, j), p in ens.pair_probability.items():
            assert result.pair_probabilities[i, j] == pytest.approx(p, rel=REL)


def test_defect_and_target_probability_match_oracle_on_real_targets() -> None:
    # Fold a random sequence, then score a second sequence against that
    # fold as the target; exercises paired and unpaired defect terms.
    rng = random.Random(24)
    for _ in range(15):
        length = rng.randrange(9, 16)
        target = parse_dotbracket(fold(random_sequence(rng, length), "." * length).mfe_structure)
        seq = random_sequence(rng, length)
        result = builtin_fold(seq, target, 3, 1.0)
        assert result.ensemble_defect == pytest.approx(
            exhaustive_ensemble_defect(seq, target), rel=REL, abs=1e-12
        )
        assert result.target_probability == pytest.approx(
            exhaustive_target_probability(seq, target), rel=REL, abs=1e-12
        )


def test_two_structure_defect_by_hand() -> None:
    # GAAAC folds as {open, (0,4)} with weights {1, e}; p = e/(1+e) and the
    # three A's can never pair, so defect = 2(1-p).
    p = math.e / (1.0 + math.e)
    result = fold("GAAAC", "(...)")
    assert result.ensemble_defect == pytest.approx(2.0 * (1.0 - p), rel=REL)
    assert result.target_probability == pytest.approx(p, rel=REL)


def test_target_probability_zero_for_unpairable_target() -> None:
    result = fold("AAAAA", "(...)")
    assert result.target_probability == 0.0


def test_pair_probability_rows_sum_below_one() -> None:
    rng = random.Random(25)
    for _ in range(20):
        seq = random_sequence(rng, rng.randrange(5, 30))
        probs = fold(seq, "." * len(seq)).pair_probabilities
        rows = (probs + probs.T).sum(axis=1)
        assert rows.max() <= 1.0 + 1e-9
        assert probs.min() >= -1e-15


def test_appending_unpairable_base_never_shrinks_z() -> None:
    # A pairs only with U, so growing a U-free sequence by A's adds no
    # structures and Z stays put.
    rng = random.Random(26)
    for _ in range(10):
        seq = "".join(rng.choice("ACG") for _ in range(rng.randrange(4, 12)))
        z = builtin_partition_function(seq, 3, 1.0)
        z_grown = builtin_partition_function(seq + "A", 3, 1.0)
        assert z_grown >= z - abs(z) * REL


def test_structure_enumeration_respects_hairpin_size() -> None:
    for pairs in enumerate_structures("GCGCGCGC", 3):
        for i, j in pairs:
            assert j - i > 3


def test_rescaled_long_sequence_stays_consistent() -> None:
    # Past the rescaling threshold all reported quantities are ratios, so
    # a sequence padded with unpairable A's must score like the short one.
    rng = random.Random(27)
    core = "GGGAAACCC"
    padded = core + "A" * 220
    short = fold(core, "(((...)))")
    long_result = builtin_fold(
        padded, parse_dotbracket("(((...)))" + "." * 220), 3, 1.0
    )
    assert long_result.target_probability == pytest.approx(
        short.target_probability, rel=1e-6
    )
    assert long_result.ensemble_defect == pytest.approx(short.ensemble_defect, rel=1e-6)
    assert 0.0 <= long_result.target_probability <= 1.0


def test_engine_memoizes_and_counts_misses() -> None:
    engine = FoldingEngine(EngineConfig())
    target = parse_dotbracket("(((...)))")
    engine.fold("GGGAAACCC", target)
    engine.fold("GGGAAACCC", target)
    assert engine.nevals == 1
    assert engine.requests == 2
    engine.fold("GGGAAACCC", open_target(9))
    assert engine.nevals == 2


def test_engine_rejects_length_mismatch() -> None:
    engine = FoldingEngine()
    with pytest.raises(LengthMismatch):
        engine.fold("GGG", open_target(4))


def test_engine_partition_function_dispatch() -> None:
    engine = FoldingEngine()
    short = "GAAAC"
    assert engine.partition_function(short) == pytest.approx(
        exhaustive_partition_function(short), rel=REL
    )
    long_seq = "GGGAAACCC" + "A" * (EXHAUSTIVE_LIMIT - 9 + 1)
    assert len(long_seq) == EXHAUSTIVE_LIMIT + 1
    assert engine.partition_function(long_seq) == pytest.approx(
        builtin_partition_function(long_seq, 3, 1.0), rel=REL
    )


def test_engine_config_validation() -> None:
    with pytest.raises(ValueError):
        EngineConfig(min_hairpin=-1)
    with pytest.raises(ValueError):
        EngineConfig(kT=0.0)
    with pytest.raises(ValueError):
        EngineConfig(engine_kind="quantum")
    with pytest.raises(ValueError):
        EngineConfig(engine_kind="external")
