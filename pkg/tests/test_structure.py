"""Dot-bracket parsing and the two structure distance metrics."""

from __future__ import annotations

import random

import pytest

from montparnasse.structure import (
    UNPAIRED,
    VALID_PAIRS,
    IllegalCharacter,
    LengthMismatch,
    Pair,
    UnbalancedBrackets,
    Unpaired,
    base_pair_distance,
    hamming_distance,
    is_valid_pair,
    pair_set,
    parse_dotbracket,
    render_dotbracket,
    validate_sequence,
)


def random_structure(rng: random.Random, length: int) -> str:
    """A uniform-ish random balanced dot-bracket string of the given length."""
    if length == 0:
        return ""
    if length < 2 or rng.random() < 0.4:
        return "." + random_structure(rng, length - 1)
    inner = rng.randrange(length - 1)
    rest = length - inner - 2
    return "(" + random_structure(rng, inner) + ")" + random_structure(rng, rest)


def test_parse_two_pairs_with_loop() -> None:
    target = parse_dotbracket("((...))")
    assert set(target.pairs) == {(0, 6), (1, 5)}
    assert target.unpaired_positions() == (2, 3, 4)
    assert target.elements == (
        Pair(0, 6),
        Pair(1, 5),
        Unpaired(2),
        Unpaired(3),
        Unpaired(4),
    )


def test_parse_single_dot() -> None:
    target = parse_dotbracket(".")
    assert target.elements == (Unpaired(0),)
    assert target.length == 1
    assert target.n_pairs == 0


def test_parse_unclosed_bracket() -> None:
    with pytest.raises(UnbalancedBrackets) as excinfo:
        parse_dotbracket("(()")
    assert excinfo.value.position == 0


def test_parse_stray_closer() -> None:
    with pytest.raises(UnbalancedBrackets) as excinfo:
        parse_dotbracket("..)..")
    assert excinfo.value.position == 2


def test_parse_rejects_other_characters() -> None:
    with pytest.raises(IllegalCharacter) as excinfo:
        parse_dotbracket("(x..)")
    assert excinfo.value.position == 1
    assert excinfo.value.char == "x"


def test_pair_table_is_a_fixed_point_free_involution() -> None:
    rng = random.Random(7)
    for _ in range(50):
        target = parse_dotbracket(random_structure(rng, rng.randrange(25)))
        for i, j in enumerate(target.pair_table):
            if j != UNPAIRED:
                assert target.pair_table[j] == i
                assert j != i


def test_elements_cover_every_position_once() -> None:
    rng = random.Random(8)
    for _ in range(50):
        target = parse_dotbracket(random_structure(rng, rng.randrange(25)))
        covered = sum(1 if isinstance(e, Unpaired) else 2 for e in target.elements)
        assert covered == target.length
        openings = [e.i for e in target.elements]
        assert openings == sorted(openings)


def test_render_round_trip() -> None:
    rng = random.Random(9)
    for _ in range(100):
        text = random_structure(rng, rng.randrange(30))
        assert render_dotbracket(parse_dotbracket(text).pair_table) == text


def test_base_pair_distance_examples() -> None:
    assert base_pair_distance("((..))", "((..))") == 0
    assert base_pair_distance("(....)", "......") == 1
    # {(0,5),(1,4)} vs {(1,4)}: symmetric difference is {(0,5)}
    assert base_pair_distance("((..))", ".(..).") == 1


def test_hamming_distance_examples() -> None:
    assert hamming_distance("(...)", "(...)") == 0
    assert hamming_distance("(...)", ".....") == 2
    assert hamming_distance("((..))", ".(..).") == 2


def test_distances_reject_length_mismatch() -> None:
    with pytest.raises(LengthMismatch):
        base_pair_distance("(...)", "....")
    with pytest.raises(LengthMismatch):
        hamming_distance("..", ".")


def test_valid_pair_table() -> None:
    assert is_valid_pair("G", "U")
    assert is_valid_pair("C", "G")
    assert not is_valid_pair("A", "A")
    expect = set(VALID_PAIRS)
    for a in "ACGU":
        for b in "ACGU":
            assert is_valid_pair(a, b) == (a + b in expect)


def test_base_pair_distance_is_a_metric() -> None:
    rng = random.Random(10)
    for _ in range(60):
        n = rng.randrange(1, 21)
        s1 = random_structure(rng, n)
        s2 = random_structure(rng, n)
        s3 = random_structure(rng, n)
        assert base_pair_distance(s1, s2) == base_pair_distance(s2, s1)
        assert (base_pair_distance(s1, s2) == 0) == (pair_set(s1) == pair_set(s2))
        assert base_pair_distance(s1, s3) <= (
            base_pair_distance(s1, s2) + base_pair_distance(s2, s3)
        )


def test_removing_one_pair_moves_both_metrics() -> None:
    rng = random.Random(11)
    checked = 0
    while checked < 40:
        target = parse_dotbracket(random_structure(rng, rng.randrange(4, 25)))
        if not target.pairs:
            continue
        i, j = rng.choice(target.pairs)
        opened = list(target.dotbracket)
        opened[i] = opened[j] = "."
        assert hamming_distance(target.dotbracket, "".join(opened)) == 2
        assert base_pair_distance(target.dotbracket, "".join(opened)) == 1
        checked += 1


def test_validate_sequence() -> None:
    assert validate_sequence("ACGU") == "ACGU"
    with pytest.raises(IllegalCharacter):
        validate_sequence("ACGT")
