"""Dot-bracket parsing, pair tables and structure distance metrics.

Positions are 0-based everywhere, including in reports. A secondary
structure is text over '.', '(' and ')': matched brackets are base pairs,
dots are unpaired sites. Pseudoknot bracket alphabets are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

UNPAIRED = -1

SEQUENCE_ALPHABET = "ACGU"

#: The six pairs an RNA sequence may form, opening base first.
VALID_PAIRS = ("CG", "GC", "AU", "UA", "UG", "GU")

_VALID_PAIR_SET = frozenset(VALID_PAIRS)


class StructureError(ValueError):
    """Malformed structure or sequence text."""


class UnbalancedBrackets(StructureError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"unbalanced bracket at position {position}")


class IllegalCharacter(StructureError):
    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"illegal character {char!r} at position {position}")


class LengthMismatch(ValueError):
    def __init__(self, len_a: int, len_b: int):
        super().__init__(f"length mismatch: {len_a} vs {len_b}")


class Unpaired(NamedTuple):
    i: int


class Pair(NamedTuple):
    i: int
    j: int


Element = Union[Unpaired, Pair]


@dataclass(frozen=True)
class TargetStructure:
    """A parsed dot-bracket target.

    elements lists one entry per unpaired site and one per pair, ordered
    by the position where the element opens; closing brackets do not
    produce elements of their own.
    """

    dotbracket: str
    pair_table: tuple[int, ...]
    elements: tuple[Element, ...]
    length: int
    pairs: tuple[Pair, ...] = field(repr=False)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def unpaired_positions(self) -> tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.pair_table) if j == UNPAIRED)


def parse_dotbracket(text: str) -> TargetStructure:
    """Parse dot-bracket text into a TargetStructure.

    Raises UnbalancedBrackets at the first offending bracket (a ')' with
    no open partner, or the earliest '(' left open at the end) and
    IllegalCharacter for anything outside '.()'.
    """
    table = [UNPAIRED] * len(text)
    stack: list[int] = []
    for pos, ch in enumerate(text):
        if ch == "(":
            stack.append(pos)
        elif ch == ")":
            if not stack:
                raise UnbalancedBrackets(pos)
            opening = stack.pop()
            table[opening] = pos
            table[pos] = opening
        elif ch != ".":
            raise IllegalCharacter(pos, ch)
    if stack:
        raise UnbalancedBrackets(stack[0])

    elements: list[Element] = []
    pairs: list[Pair] = []
    for i, partner in enumerate(table):
        if partner == UNPAIRED:
            elements.append(Unpaired(i))
        elif partner > i:
            pair = Pair(i, partner)
            elements.append(pair)
            pairs.append(pair)
    return TargetStructure(
        dotbracket=text,
        pair_table=tuple(table),
        elements=tuple(elements),
        length=len(text),
        pairs=tuple(pairs),
    )


def render_dotbracket(pair_table) -> str:
    """Rebuild dot-bracket text from a pair table (inverse of parsing)."""
    chars = []
    for i, partner in enumerate(pair_table):
        if partner == UNPAIRED:
            chars.append(".")
        elif partner > i:
            chars.append("(")
        else:
            chars.append(")")
    return "".join(chars)


def pair_set(structure: str) -> frozenset[tuple[int, int]]:
    """The set of (i, j) pairs of a dot-bracket string, i < j."""
    return frozenset(parse_dotbracket(structure).pairs)


def base_pair_distance(s1: str, s2: str) -> int:
    """Size of the symmetric difference of the two structures' pair sets."""
    if len(s1) != len(s2):
        raise LengthMismatch(len(s1), len(s2))
    return len(pair_set(s1) ^ pair_set(s2))


def hamming_distance(s1: str, s2: str) -> int:
    """Number of positions where the two strings differ."""
    if len(s1) != len(s2):
        raise LengthMismatch(len(s1), len(s2))
    return sum(a != b for a, b in zip(s1, s2))


def is_valid_pair(a: str, b: str) -> bool:
    """True iff base a can pair with base b (opening base first)."""
    return a + b in _VALID_PAIR_SET


def validate_sequence(seq: str) -> str:
    """Check that seq is over {A,C,G,U}; returns it unchanged."""
    for pos, ch in enumerate(seq):
        if ch not in SEQUENCE_ALPHABET:
            raise IllegalCharacter(pos, ch)
    return seq
