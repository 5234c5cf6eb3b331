"""Nested rollout policy adaptation over element-wise sequence moves.

A candidate sequence is built one structure element at a time: a pair
element picks one of the six valid pairs, an unpaired element picks one
of the four bases. Playouts sample moves from a biased softmax policy;
nesting levels adapt the policy toward the best move sequence seen and
stop a level as soon as its best is generated a second time.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .folding.base import EngineConfig
from .folding.engine import FoldingEngine
from .localsearch import RunTracker, SearchState
from .objectives import ScoreVector, evaluate
from .structure import SEQUENCE_ALPHABET, VALID_PAIRS, Pair, TargetStructure

#: Longest kept list of per-level results; only the head is ever read.
BEST_LIST_CAP = 128

#: Softmax biases that mirror the greedy initialization preferences:
#: strong pull toward GC/CG pairs and A at unpaired sites.
DEFAULT_BIASES = {
    "GC": 5.0,
    "CG": 5.0,
    "A": 5.0,
    "AU": 0.0,
    "UA": 0.0,
    "UG": 0.0,
    "GU": 0.0,
    "C": 0.0,
    "G": 0.0,
    "U": 0.0,
}


class Move(NamedTuple):
    element_index: int
    choice: str


class Policy(dict):
    """Move weights keyed by (element_index, choice); absent means 0.0."""

    def __missing__(self, key) -> float:
        return 0.0

    def copy(self) -> "Policy":
        return Policy(self)


@dataclass(frozen=True)
class BiasTable:
    """Per-choice softmax offsets, independent of position."""

    biases: dict = field(default_factory=lambda: dict(DEFAULT_BIASES))

    def __post_init__(self) -> None:
        for choice, value in self.biases.items():
            if not math.isfinite(value):
                raise ValueError(f"bias for {choice!r} is not finite")

    def bias(self, choice: str) -> float:
        return self.biases.get(choice, 0.0)


ZERO_BIASES = BiasTable(biases={})


class LevelResult(NamedTuple):
    scores: ScoreVector
    sequence: tuple[Move, ...]


class BudgetExhausted(RuntimeError):
    """A playout was requested after the evaluation budget ran out.

    Recoverable: best carries the best (sequence, score) seen so far,
    None when nothing was evaluated yet.
    """

    def __init__(self, best: Optional[tuple[str, ScoreVector]]):
        self.best = best
        super().__init__("evaluation budget exhausted")


def legal_moves(target: TargetStructure, element_index: int) -> tuple[Move, ...]:
    element = target.elements[element_index]
    if isinstance(element, Pair):
        return tuple(Move(element_index, c) for c in VALID_PAIRS)
    return tuple(Move(element_index, c) for c in SEQUENCE_ALPHABET)


def move_probability(
    policy: Policy, bias: BiasTable, target: TargetStructure, element_index: int
) -> tuple[tuple[Move, float], ...]:
    """Softmax over the element's legal moves, max-subtracted for safety."""
    moves = legal_moves(target, element_index)
    logits = [policy[m] + bias.bias(m.choice) for m in moves]
    top = max(logits)
    exps = [math.exp(v - top) for v in logits]
    z = sum(exps)
    return tuple((m, e / z) for m, e in zip(moves, exps))


def sequence_from_moves(target: TargetStructure, moves: tuple[Move, ...]) -> str:
    chars = [""] * target.length
    for move in moves:
        element = target.elements[move.element_index]
        if isinstance(element, Pair):
            chars[element.i] = move.choice[0]
            chars[element.j] = move.choice[1]
        else:
            chars[element.i] = move.choice
    return "".join(chars)


def _sample_move(dist, rng: random.Random) -> Move:
    r = rng.random()
    acc = 0.0
    for move, p in dist:
        acc += p
        if r < acc:
            return move
    return dist[-1][0]


def playout(
    policy: Policy,
    bias: BiasTable,
    target: TargetStructure,
    engine: FoldingEngine,
    rng: random.Random,
    gc_target: float = 0.5,
) -> LevelResult:
    """Sample one full move sequence and score it (one fold request)."""
    moves = tuple(
        _sample_move(move_probability(policy, bias, target, index), rng)
        for index in range(len(target.elements))
    )
    sequence = sequence_from_moves(target, moves)
    return LevelResult(evaluate(sequence, target, engine, gc_target), moves)


def adapt(
    policy: Policy,
    best_sequence: tuple[Move, ...],
    bias: BiasTable,
    target: TargetStructure,
    alpha: float = 1.0,
) -> Policy:
    """One gradient step of the policy toward a move sequence.

    Every move probability is computed from the input policy, which is
    left unmodified; the chosen move at each step gains alpha * (1 - p),
    the alternatives lose alpha * p each, so per-element weight mass is
    conserved.
    """
    adapted = policy.copy()
    for chosen in best_sequence:
        for move, p in move_probability(policy, bias, target, chosen.element_index):
            delta = 1.0 if move == chosen else 0.0
            adapted[move] = adapted[move] - alpha * (p - delta)
    return adapted


def default_adapt_gate(level: int, iteration: int) -> bool:
    """When a level adapts its policy after an iteration.

    Levels above 2 adapt every iteration; level 2 adapts once past a
    4-iteration warmup; level 1 also waits out the warmup but then only
    adapts every 4th iteration.
    """
    if level > 2:
        return True
    if level == 2 and iteration > 3:
        return True
    return level == 1 and iteration > 3 and iteration % 4 == 0


def eager_adapt_gate(level: int, iteration: int) -> bool:
    """Alternative gate: below level 3 any post-warmup iteration adapts."""
    return level > 2 or iteration > 3


@dataclass
class _Search:
    """One run's shared state across the level recursion."""

    tracker: RunTracker
    target: TargetStructure
    bias: BiasTable
    alpha: float
    rng: random.Random
    budget: int
    gate: Callable[[int, int], bool]
    playout_fn: Callable | None
    gc_target: float
    playouts: int = 0

    @property
    def stop(self) -> bool:
        return self.playouts >= self.budget or self.tracker.solved

    def _playout(self, policy: Policy) -> LevelResult:
        if self.playouts >= self.budget:
            best = None
            if self.tracker.best_score is not None:
                best = (self.tracker.best_sequence, self.tracker.best_score)
            raise BudgetExhausted(best)
        self.playouts += 1
        if self.playout_fn is not None:
            return self.playout_fn(policy, self.bias, self.target, self.rng)
        moves = tuple(
            _sample_move(move_probability(policy, self.bias, self.target, index), self.rng)
            for index in range(len(self.target.elements))
        )
        score, _ = self.tracker.evaluate(sequence_from_moves(self.target, moves))
        return LevelResult(score, moves)

    def run(self, level: int, policy: Policy) -> LevelResult:
        if level == 0:
            return self._playout(policy)
        best: list[LevelResult] = []
        iteration = 0
        while True:
            child = self.run(level - 1, policy.copy())
            if best and child.sequence == best[0].sequence:
                return child
            best.append(child)
            best.sort(key=lambda r: r.scores)
            del best[BEST_LIST_CAP:]
            if self.stop:
                return best[0]
            if self.gate(level, iteration):
                policy = adapt(policy, best[0].sequence, self.bias, self.target, self.alpha)
            iteration += 1


def mognrpalr(
    level: int,
    policy: Policy,
    bias: BiasTable,
    target: TargetStructure,
    config: EngineConfig | None = None,
    alpha: float = 1.0,
    rng: random.Random | None = None,
    budget: int = 10_000,
    gc_target: float = 0.5,
    playout_fn: Callable | None = None,
    adapt_gate: Callable[[int, int], bool] | None = None,
) -> LevelResult:
    """One nested search from the given level down to playouts.

    The budget caps playout requests globally across the recursion; on
    exhaustion or a solve every level unwinds with its current best.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = rng if rng is not None else random.Random()
    with FoldingEngine(config) as engine:
        tracker = RunTracker(engine, target, gc_target)
        search = _Search(
            tracker=tracker,
            target=target,
            bias=bias,
            alpha=alpha,
            rng=rng,
            budget=budget,
            gate=adapt_gate or default_adapt_gate,
            playout_fn=playout_fn,
            gc_target=gc_target,
        )
        return search.run(level, policy)


def solve(
    target: TargetStructure,
    level: int = 3,
    config: EngineConfig | None = None,
    alpha: float = 1.0,
    bias: BiasTable | None = None,
    budget: int = 10_000,
    rng_seed: int = 0,
    gc_target: float = 0.5,
    playout_fn: Callable | None = None,
    adapt_gate: Callable[[int, int], bool] | None = None,
) -> SearchState:
    """Budget-bounded design run: repeat nested searches until solved.

    Each repeat starts a fresh zero policy at `level` (a finished nested
    search has converged; restarting it is what keeps the budget busy).
    Evaluations, the best candidate and the checkpoint trace are shared
    across repeats.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    bias = bias if bias is not None else BiasTable()
    rng = random.Random(rng_seed)
    with FoldingEngine(config) as engine:
        tracker = RunTracker(engine, target, gc_target)
        search = _Search(
            tracker=tracker,
            target=target,
            bias=bias,
            alpha=alpha,
            rng=rng,
            budget=budget,
            gate=adapt_gate or default_adapt_gate,
            playout_fn=playout_fn,
            gc_target=gc_target,
        )
        while not search.stop:
            try:
                search.run(level, Policy())
            except BudgetExhausted:
                break
        return SearchState(
            best=(tracker.best_sequence, tracker.best_score),
            nevals=tracker.nevals,
            rng_seed=rng_seed,
            budget=budget,
            trace=tuple(tracker.trace),
        )
