"""Greedy multi-objective local search and progressive narrowing.

Both searchers spend their budget in memoized-fold misses: re-evaluating
a sequence the engine has already folded is free. A run that can no
longer produce novel candidates (tiny targets, exhausted neighborhoods)
is cut off by a stagnation guard instead of spinning on cache hits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .folding.base import EngineConfig
from .folding.engine import FoldingEngine
from .objectives import ScoreVector, evaluate
from .structure import SEQUENCE_ALPHABET, VALID_PAIRS, Pair, TargetStructure

#: Evaluations spent in the greedy (GC/CG) phase before going fully random.
GREEDY_PHASE = 500

#: Trace granularity for the tuning dataset.
CHECKPOINT_EVERY = 100

#: Consecutive memo hits after which a restart gives up.
STAGNATION_LIMIT = 20_000

_GREEDY_PAIRS = ("GC", "CG")


def initial_sequence(target: TargetStructure, rng: random.Random) -> str:
    """Pairs drawn uniformly from {GC, CG}, unpaired positions all A."""
    chars = ["A"] * target.length
    for element in target.elements:
        if isinstance(element, Pair):
            a, b = rng.choice(_GREEDY_PAIRS)
            chars[element.i] = a
            chars[element.j] = b
    return "".join(chars)


def greedy_mutation(seq: str, target: TargetStructure, rng: random.Random) -> str:
    """Redraw one pair element as GC or CG; new sequence, input untouched.

    Targets without pairs fall back to random_mutation so the search
    still moves.
    """
    if not target.pairs:
        return random_mutation(seq, target, rng)
    pair = target.pairs[rng.randrange(len(target.pairs))]
    a, b = rng.choice(_GREEDY_PAIRS)
    chars = list(seq)
    chars[pair.i] = a
    chars[pair.j] = b
    return "".join(chars)


def random_mutation(seq: str, target: TargetStructure, rng: random.Random) -> str:
    """Redraw one element: a pair over all six pairs, a site over ACGU."""
    element = target.elements[rng.randrange(len(target.elements))]
    chars = list(seq)
    if isinstance(element, Pair):
        a, b = rng.choice(VALID_PAIRS)
        chars[element.i] = a
        chars[element.j] = b
    else:
        chars[element.i] = rng.choice(SEQUENCE_ALPHABET)
    return "".join(chars)


class RunTracker:
    """Per-run bookkeeping shared by all searchers.

    Routes evaluations through one engine, keeps the best-so-far under
    strict lexicographic improvement, counts consecutive memo hits and
    records the checkpoint trace (best bpd every CHECKPOINT_EVERY
    misses).
    """

    def __init__(self, engine: FoldingEngine, target: TargetStructure, gc_target: float = 0.5):
        self.engine = engine
        self.target = target
        self.gc_target = gc_target
        self.best_sequence: str | None = None
        self.best_score: ScoreVector | None = None
        self.trace: list[tuple[int, int]] = []
        self.consecutive_hits = 0

    @property
    def nevals(self) -> int:
        return self.engine.nevals

    @property
    def solved(self) -> bool:
        return self.best_score is not None and self.best_score.solved

    def evaluate(self, sequence: str) -> tuple[ScoreVector, bool]:
        """Score a candidate; returns (score, counted) where counted is
        True when the fold was a memo miss and spent budget."""
        before = self.engine.nevals
        score = evaluate(sequence, self.target, self.engine, self.gc_target)
        counted = self.engine.nevals != before
        if counted:
            self.consecutive_hits = 0
            if self.best_score is None or score < self.best_score:
                self.best_sequence = sequence
                self.best_score = score
            if self.engine.nevals % CHECKPOINT_EVERY == 0:
                self.trace.append((self.engine.nevals, self.best_score.bpd))
        else:
            self.consecutive_hits += 1
        return score, counted

    @property
    def stagnated(self) -> bool:
        return self.consecutive_hits >= STAGNATION_LIMIT


@dataclass(frozen=True)
class SearchState:
    """Final state of one run."""

    best: tuple[str, ScoreVector]
    nevals: int
    rng_seed: int
    budget: int
    trace: tuple[tuple[int, int], ...]

    @property
    def best_sequence(self) -> str:
        return self.best[0]

    @property
    def best_score(self) -> ScoreVector:
        return self.best[1]

    @property
    def solved(self) -> bool:
        return self.best_score.solved


@dataclass(frozen=True)
class NarrowingProfile:
    """Narrowing schedule: one threshold per starting incumbent.

    thresholds[s] is the per-incumbent evaluation count at which the
    s-th narrowing fires; their sum is the per-restart budget.
    """

    thresholds: tuple[int, ...]
    restarts: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if not self.thresholds:
            raise ValueError("profile needs at least one threshold")
        if any(t < 1 for t in self.thresholds):
            raise ValueError("thresholds must be >= 1")
        if any(a > b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be non-decreasing")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def slots(self) -> int:
        return len(self.thresholds)

    @property
    def per_restart_budget(self) -> int:
        return sum(self.thresholds)


def mogrls(
    target: TargetStructure,
    budget: int,
    rng_seed: int,
    config: EngineConfig | None = None,
    gc_target: float = 0.5,
) -> SearchState:
    """Single-incumbent greedy local search.

    Greedy pair mutations for the first GREEDY_PHASE evaluations, random
    element mutations after; the incumbent moves only on strict
    improvement. Stops at the budget or on bpd = 0.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = random.Random(rng_seed)
    with FoldingEngine(config) as engine:
        tracker = RunTracker(engine, target, gc_target)
        current = initial_sequence(target, rng)
        current_score, _ = tracker.evaluate(current)
        while tracker.nevals < budget and not tracker.solved and not tracker.stagnated:
            if tracker.nevals < GREEDY_PHASE:
                candidate = greedy_mutation(current, target, rng)
            else:
                candidate = random_mutation(current, target, rng)
            score, _ = tracker.evaluate(candidate)
            if score < current_score:
                current, current_score = candidate, score
        return SearchState(
            best=(tracker.best_sequence, tracker.best_score),
            nevals=tracker.nevals,
            rng_seed=rng_seed,
            budget=budget,
            trace=tuple(tracker.trace),
        )


@dataclass
class _Slot:
    index: int
    sequence: str
    score: ScoreVector
    counter: int
    live: bool = True


def _drop_worst(slots: list[_Slot], thresholds: tuple[int, ...], stage: int) -> int:
    """Fire every narrowing whose threshold some live counter has reached.

    Ties on score drop the larger slot index. Returns the new stage.
    """
    live = [s for s in slots if s.live]
    while (
        len(live) > 1
        and stage < len(thresholds)
        and any(s.counter >= thresholds[stage] for s in live)
    ):
        worst = max(live, key=lambda s: (s.score, s.index))
        worst.live = False
        live.remove(worst)
        stage += 1
    return stage


def progressive_narrowing(
    target: TargetStructure,
    profile: NarrowingProfile,
    rng_seed: int,
    config: EngineConfig | None = None,
    gc_target: float = 0.5,
) -> SearchState:
    """Run len(thresholds) incumbents and narrow down to one.

    Each restart initializes all incumbents, round-robins over the live
    ones (each with its own greedy-phase counter) and removes the worst
    whenever a live counter reaches the current threshold. The restart
    ends when the last incumbent exhausts the final threshold. With a
    single threshold this reduces exactly to mogrls.
    """
    rng = random.Random(rng_seed)
    budget = profile.restarts * profile.per_restart_budget
    with FoldingEngine(config) as engine:
        tracker = RunTracker(engine, target, gc_target)
        for _ in range(profile.restarts):
            if tracker.solved:
                break
            _narrowing_restart(tracker, target, profile.thresholds, rng)
        return SearchState(
            best=(tracker.best_sequence, tracker.best_score),
            nevals=tracker.nevals,
            rng_seed=rng_seed,
            budget=budget,
            trace=tuple(tracker.trace),
        )


def _narrowing_restart(
    tracker: RunTracker,
    target: TargetStructure,
    thresholds: tuple[int, ...],
    rng: random.Random,
) -> None:
    slots: list[_Slot] = []
    for index in range(len(thresholds)):
        seq = initial_sequence(target, rng)
        score, counted = tracker.evaluate(seq)
        slots.append(_Slot(index, seq, score, counter=1 if counted else 0))
        if tracker.solved:
            return
    stage = _drop_worst(slots, thresholds, 0)

    def finished() -> bool:
        live = [s for s in slots if s.live]
        return len(live) == 1 and live[0].counter >= thresholds[-1]

    while not finished():
        for slot in [s for s in slots if s.live]:
            if not slot.live:
                continue
            if slot.counter < GREEDY_PHASE:
                candidate = greedy_mutation(slot.sequence, target, rng)
            else:
                candidate = random_mutation(slot.sequence, target, rng)
            score, counted = tracker.evaluate(candidate)
            if counted:
                slot.counter += 1
            if score < slot.score:
                slot.sequence, slot.score = candidate, score
            if tracker.solved or tracker.stagnated:
                return
            stage = _drop_worst(slots, thresholds, stage)
            if finished():
                return
