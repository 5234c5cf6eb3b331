"""Narrowing-schedule tuning by Monte-Carlo replay of recorded run traces.

A recorded dataset of single-incumbent runs stands in for live searches:
narrowing a set of k live runs is simulated by sampling k traces and
dropping the worst at each threshold. Thresholds here are in checkpoint
units (one checkpoint = 100 evaluations).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from random import Random

from .localsearch import CHECKPOINT_EVERY


class InsufficientTraceLength(ValueError):
    def __init__(self, run_id: int, index: int, length: int):
        self.run_id = run_id
        self.index = index
        self.length = length
        super().__init__(
            f"trace {run_id} has {length} checkpoints, index {index} requested"
        )


@dataclass(frozen=True)
class RunTrace:
    """Best BPD of one recorded run, sampled every 100 evaluations.

    checkpoints[c] is the best BPD after (c + 1) * 100 evaluations.
    """

    run_id: int
    checkpoints: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "checkpoints", tuple(self.checkpoints))
        for a, b in zip(self.checkpoints, self.checkpoints[1:]):
            if b > a:
                raise ValueError(f"trace {self.run_id} best bpd increases ({a} -> {b})")
        if any(v < 0 for v in self.checkpoints):
            raise ValueError(f"trace {self.run_id} has negative bpd")

    def bpd_at(self, index: int) -> int:
        """Best BPD at a 0-based checkpoint index.

        A trace that already reached 0 stays solved forever, so reads
        past its end return 0; past the end of an unsolved trace there
        is no data to extrapolate.
        """
        if index < len(self.checkpoints):
            return self.checkpoints[index]
        if self.checkpoints and self.checkpoints[-1] == 0:
            return 0
        raise InsufficientTraceLength(self.run_id, index, len(self.checkpoints))


@dataclass(frozen=True)
class Strategy:
    """A narrowing schedule in checkpoint units plus its restart size."""

    thresholds: tuple[int, ...]
    restart_budget: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if not self.thresholds:
            raise ValueError("strategy needs at least one threshold")
        if any(a > b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be non-decreasing")
        if sum(self.thresholds) != self.restart_budget:
            raise ValueError(
                f"thresholds sum to {sum(self.thresholds)}, restart budget is {self.restart_budget}"
            )


def generate_profiles(n: int, k: int, possible) -> list[tuple[int, ...]]:
    """All non-decreasing k-tuples over `possible` that sum to n.

    Lexicographic order. Infeasible inputs yield an empty list.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    values = sorted(set(possible))
    if not values:
        raise ValueError("possible must be non-empty")
    out: list[tuple[int, ...]] = []

    def extend(remaining: int, total: int, current: tuple[int, ...]) -> None:
        if remaining == 0:
            if total == n:
                out.append(current)
            return
        floor = current[-1] if current else values[0]
        for v in values:
            if v < floor:
                continue
            if total + v * remaining > n:
                break
            extend(remaining - 1, total + v, current + (v,))

    extend(k, 0, ())
    return out


def replay_strategy(
    strategy: Strategy,
    dataset: list[RunTrace],
    samples: int,
    rng: Random,
    total_budget: int | None = None,
) -> float:
    """Estimated probability that the schedule solves, by trace replay.

    Each sample plays total_budget // restart_budget restarts. A restart
    draws len(thresholds) distinct traces; at every threshold the live
    traces are read at checkpoint index threshold - 1, any 0 means
    solved, otherwise the worst (ties: largest run_id) is dropped until
    one trace remains to use up the final threshold. total_budget
    defaults to the shortest trace length.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    k = len(strategy.thresholds)
    if k > len(dataset):
        raise ValueError(f"cannot draw {k} distinct traces from {len(dataset)}")
    if total_budget is None:
        total_budget = min(len(t.checkpoints) for t in dataset)
    restarts = total_budget // strategy.restart_budget
    if restarts < 1:
        raise InsufficientTraceLength(-1, strategy.restart_budget - 1, total_budget)

    solved_count = 0
    for _ in range(samples):
        solved = False
        for _restart in range(restarts):
            live = [dataset[i] for i in rng.sample(range(len(dataset)), k)]
            for threshold in strategy.thresholds:
                index = max(0, threshold - 1)
                if any(trace.bpd_at(index) == 0 for trace in live):
                    solved = True
                    break
                if len(live) > 1:
                    worst = max(live, key=lambda tr: (tr.bpd_at(index), tr.run_id))
                    live.remove(worst)
            if solved:
                break
        if solved:
            solved_count += 1
    return solved_count / samples


def tune(
    dataset: list[RunTrace],
    restart_options,
    max_slots: int,
    possible,
    samples: int,
    rng: Random,
    total_budget: int | None = None,
) -> tuple[Strategy, float]:
    """Exhaustive search over restart budgets, slot counts and profiles.

    Returns the first strategy attaining the best replayed solve rate,
    in iteration order (restart budgets, then slot counts, then profiles
    lexicographically).
    """
    best: Strategy | None = None
    best_score = -1.0
    for restart_budget in restart_options:
        for k in range(1, max_slots + 1):
            for profile in generate_profiles(restart_budget, k, possible):
                strategy = Strategy(profile, restart_budget)
                score = replay_strategy(strategy, dataset, samples, rng, total_budget)
                if score > best_score:
                    best, best_score = strategy, score
    if best is None:
        raise ValueError("no feasible strategy for the given options")
    return best, best_score


def load_dataset(path) -> list[RunTrace]:
    """Read traces from CSV with header run_id,checkpoint,best_bpd.

    The checkpoint column holds evaluation counts (100, 200, ...); each
    run must cover a contiguous block of checkpoints with non-increasing
    best bpd.
    """
    rows: dict[int, list[tuple[int, int]]] = {}
    with open(Path(path), newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["run_id", "checkpoint", "best_bpd"]:
            raise ValueError(f"unexpected dataset header: {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                run_id, checkpoint, bpd = (int(f) for f in row)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer field in {row}") from None
            rows.setdefault(run_id, []).append((checkpoint, bpd))

    traces = []
    for run_id in sorted(rows):
        entries = sorted(rows[run_id])
        for position, (checkpoint, _) in enumerate(entries, start=1):
            if checkpoint != position * CHECKPOINT_EVERY:
                raise ValueError(
                    f"run {run_id}: expected checkpoint {position * CHECKPOINT_EVERY}, got {checkpoint}"
                )
        traces.append(RunTrace(run_id, tuple(bpd for _, bpd in entries)))
    return traces
