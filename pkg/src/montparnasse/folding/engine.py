"""Folding engine facade: dispatch, per-engine memo, evaluation counting."""

from __future__ import annotations

import math

from ..structure import LengthMismatch, TargetStructure, parse_dotbracket, validate_sequence
from .base import BUILTIN, EXTERNAL, EngineConfig, FoldResult
from .builtin import builtin_fold, builtin_partition_function
from .exhaustive import exhaustive_partition_function
from .external import ExternalFolder

#: Longest sequence for which enumerating all structures stays reasonable.
EXHAUSTIVE_LIMIT = 25


class FoldingEngine:
    """Stateful wrapper around one engine for the lifetime of a run.

    Results are memoized on (sequence, target); nevals counts memo
    misses, i.e. folds actually computed, while requests counts every
    fold() call. Search budgets are spent in nevals.
    """

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self._memo: dict[tuple[str, str], FoldResult] = {}
        self._nevals = 0
        self._requests = 0
        self._external: ExternalFolder | None = None

    @property
    def nevals(self) -> int:
        return self._nevals

    @property
    def requests(self) -> int:
        return self._requests

    def fold(self, sequence: str, target: TargetStructure) -> FoldResult:
        if len(sequence) != target.length:
            raise LengthMismatch(len(sequence), target.length)
        validate_sequence(sequence)
        self._requests += 1
        key = (sequence, target.dotbracket)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._compute(sequence, target)
        self._nevals += 1
        self._memo[key] = result
        return result

    def partition_function(self, sequence: str) -> float:
        cfg = self.config
        if cfg.engine_kind == BUILTIN:
            if len(sequence) <= EXHAUSTIVE_LIMIT:
                return exhaustive_partition_function(sequence, cfg.min_hairpin, cfg.kT)
            return builtin_partition_function(sequence, cfg.min_hairpin, cfg.kT)
        result = self.fold(sequence, parse_dotbracket("." * len(sequence)))
        return math.exp(-result.ensemble_free_energy / cfg.kT)

    def close(self) -> None:
        if self._external is not None:
            self._external.close()
            self._external = None

    def __enter__(self) -> "FoldingEngine":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _compute(self, sequence: str, target: TargetStructure) -> FoldResult:
        cfg = self.config
        if cfg.engine_kind == BUILTIN:
            return builtin_fold(sequence, target, cfg.min_hairpin, cfg.kT)
        if self._external is None:
            self._external = ExternalFolder(cfg.external_command, cfg.external_timeout)
        return self._external.fold(sequence, target.dotbracket)


def fold(sequence: str, target: TargetStructure, config: EngineConfig | None = None) -> FoldResult:
    """One-shot fold with a throwaway engine."""
    with FoldingEngine(config) as engine:
        return engine.fold(sequence, target)


def partition_function(sequence: str, config: EngineConfig | None = None) -> float:
    with FoldingEngine(config) as engine:
        return engine.partition_function(sequence)


def ensemble_defect(sequence: str, target: TargetStructure, config: EngineConfig | None = None) -> float:
    with FoldingEngine(config) as engine:
        return engine.fold(sequence, target).ensemble_defect
