"""Folding engines: builtin maximum-pairing model and external tool adapter."""

from .base import BUILTIN, ENGINE_KINDS, EXTERNAL, EngineConfig, EngineFailure, FoldResult
from .builtin import builtin_fold, builtin_partition_function
from .engine import (
    EXHAUSTIVE_LIMIT,
    FoldingEngine,
    ensemble_defect,
    fold,
    partition_function,
)
from .exhaustive import (
    ExhaustiveEnsemble,
    enumerate_structures,
    exhaustive_ensemble,
    exhaustive_ensemble_defect,
    exhaustive_max_pairs,
    exhaustive_partition_function,
    exhaustive_target_probability,
)
from .external import ExternalFolder

__all__ = [
    "BUILTIN",
    "EXTERNAL",
    "ENGINE_KINDS",
    "EXHAUSTIVE_LIMIT",
    "EngineConfig",
    "EngineFailure",
    "FoldResult",
    "FoldingEngine",
    "ExternalFolder",
    "ExhaustiveEnsemble",
    "builtin_fold",
    "builtin_partition_function",
    "enumerate_structures",
    "ensemble_defect",
    "exhaustive_ensemble",
    "exhaustive_ensemble_defect",
    "exhaustive_max_pairs",
    "exhaustive_partition_function",
    "exhaustive_target_probability",
    "fold",
    "partition_function",
]
