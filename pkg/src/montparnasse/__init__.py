"""Inverse RNA folding by multi-objective search.

Given a target secondary structure in dot-bracket notation, find a
nucleotide sequence whose predicted fold matches it. Searchers compare
candidates on six lexicographic objectives against a pluggable folding
engine: a fast builtin maximum-pairing model or any external tool
speaking a small line protocol.
"""

from .folding import (
    BUILTIN,
    EXTERNAL,
    EngineConfig,
    EngineFailure,
    FoldResult,
    FoldingEngine,
    ensemble_defect,
    fold,
    partition_function,
)
from .localsearch import (
    NarrowingProfile,
    SearchState,
    greedy_mutation,
    initial_sequence,
    mogrls,
    progressive_narrowing,
    random_mutation,
)
from .mcts import (
    BiasTable,
    BudgetExhausted,
    LevelResult,
    Move,
    Policy,
    adapt,
    mognrpalr,
    move_probability,
    playout,
)
from .mcts import solve as mcts_solve
from .objectives import ScoreVector, compare, evaluate
from .problems import Problem, ProblemSet, load_problems
from .structure import (
    VALID_PAIRS,
    Pair,
    TargetStructure,
    Unpaired,
    base_pair_distance,
    hamming_distance,
    is_valid_pair,
    parse_dotbracket,
)
from .tuning import (
    RunTrace,
    Strategy,
    generate_profiles,
    load_dataset,
    replay_strategy,
    tune,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN",
    "EXTERNAL",
    "BiasTable",
    "BudgetExhausted",
    "EngineConfig",
    "EngineFailure",
    "FoldResult",
    "FoldingEngine",
    "LevelResult",
    "Move",
    "NarrowingProfile",
    "Pair",
    "Policy",
    "Problem",
    "ProblemSet",
    "RunTrace",
    "ScoreVector",
    "SearchState",
    "Strategy",
    "TargetStructure",
    "Unpaired",
    "VALID_PAIRS",
    "adapt",
    "base_pair_distance",
    "compare",
    "ensemble_defect",
    "evaluate",
    "fold",
    "generate_profiles",
    "greedy_mutation",
    "hamming_distance",
    "initial_sequence",
    "is_valid_pair",
    "load_dataset",
    "load_problems",
    "mcts_solve",
    "mognrpalr",
    "mogrls",
    "move_probability",
    "parse_dotbracket",
    "partition_function",
    "playout",
    "progressive_narrowing",
    "random_mutation",
    "replay_strategy",
    "tune",
    "__version__",
]
