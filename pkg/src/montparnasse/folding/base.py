"""Shared folding types: engine configuration, fold results, failures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

BUILTIN = "builtin"
EXTERNAL = "external"

ENGINE_KINDS = (BUILTIN, EXTERNAL)


class EngineFailure(RuntimeError):
    """The external folding tool crashed, timed out or broke protocol."""

    def __init__(self, message: str, stderr: str | None = None):
        self.stderr = stderr
        if stderr:
            message = f"{message}\nstderr: {stderr.strip()}"
        super().__init__(message)


@dataclass(frozen=True)
class EngineConfig:
    """How folds are computed.

    min_hairpin is the number of unpaired positions required inside any
    pair. kT is in engine units (the builtin model scores -1 per pair, so
    kT=1 keeps Boltzmann weights at e per pair; an external thermodynamic
    folder wants its own units, e.g. ~0.6163 kcal/mol at 37C).
    """

    engine_kind: str = BUILTIN
    min_hairpin: int = 3
    kT: float = 1.0
    external_command: str | None = None
    external_timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.engine_kind not in ENGINE_KINDS:
            raise ValueError(f"unknown engine kind {self.engine_kind!r}")
        if self.min_hairpin < 0:
            raise ValueError("min_hairpin must be >= 0")
        if not self.kT > 0:
            raise ValueError("kT must be > 0")
        if self.engine_kind == EXTERNAL and not self.external_command:
            raise ValueError("external engine requires external_command")


@dataclass(frozen=True)
class FoldResult:
    """Everything one fold request yields.

    pair_probabilities is an NxN upper-triangular array (builtin engine)
    or None when the engine reports only aggregate metrics.
    """

    mfe_structure: str
    mfe_energy: float
    ensemble_free_energy: float
    target_probability: float
    ensemble_defect: float
    pair_probabilities: Optional[np.ndarray] = None
