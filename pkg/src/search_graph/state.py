"""State management for the search graph.

This module defines the problem handed to the search (InputState), the state
carried between generations (SearchState) and the records a run leaves
behind (GenerationRecord, RunTrace, RunResult).
"""

import math
from dataclasses import dataclass, field

try:
    from typing_extensions import Annotated, Optional
except ImportError:
    from typing import Annotated, Optional

import numpy as np

from shared.dynsys import VectorField
from shared.polyform import CandidatePolynomial
from shared.state import reduce_records
from shared.verifier import CostContext, GridSpec

TRACE_HEADER = ("generation", "best_J", "mean_J", "elapsed_ms")


@dataclass(frozen=True, kw_only=True)
class GenerationRecord:
    """What happened in one generation."""

    generation: int
    best_cost: float
    mean_cost: float
    elapsed_ms: float
    best_genome: tuple[float, ...]
    population: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    """Full population snapshot, present every ``snapshot_every`` generations."""
    costs: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class RunTrace:
    """Per-generation history of one run."""

    records: tuple[GenerationRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    @property
    def best_costs(self) -> list[float]:
        """Best J per generation."""
        return [r.best_cost for r in self.records]

    @property
    def mean_costs(self) -> list[float]:
        """Mean J per generation."""
        return [r.mean_cost for r in self.records]

    def csv_rows(self) -> list[tuple[int, float, float, float]]:
        """Rows matching ``TRACE_HEADER``."""
        return [
            (r.generation, r.best_cost, r.mean_cost, round(r.elapsed_ms, 3))
            for r in self.records
        ]


@dataclass(frozen=True, kw_only=True)
class RunResult:
    """Outcome of one search: the minimum-J candidate ever seen."""

    best: CandidatePolynomial
    best_cost: float
    generations: int
    first_success_generation: Optional[int]
    trace: RunTrace
    seed: int

    @property
    def success(self) -> bool:
        """True when the best candidate has J = 0."""
        return self.best_cost == 0


@dataclass(kw_only=True)
class InputState:
    """The problem: dynamics, verification grid and candidate degree."""

    system: VectorField
    grid: GridSpec
    degree: int


@dataclass(kw_only=True)
class SearchState(InputState):
    """State of the search graph between generations."""

    context: Optional[CostContext] = None
    """Grid tables shared by every cost evaluation of the run."""
    rng: Optional[np.random.Generator] = None
    population: Optional[np.ndarray] = None
    costs: Optional[np.ndarray] = None
    generation: int = 0
    """Number of generations evaluated so far."""
    best_genome: Optional[np.ndarray] = None
    best_cost: float = math.inf
    first_success_generation: Optional[int] = None
    finished: bool = False
    clock: float = 0.0
    """perf_counter value when the previous generation finished."""
    trace: Annotated[list[GenerationRecord], reduce_records] = field(default_factory=list)
