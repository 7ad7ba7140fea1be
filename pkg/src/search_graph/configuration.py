"""Define the configurable parameters for the genetic search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    from typing_extensions import Annotated, Literal
except ImportError:
    from typing import Annotated, Literal

import numpy as np

from shared.configuration import BaseConfiguration

ClampMode = Literal["clamped", "init-only"]


@dataclass(frozen=True, kw_only=True)
class Alphabet:
    """Discrete coefficient values {lo, lo + step, ..., hi}."""

    lo: float
    hi: float
    step: float = 1.0

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError(f"Alphabet needs hi > lo, got lo={self.lo}, hi={self.hi}")
        if not self.step > 0:
            raise ValueError(f"Alphabet step must be positive, got {self.step}")
        intervals = (self.hi - self.lo) / self.step
        if abs(intervals - round(intervals)) > 1e-9:
            raise ValueError(
                f"(hi - lo) / step must be an integer, got {intervals} for "
                f"lo={self.lo}, hi={self.hi}, step={self.step}"
            )

    @property
    def size(self) -> int:
        """Number of values K."""
        return int(round((self.hi - self.lo) / self.step)) + 1

    @property
    def values(self) -> np.ndarray:
        """The ordered values."""
        return np.linspace(self.lo, self.hi, self.size)

    def index_of(self, genes: np.ndarray) -> np.ndarray:
        """Map gene values to alphabet positions (may fall outside 0..K-1)."""
        return np.rint((np.asarray(genes, dtype=float) - self.lo) / self.step).astype(np.int64)

    def contains(self, genes: np.ndarray) -> np.ndarray:
        """Elementwise membership test."""
        genes = np.asarray(genes, dtype=float)
        index = self.index_of(genes)
        inside = (index >= 0) & (index < self.size)
        return inside & np.isclose(genes, self.values[np.clip(index, 0, self.size - 1)])


@dataclass(kw_only=True)
class GaConfiguration(BaseConfiguration):
    """The configuration for the genetic search.

    Defaults reproduce the reference run on the damped pendulum: 1000 genomes,
    20% per-gene mutation, 40% crossover per pair, 1% elites and integer
    coefficients in [-2, 2].
    """

    population_size: int = field(
        default=1000,
        metadata={"description": "Number of genomes per generation."},
    )

    mutation_prob: float = field(
        default=0.2,
        metadata={"description": "Probability that a single gene is mutated."},
    )

    crossover_prob: float = field(
        default=0.4,
        metadata={"description": "Probability that a mating pair exchanges tails."},
    )

    elite_fraction: float = field(
        default=0.01,
        metadata={
            "description": "Fraction of the best genomes copied unchanged into the next generation."
        },
    )

    max_generations: int = field(
        default=200,
        metadata={"description": "Generation budget t_MAX, counting the initial population."},
    )

    alphabet: Annotated[Alphabet, {"__template_metadata__": {"kind": "alphabet"}}] = field(
        default_factory=lambda: Alphabet(lo=-2.0, hi=2.0, step=1.0),
        metadata={"description": "Values a coefficient may take at initialization."},
    )

    rng_seed: int = field(
        default=0,
        metadata={"description": "Seed of the numpy random generator driving the search."},
    )

    early_exit_on_zero: bool = field(
        default=True,
        metadata={"description": "Stop as soon as some genome reaches J = 0."},
    )

    clamp_mode: ClampMode = field(
        default="clamped",
        metadata={
            "description": "'clamped' keeps every gene in the alphabet; 'init-only' lets "
                           "mutation drift genes by ±step beyond it."
        },
    )

    snapshot_every: int = field(
        default=0,
        metadata={
            "description": "Record the whole population every k generations (0 disables)."
        },
    )

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.population_size < 2:
            raise ValueError(f"population_size must be at least 2, got {self.population_size}")
        for name in ("mutation_prob", "crossover_prob"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not 0 <= self.elite_fraction < 1:
            raise ValueError(f"elite_fraction must lie in [0, 1), got {self.elite_fraction}")
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be at least 1, got {self.max_generations}")
        if self.clamp_mode not in ("clamped", "init-only"):
            raise ValueError(f"Unsupported clamp_mode: {self.clamp_mode}")
        if self.snapshot_every < 0:
            raise ValueError(f"snapshot_every must be non-negative, got {self.snapshot_every}")

    @property
    def elite_count(self) -> int:
        """Number of elites, ceil(elite_fraction * population_size)."""
        return math.ceil(round(self.elite_fraction * self.population_size, 9))
