"""Schema-theorem diagnostics over recorded populations.

A schema fixes some gene positions to alphabet values. The expected number of
its instances in generation t + 1 is bounded below by

    N(h, t) · f(h, t) / f̄(t) · (1 - σ(h)/(l-1) · p_c - o(h) · p_m)

where fitness is 1 - J. The bound holds in expectation only, so the trace
reports how often it held empirically rather than asserting it.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    from typing_extensions import Mapping, Sequence, Union
except ImportError:
    from typing import Mapping, Sequence, Union

import numpy as np

from search_graph.configuration import GaConfiguration
from search_graph.state import GenerationRecord, RunTrace


@dataclass(frozen=True)
class Schema:
    """A partial genome: fixed values at some positions, wildcards elsewhere."""

    length: int
    fixed: Mapping[int, float]

    def __post_init__(self) -> None:
        if not 1 <= len(self.fixed) <= self.length:
            raise ValueError(
                f"A schema must fix between 1 and {self.length} positions, got {len(self.fixed)}"
            )
        bad = [p for p in self.fixed if not 0 <= p < self.length]
        if bad:
            raise ValueError(f"Positions {bad} are outside 0..{self.length - 1}")
        object.__setattr__(self, "fixed", dict(sorted(self.fixed.items())))

    def matches(self, population: np.ndarray) -> np.ndarray:
        """Boolean mask of the genomes that are instances of the schema."""
        population = np.atleast_2d(population)
        if population.shape[1] != self.length:
            raise ValueError(
                f"Genomes have {population.shape[1]} genes, schema length is {self.length}"
            )
        mask = np.ones(population.shape[0], dtype=bool)
        for position, value in self.fixed.items():
            mask &= population[:, position] == value
        return mask


def schema_stats(s: Schema) -> tuple[int, int]:
    """Return the order o(h) and the defining length σ(h)."""
    positions = list(s.fixed)
    return len(positions), max(positions) - min(positions)


@dataclass(frozen=True)
class SchemaRow:
    """One step t → t + 1 of the diagnostic."""

    generation: int
    count: int
    """N(h, t)."""
    schema_fitness: float
    """f(h, t), mean of 1 - J over the instances (0 without instances)."""
    mean_fitness: float
    """f̄(t)."""
    bound: float
    """Right-hand side of the inequality for generation t + 1."""
    next_count: int
    """Observed N(h, t + 1)."""
    held: bool


@dataclass(frozen=True)
class SchemaTrace:
    """Schema counts across a run against the theoretical lower bound."""

    schema: Schema
    rows: tuple[SchemaRow, ...]

    @property
    def counts(self) -> list[int]:
        """N(h, t) for every snapshot, including the last."""
        if not self.rows:
            return []
        return [r.count for r in self.rows] + [self.rows[-1].next_count]

    @property
    def hold_fraction(self) -> float:
        """Fraction of steps where the observed count met the bound."""
        if not self.rows:
            return 1.0
        return sum(r.held for r in self.rows) / len(self.rows)


def disruption_factor(s: Schema, cfg: GaConfiguration) -> float:
    """Survival factor 1 - σ(h)/(l-1) · p_c - o(h) · p_m."""
    order, defining_length = schema_stats(s)
    crossover_term = 0.0 if s.length < 2 else defining_length / (s.length - 1) * cfg.crossover_prob
    return 1.0 - crossover_term - order * cfg.mutation_prob


def schema_trace(
        trace: Union[RunTrace, Sequence[GenerationRecord]],
        s: Schema,
        cfg: GaConfiguration,
) -> SchemaTrace:
    """Follow a schema through consecutive population snapshots.

    Args:
        trace (Union[RunTrace, Sequence[GenerationRecord]]): A run recorded with
            ``snapshot_every = 1``.
        s (Schema): Schema to follow.
        cfg (GaConfiguration): The run's configuration (p_c and p_m).

    Raises:
        ValueError: If any record lacks its population snapshot.
    """
    records = trace.records if isinstance(trace, RunTrace) else tuple(trace)
    missing = [r.generation for r in records if r.population is None or r.costs is None]
    if missing:
        raise ValueError(
            f"Population snapshots missing for generations {missing[:5]}; "
            "record the run with snapshot_every=1"
        )
    factor = disruption_factor(s, cfg)
    counts = [int(np.count_nonzero(s.matches(r.population))) for r in records]
    rows = []
    for t, record in enumerate(records[:-1]):
        fitness = 1.0 - np.asarray(record.costs, dtype=float)
        mask = s.matches(record.population)
        mean_fitness = float(np.mean(fitness))
        schema_fitness = float(np.mean(fitness[mask])) if counts[t] else 0.0
        ratio = schema_fitness / mean_fitness if mean_fitness > 0 else 1.0
        bound = counts[t] * ratio * factor
        rows.append(
            SchemaRow(
                generation=record.generation,
                count=counts[t],
                schema_fitness=schema_fitness,
                mean_fitness=mean_fitness,
                bound=bound,
                next_count=counts[t + 1],
                held=counts[t + 1] >= bound - 1e-9,
            )
        )
    return SchemaTrace(schema=s, rows=tuple(rows))
