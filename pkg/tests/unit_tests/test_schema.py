import numpy as np
import pytest

from analysis.schema import Schema, disruption_factor, schema_stats, schema_trace
from search_graph.configuration import GaConfiguration
from search_graph.graph import run
from search_graph.state import GenerationRecord
from shared.dynsys import VectorField
from shared.verifier import GridSpec, Region


def record(generation: int, population: np.ndarray, costs: np.ndarray) -> GenerationRecord:
    return GenerationRecord(
        generation=generation,
        best_cost=float(costs.min()),
        mean_cost=float(costs.mean()),
        elapsed_ms=0.0,
        best_genome=tuple(population[int(np.argmin(costs))]),
        population=population,
        costs=costs,
    )


def test_schema_stats() -> None:
    assert schema_stats(Schema(9, {1: 0.0, 5: 2.0})) == (2, 4)
    assert schema_stats(Schema(9, {3: 1.0})) == (1, 0)
    assert schema_stats(Schema(9, {0: 1.0, 8: -1.0})) == (2, 8)


def test_maximal_defining_length_disrupts_fully() -> None:
    cfg = GaConfiguration(crossover_prob=1.0, mutation_prob=0.0)
    assert disruption_factor(Schema(9, {0: 1.0, 8: -1.0}), cfg) == 0.0
    cfg = GaConfiguration(crossover_prob=0.4, mutation_prob=0.2)
    assert disruption_factor(Schema(9, {1: 0.0, 5: 2.0}), cfg) == pytest.approx(1 - 0.2 - 0.4)


@pytest.mark.parametrize("fixed", [{}, {9: 1.0}, {-1: 0.0}])
def test_schema_rejects(fixed: dict) -> None:
    with pytest.raises(ValueError):
        Schema(9, fixed)


def test_matches_agrees_with_naive_check() -> None:
    rng = np.random.default_rng(31)
    population = rng.integers(-2, 3, size=(200, 6)).astype(float)
    for _ in range(20):
        positions = rng.choice(6, size=int(rng.integers(1, 4)), replace=False)
        s = Schema(6, {int(p): float(rng.integers(-2, 3)) for p in positions})
        naive = [all(g[p] == v for p, v in s.fixed.items()) for g in population]
        np.testing.assert_array_equal(s.matches(population), naive)


def test_matches_checks_genome_length() -> None:
    with pytest.raises(ValueError):
        Schema(4, {0: 1.0}).matches(np.zeros((3, 5)))


def test_schema_trace_on_constructed_records() -> None:
    population = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 0.0], [0.0, 1.0]])
    costs = np.array([0.0, 0.5, 0.5, 1.0])
    successor = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]])
    records = [record(1, population, costs), record(2, successor, costs)]
    cfg = GaConfiguration(crossover_prob=0.0, mutation_prob=0.0)
    trace = schema_trace(records, Schema(2, {0: 1.0}), cfg)
    (row,) = trace.rows
    assert row.count == 2
    assert row.schema_fitness == pytest.approx(0.75)
    assert row.mean_fitness == pytest.approx(0.5)
    assert row.bound == pytest.approx(3.0)
    assert row.next_count == 3
    assert row.held
    assert trace.counts == [2, 3]
    assert trace.hold_fraction == 1.0


def test_schema_trace_needs_snapshots() -> None:
    vf = VectorField.from_equations(["-x1", "-x2"], equilibrium=(0.0, 0.0))
    grid = GridSpec(region=Region(center=(0.0, 0.0), side_lengths=(1.0, 1.0)), points_per_axis=5)
    cfg = GaConfiguration(population_size=10, max_generations=3, early_exit_on_zero=False)
    result = run(vf, 1, grid, cfg)
    with pytest.raises(ValueError, match="snapshot_every=1"):
        schema_trace(result.trace, Schema(2, {0: 1.0}), cfg)


def test_fitness_neutral_schema_counts_follow_the_bound() -> None:
    # every linear candidate fails everywhere for x' = x, so selection is neutral
    vf = VectorField.from_equations(["x1", "x2"], equilibrium=(0.0, 0.0))
    grid = GridSpec(region=Region(center=(0.0, 0.0), side_lengths=(1.0, 1.0)), points_per_axis=5)
    s = Schema(2, {0: 0.0})
    gaps = []
    for seed in range(50):
        cfg = GaConfiguration(
            population_size=100,
            mutation_prob=0.0,
            crossover_prob=0.0,
            elite_fraction=0.0,
            max_generations=6,
            snapshot_every=1,
            rng_seed=seed,
        )
        result = run(vf, 1, grid, cfg)
        assert result.best_cost == 1.0
        trace = schema_trace(result.trace, s, cfg)
        assert len(trace.rows) == 5
        for row in trace.rows:
            assert row.bound == pytest.approx(row.count)
            gaps.append(row.next_count - row.bound)
    assert abs(float(np.mean(gaps))) < 1.5
