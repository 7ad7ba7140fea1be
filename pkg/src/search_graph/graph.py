"""Main entrypoint for the genetic search of Lyapunov candidates.

The generation loop is a small state graph: the initial population is drawn
and evaluated, then selection, crossover and mutation produce each further
generation until the budget runs out or, with early exit, a genome reaches
J = 0. The minimum-J genome ever seen is returned.
"""

import logging
import time

try:
    from typing_extensions import Any, Literal
except ImportError:
    from typing import Any, Literal

import numpy as np
from langchain_core.runnables import RunnableConfig
from langgraph.graph import END, START, StateGraph

from search_graph.configuration import GaConfiguration
from search_graph.operators import breed, init_population
from search_graph.state import (
    GenerationRecord,
    InputState,
    RunResult,
    RunTrace,
    SearchState,
)
from shared.dynsys import VectorField
from shared.polyform import CandidatePolynomial
from shared.verifier import CostContext, GridSpec

logger = logging.getLogger(__name__)


def initialize_population(
        state: SearchState, *, config: RunnableConfig
) -> dict[str, Any]:
    """Tabulate the grid and draw the initial population.

    Args:
        state (SearchState): The problem to solve.
        config (RunnableConfig): Configuration with the GA parameters.

    Returns:
        dict[str, Any]: The cost context, the seeded generator and the initial population.
    """
    configuration = GaConfiguration.from_runnable_config(config)
    context = CostContext(state.system, state.grid, state.degree)
    rng = np.random.default_rng(configuration.rng_seed)
    population = init_population(configuration, len(context.basis), rng)
    logger.info(
        "Search started: %d genomes of %d genes, %d grid points, seed %d",
        configuration.population_size,
        len(context.basis),
        context.size,
        configuration.rng_seed,
    )
    return {
        "context": context,
        "rng": rng,
        "population": population,
        "generation": 0,
        "trace": "delete",
        "clock": time.perf_counter(),
    }


def evaluate_population(
        state: SearchState, *, config: RunnableConfig
) -> dict[str, Any]:
    """Score the current population and record the generation.

    Args:
        state (SearchState): Current population and best-so-far.
        config (RunnableConfig): Configuration with the GA parameters.

    Returns:
        dict[str, Any]: Costs, the updated best genome, the new trace record and
        whether the loop should stop.
    """
    configuration = GaConfiguration.from_runnable_config(config)
    assert state.context is not None and state.population is not None
    costs = state.context.population_costs(state.population, workers=configuration.workers)
    generation = state.generation + 1

    leader = int(np.argmin(costs))
    best_cost, best_genome = state.best_cost, state.best_genome
    if costs[leader] < best_cost:
        best_cost = float(costs[leader])
        best_genome = state.population[leader].copy()
    first_success = state.first_success_generation
    if first_success is None and best_cost == 0:
        first_success = generation

    now = time.perf_counter()
    snapshot = (
            configuration.snapshot_every > 0
            and generation % configuration.snapshot_every == 0
    )
    record = GenerationRecord(
        generation=generation,
        best_cost=float(costs[leader]),
        mean_cost=float(np.mean(costs)),
        elapsed_ms=(now - state.clock) * 1000.0,
        best_genome=tuple(float(g) for g in state.population[leader]),
        population=state.population.copy() if snapshot else None,
        costs=costs.copy() if snapshot else None,
    )
    finished = generation >= configuration.max_generations or (
            configuration.early_exit_on_zero and best_cost == 0
    )
    logger.debug(
        "Generation %d: best J %.6f, mean J %.6f", generation, record.best_cost, record.mean_cost
    )
    return {
        "costs": costs,
        "generation": generation,
        "best_cost": best_cost,
        "best_genome": best_genome,
        "first_success_generation": first_success,
        "finished": finished,
        "clock": now,
        "trace": [record],
    }


def check_finished(state: SearchState) -> Literal["breed_next_generation", "__end__"]:
    """Determine whether another generation is needed.

    Args:
        state (SearchState): The current state, including the stop flag set by evaluation.

    Returns:
        Literal["breed_next_generation", "__end__"]: The next step to take.
    """
    if state.finished:
        return END
    return "breed_next_generation"


def breed_next_generation(
        state: SearchState, *, config: RunnableConfig
) -> dict[str, np.ndarray]:
    """Select, cross and mutate the evaluated population into the next one.

    Args:
        state (SearchState): Evaluated population and the run's generator.
        config (RunnableConfig): Configuration with the GA parameters.

    Returns:
        dict[str, np.ndarray]: The next population.
    """
    configuration = GaConfiguration.from_runnable_config(config)
    assert state.rng is not None and state.costs is not None
    population = breed(state.population, state.costs, configuration, state.rng)
    return {"population": population}


# Define the graph
builder = StateGraph(SearchState, input=InputState, config_schema=GaConfiguration)
builder.add_node(initialize_population)
builder.add_node(evaluate_population)
builder.add_node(breed_next_generation)

builder.add_edge(START, "initialize_population")
builder.add_edge("initialize_population", "evaluate_population")
builder.add_conditional_edges(
    "evaluate_population",
    check_finished,
    path_map=["breed_next_generation", END],
)
builder.add_edge("breed_next_generation", "evaluate_population")

# Compile into a graph object that you can invoke and deploy.
graph = builder.compile()
graph.name = "SearchGraph"


def make_run_config(configuration: GaConfiguration) -> RunnableConfig:
    """Build the RunnableConfig for one search, with room for every generation."""
    return RunnableConfig(
        configurable=configuration.to_configurable(),
        recursion_limit=2 * configuration.max_generations + 10,
    )


def result_from_state(
        final: dict[str, Any], configuration: GaConfiguration
) -> RunResult:
    """Assemble a RunResult from the final graph state."""
    system: VectorField = final["system"]
    best = CandidatePolynomial.from_genome(
        final["best_genome"],
        dimension=system.dimension,
        max_degree=final["degree"],
        equilibrium=system.equilibrium,
    )
    result = RunResult(
        best=best,
        best_cost=float(final["best_cost"]),
        generations=int(final["generation"]),
        first_success_generation=final["first_success_generation"],
        trace=RunTrace(tuple(final["trace"])),
        seed=configuration.rng_seed,
    )
    logger.info(
        "Search finished after %d generations: best J %.6f (%s)",
        result.generations,
        result.best_cost,
        "found" if result.success else "not found",
    )
    return result


def run(
        system: VectorField,
        degree: int,
        grid: GridSpec,
        configuration: GaConfiguration,
) -> RunResult:
    """Search for a degree-N candidate with J = 0 on the grid.

    Args:
        system (VectorField): The dynamics.
        degree (int): Candidate degree N.
        grid (GridSpec): Verification grid.
        configuration (GaConfiguration): GA parameters and seed.

    Returns:
        RunResult: Best candidate, its cost, the generation count and the trace.

    Raises:
        DomainError: When f cannot be evaluated on the grid.
    """
    final = graph.invoke(
        {"system": system, "grid": grid, "degree": degree},
        make_run_config(configuration),
    )
    return result_from_state(final, configuration)
