"""Experiment sweep over GA and region parameters.

Every (cell, seed) pair becomes an independent search run. The runs are fanned
out in parallel and their rows gathered; the generations of the successful
runs are then binned.
"""

import dataclasses
import logging

try:
    from typing_extensions import Any
except ImportError:
    from typing import Any

from langchain_core.runnables import RunnableConfig
from langgraph.graph import END, START, StateGraph
from langgraph.types import Send

from analysis.bins import bin_successes
from search_graph.graph import run
from sweep_graph.configuration import SweepConfiguration
from sweep_graph.state import (
    CellState,
    InputState,
    SweepPlan,
    SweepResult,
    SweepRow,
    SweepState,
)

logger = logging.getLogger(__name__)


def expand_plan(state: SweepState) -> dict[str, Any]:
    """Clear previous rows and log the size of the sweep.

    Args:
        state (SweepState): The sweep plan.

    Returns:
        dict[str, Any]: A reset of the collected rows.
    """
    cells = state.plan.cells()
    logger.info(
        "Sweep started: %d cells x %d seeds over %s",
        len(cells),
        len(state.plan.seeds),
        ", ".join(a.name for a in state.plan.axes) or "the base configuration",
    )
    return {"rows": "delete", "bins": []}


def run_in_parallel(state: SweepState) -> list[Send]:
    """Create one run task per (cell, seed) pair.

    Args:
        state (SweepState): The sweep plan.

    Returns:
        list[Send]: One Send per run, targeting the "run_cell" node.
    """
    return [
        Send("run_cell", CellState(cell=cell, seed=seed, keep_trace=state.plan.keep_traces))
        for cell in state.plan.cells()
        for seed in state.plan.seeds
    ]


def run_cell(state: CellState, *, config: RunnableConfig) -> dict[str, list[SweepRow]]:
    """Run one seeded search for one cell.

    Args:
        state (CellState): The cell and the seed.
        config (RunnableConfig): Configuration with the worker count.

    Returns:
        dict[str, list[SweepRow]]: A single row with the run's outcome.
    """
    configuration = SweepConfiguration.from_runnable_config(config)
    cell = state.cell
    ga = dataclasses.replace(cell.ga, rng_seed=state.seed, workers=configuration.workers)
    result = run(cell.problem.system, cell.problem.degree, cell.problem.grid(), ga)
    elapsed = sum(r.elapsed_ms for r in result.trace.records)
    generations = result.generations
    if result.success and result.first_success_generation is not None:
        generations = result.first_success_generation
    row = SweepRow(
        cell_id=cell.cell_id,
        varied_param=cell.varied_param,
        value=cell.value,
        seed=state.seed,
        success=result.success,
        generations=generations,
        best_cost=result.best_cost,
        elapsed_ms=elapsed,
        trace=result.trace if state.keep_trace else None,
    )
    logger.debug(
        "Cell %d (%s=%s) seed %d: %s after %d generations",
        row.cell_id,
        row.varied_param,
        row.value,
        row.seed,
        "found" if row.success else "not found",
        row.generations,
    )
    return {"rows": [row]}


def summarize_bins(state: SweepState, *, config: RunnableConfig) -> dict[str, Any]:
    """Bin the generations of the successful runs.

    Args:
        state (SweepState): All collected rows.
        config (RunnableConfig): Configuration with the bin layout.

    Returns:
        dict[str, Any]: The bins D1..Dk.
    """
    configuration = SweepConfiguration.from_runnable_config(config)
    bins = bin_successes(
        (row.generations for row in state.rows if row.success),
        bin_width=configuration.bin_width,
        bin_count=configuration.bin_count,
    )
    logger.info(
        "Sweep finished: %d of %d runs found a candidate",
        sum(row.success for row in state.rows),
        len(state.rows),
    )
    return {"bins": bins}


# Define the graph
builder = StateGraph(SweepState, input=InputState, config_schema=SweepConfiguration)
builder.add_node(expand_plan)
builder.add_node(run_cell)
builder.add_node(summarize_bins)
builder.add_edge(START, "expand_plan")
builder.add_conditional_edges(
    "expand_plan",
    run_in_parallel,  # type: ignore
    path_map=["run_cell"],
)
builder.add_edge("run_cell", "summarize_bins")
builder.add_edge("summarize_bins", END)
# Compile into a graph object that you can invoke and deploy.
graph = builder.compile()
graph.name = "SweepGraph"


def sweep(plan: SweepPlan, configuration: SweepConfiguration) -> SweepResult:
    """Run every (cell, seed) of a plan and bin the successes.

    Args:
        plan (SweepPlan): Base problem, axes and seeds.
        configuration (SweepConfiguration): Bin layout, concurrency and worker count.

    Returns:
        SweepResult: Rows sorted by (cell_id, seed) and the success bins.
    """
    final = graph.invoke(
        {"plan": plan},
        RunnableConfig(
            configurable=configuration.to_configurable(),
            max_concurrency=configuration.max_concurrency,
        ),
    )
    rows = sorted(final["rows"], key=lambda row: (row.cell_id, row.seed))
    return SweepResult(rows=tuple(rows), bins=tuple(final["bins"]))
