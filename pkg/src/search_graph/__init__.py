"""Search Graph Module.

This module runs the genetic search for Lyapunov candidates: a population of
coefficient genomes over a truncated Taylor basis is evolved by selection,
single-point crossover and per-gene mutation, scored by the fraction of grid
points that violate the Lyapunov conditions.

Usage:
    ``run(system, degree, grid, configuration)`` returns a RunResult; the
    compiled ``graph`` can also be invoked directly with an InputState-shaped
    dict and a RunnableConfig built by ``make_run_config``.
"""

from search_graph.graph import graph, run

__all__ = ["graph", "run"]
