"""Sweep graph: success rates of the genetic search across parameter grids."""

from sweep_graph.graph import graph, sweep

__all__ = ["graph", "sweep"]
