"""Convergence bound, schema diagnostics and success binning."""

from analysis.bins import bin_successes
from analysis.convergence import ConvergenceParams, convergence_iterations
from analysis.schema import Schema, schema_stats, schema_trace

__all__ = [
    "ConvergenceParams",
    "Schema",
    "bin_successes",
    "convergence_iterations",
    "schema_stats",
    "schema_trace",
]
