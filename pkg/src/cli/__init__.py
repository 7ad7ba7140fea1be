"""Command-line front end for the Lyapunov candidate search."""

__version__ = "0.1.0"
