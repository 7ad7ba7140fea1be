"""Shared candidate, dynamics and verification modules."""
