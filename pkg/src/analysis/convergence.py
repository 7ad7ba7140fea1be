"""Probabilistic convergence bound of the genetic search.

For per-gene mutation probability μ, γ genes, an alphabet of K values and n
genomes per generation, every generation produces a given optimal genome with
probability at least

    q = min[(1 - μ)^(γ-1) · μ/(K-1), (μ/(K-1))^γ]

per genome, so after τ generations at least one optimum has appeared with
probability p_conv once

    τ(p_conv) = INT[ln(1 - p_conv) / (n · ln(1 - q))],

INT truncating toward zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, kw_only=True)
class ConvergenceParams:
    """Inputs of the iteration bound."""

    p_conv: float
    mu: float
    gamma: int
    K: int
    n: int

    def __post_init__(self) -> None:
        if not 0 < self.p_conv < 1:
            raise ValueError(f"p_conv must lie in (0, 1), got {self.p_conv}")
        _check_search_params(self.mu, self.gamma, self.K, self.n)


def _check_search_params(mu: float, gamma: int, K: int, n: int) -> None:
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    if gamma < 1:
        raise ValueError(f"gamma must be at least 1, got {gamma}")
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")


def min_term(mu: float, gamma: int, K: int) -> float:
    """Per-genome probability q of producing a given optimum in one generation."""
    per_gene = mu / (K - 1)
    return min((1 - mu) ** (gamma - 1) * per_gene, per_gene ** gamma)


def convergence_iterations(p: ConvergenceParams) -> int:
    """Return τ(p_conv), the generations needed to see an optimum with probability p_conv.

    Raises:
        ValueError: When q underflows to 0 or reaches 1, leaving the quotient undefined.
    """
    q = min_term(p.mu, p.gamma, p.K)
    if not 0 < q < 1:
        raise ValueError(
            f"Degenerate parameters: the per-genome term is {q!r}, the bound is undefined"
        )
    denominator = p.n * math.log1p(-q)
    if denominator == 0:
        raise ValueError("Degenerate parameters: n · ln(1 - q) evaluates to 0")
    return int(math.log1p(-p.p_conv) / denominator)


def convergence_probability(mu: float, gamma: int, K: int, n: int, iterations: int) -> float:
    """Return the probability that an optimum appeared within the given generations.

    This is 1 - (1 - q)^(n · iterations), the curve whose inverse is τ.
    """
    _check_search_params(mu, gamma, K, n)
    if iterations < 0:
        raise ValueError(f"iterations must be non-negative, got {iterations}")
    q = min_term(mu, gamma, K)
    return -math.expm1(n * iterations * math.log1p(-q))
