"""Genetic operators over coefficient genomes.

Genomes are rows of a float array in basis order. Every operator draws the
same amount of randomness regardless of outcome, so a seed fixes the whole
search.
"""

from __future__ import annotations

try:
    from typing_extensions import Optional
except ImportError:
    from typing import Optional

import numpy as np

from search_graph.configuration import GaConfiguration

TOURNAMENT_SIZE = 2


def init_population(
        cfg: GaConfiguration, basis_size: int, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Draw the initial population uniformly from the alphabet.

    Args:
        cfg (GaConfiguration): Search configuration.
        basis_size (int): Genes per genome γ.
        rng (Optional[np.random.Generator]): Generator to draw from; a fresh one
            seeded with ``cfg.rng_seed`` when omitted.

    Returns:
        np.ndarray: Population of shape (population_size, basis_size).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    index = rng.integers(0, cfg.alphabet.size, size=(cfg.population_size, basis_size))
    return cfg.alphabet.values[index]


def mutate(
        genome: np.ndarray, cfg: GaConfiguration, rng: np.random.Generator
) -> np.ndarray:
    """Mutate each gene independently with probability ``cfg.mutation_prob``.

    A mutated gene takes one of the K - 1 other alphabet values, uniformly. In
    ``init-only`` mode half of the mutated genes instead move by ±step, which
    can leave the alphabet range.

    Works on a single genome or on a whole population.
    """
    genome = np.asarray(genome, dtype=float)
    alphabet = cfg.alphabet
    mask = rng.random(genome.shape) < cfg.mutation_prob
    offsets = rng.integers(1, alphabet.size, size=genome.shape)
    resampled = alphabet.values[(alphabet.index_of(genome) + offsets) % alphabet.size]
    if cfg.clamp_mode == "init-only":
        drift = rng.random(genome.shape) < 0.5
        signs = rng.choice(np.array([-1.0, 1.0]), size=genome.shape)
        resampled = np.where(drift, genome + signs * alphabet.step, resampled)
    return np.where(mask, resampled, genome)


def crossover(
        parent_a: np.ndarray,
        parent_b: np.ndarray,
        cfg: GaConfiguration,
        rng: np.random.Generator,
        *,
        cut: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Single-point crossover with probability ``cfg.crossover_prob``.

    Args:
        parent_a (np.ndarray): First parent.
        parent_b (np.ndarray): Second parent, same length.
        cfg (GaConfiguration): Search configuration.
        rng (np.random.Generator): Random generator.
        cut (Optional[int]): Force the cut point (1..l-1) instead of drawing it.

    Returns:
        tuple[np.ndarray, np.ndarray]: The two children; copies of the parents
        when no crossover happens.
    """
    a = np.array(parent_a, dtype=float)
    b = np.array(parent_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"Parents differ in length: {a.shape} vs {b.shape}")
    length = a.shape[-1]
    crossing = rng.random() < cfg.crossover_prob
    if not crossing or length < 2:
        return a, b
    point = int(rng.integers(1, length)) if cut is None else cut
    if not 1 <= point <= length - 1:
        raise ValueError(f"Cut point must lie in 1..{length - 1}, got {point}")
    child_a = np.concatenate([a[:point], b[point:]])
    child_b = np.concatenate([b[:point], a[point:]])
    return child_a, child_b


def tournament(costs: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``count`` winners of size-2 tournaments.

    Lower J wins. On a tie the contestant drawn first wins, not the one with the
    lower index; with equal costs this keeps selection uniform.
    """
    size = costs.shape[0]
    first = rng.integers(0, size, size=count)
    second = rng.integers(0, size, size=count)
    first_wins = costs[first] <= costs[second]
    return np.where(first_wins, first, second)


def select(
        population: np.ndarray,
        costs: np.ndarray,
        cfg: GaConfiguration,
        rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Form the parents of the next generation.

    The best ``cfg.elite_count`` genomes by ascending J (stable on ties) fill
    the first rows unchanged; the remaining rows are tournament winners.

    Returns:
        tuple[np.ndarray, int]: Parents and the number of leading elite rows.
    """
    costs = np.asarray(costs, dtype=float)
    size = population.shape[0]
    elites = min(cfg.elite_count, size)
    elite_index = np.argsort(costs, kind="stable")[:elites]
    winners = tournament(costs, size - elites, rng)
    parents = np.concatenate([population[elite_index], population[winners]])
    return parents, elites


def breed(
        population: np.ndarray,
        costs: np.ndarray,
        cfg: GaConfiguration,
        rng: np.random.Generator,
) -> np.ndarray:
    """Produce the next generation: selection, then crossover and mutation of non-elites.

    Non-elite parents mate in consecutive pairs; an odd one out is only mutated.
    """
    parents, elites = select(population, costs, cfg, rng)
    offspring = parents[elites:].copy()
    for i in range(0, offspring.shape[0] - 1, 2):
        offspring[i], offspring[i + 1] = crossover(offspring[i], offspring[i + 1], cfg, rng)
    offspring = mutate(offspring, cfg, rng)
    return np.concatenate([parents[:elites], offspring])
