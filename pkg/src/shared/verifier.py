"""Grid verification of Lyapunov conditions.

Every non-excluded point of a uniform lattice over the box Ω is put either in
the satisfying set X (L > 0 and ∇L·f < 0, both strict) or in its complement Y.
The cost J = |Y| / (|X| + |Y|) is 0 exactly when the candidate passes on the
whole grid. Nothing is claimed about points between grid nodes.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

try:
    from typing_extensions import Optional, Sequence, Union
except ImportError:
    from typing import Optional, Sequence, Union

import numpy as np

from shared.dynsys import VectorField
from shared.polyform import (
    CandidatePolynomial,
    MultiIndex,
    combine,
    derivative_tables,
    enumerate_basis,
    monomial_table,
)

logger = logging.getLogger(__name__)

DEFAULT_POINTS_PER_AXIS = 51
CHUNK_SIZE = 128


@dataclass(frozen=True, kw_only=True)
class Region:
    """Axis-aligned box of the given side lengths centred at the equilibrium."""

    center: tuple[float, ...]
    side_lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "side_lengths", tuple(float(v) for v in self.side_lengths))
        if len(self.center) != len(self.side_lengths):
            raise ValueError(
                f"Region center has {len(self.center)} entries but "
                f"{len(self.side_lengths)} side lengths were given"
            )
        if not self.side_lengths or any(
                not math.isfinite(a) or a <= 0 for a in self.side_lengths
        ):
            raise ValueError(f"Side lengths must be positive, got {self.side_lengths}")

    @property
    def dimension(self) -> int:
        """Number of axes."""
        return len(self.center)


@dataclass(frozen=True, kw_only=True)
class GridSpec:
    """Verification lattice over a region.

    ``exclusion_radius`` is an ∞-norm distance from the centre below which
    points are skipped; ``None`` means half the smallest grid step.
    """

    region: Region
    points_per_axis: Union[int, tuple[int, ...]] = DEFAULT_POINTS_PER_AXIS
    exclusion_radius: Optional[float] = None

    def __post_init__(self) -> None:
        counts = self.points_per_axis
        if isinstance(counts, int):
            counts = (counts,) * self.region.dimension
        counts = tuple(int(k) for k in counts)
        if len(counts) != self.region.dimension:
            raise ValueError(
                f"points_per_axis has {len(counts)} entries, region has "
                f"{self.region.dimension} axes"
            )
        if any(k < 3 for k in counts):
            raise ValueError(f"points_per_axis must be at least 3, got {counts}")
        object.__setattr__(self, "points_per_axis", counts)
        if self.exclusion_radius is not None:
            if self.exclusion_radius < 0:
                raise ValueError(
                    f"exclusion_radius must be non-negative, got {self.exclusion_radius}"
                )
            if self.exclusion_radius >= min(self.region.side_lengths) / 2:
                raise ValueError(
                    f"exclusion_radius {self.exclusion_radius} must be below half the "
                    f"smallest side {min(self.region.side_lengths)}"
                )

    @property
    def steps(self) -> tuple[float, ...]:
        """Lattice spacing per axis."""
        return tuple(
            a / (k - 1) for a, k in zip(self.region.side_lengths, self.points_per_axis)
        )

    @property
    def radius(self) -> float:
        """Effective exclusion radius."""
        if self.exclusion_radius is None:
            return 0.5 * min(self.steps)
        return float(self.exclusion_radius)


def build_grid(spec: GridSpec) -> np.ndarray:
    """Lay out the lattice in row-major order, minus the excluded centre ball.

    Corners are always included; with an odd count per axis the centre lies on
    the lattice.

    Returns:
        np.ndarray: Points of shape (P, n).

    Raises:
        ValueError: If exclusion removes every point.
    """
    region = spec.region
    axes = [
        np.linspace(c - a / 2, c + a / 2, k)
        for c, a, k in zip(region.center, region.side_lengths, spec.points_per_axis)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    distance = np.max(np.abs(points - np.asarray(region.center)), axis=1)
    kept = points[distance > spec.radius] if spec.radius > 0 else points
    if kept.shape[0] == 0:
        raise ValueError("The grid is empty after excluding the equilibrium")
    dropped = points.shape[0] - kept.shape[0]
    if dropped > points.shape[0] // 2:
        logger.warning(
            "Exclusion radius %.3g removes %d of %d grid points",
            spec.radius,
            dropped,
            points.shape[0],
        )
    return kept


class Verdict(str, enum.Enum):
    """Classification of one grid point."""

    SATISFIED = "satisfied"
    VIOLATED_POSITIVITY = "violated_positivity"
    VIOLATED_DECREASE = "violated_decrease"


@dataclass(frozen=True)
class Violation:
    """A grid point in Y with the values that put it there."""

    point: tuple[float, ...]
    value: float
    derivative: float
    verdict: Verdict


@dataclass(kw_only=True)
class CostReport:
    """Outcome of checking one candidate on one grid."""

    cost: float
    satisfied_count: int
    violated_count: int
    total_points: int
    positivity_failures: int
    decrease_failures: int
    min_value: float
    """Smallest L over the grid; positive when every point passes."""
    max_derivative: float
    """Largest ∇L·f over the grid; negative when every point passes."""
    violations: list[Violation] = field(default_factory=list)

    @property
    def success(self) -> bool:
        """True when J is exactly zero."""
        return self.violated_count == 0


def _lie_values(gradients: Sequence[np.ndarray], field_values: np.ndarray) -> np.ndarray:
    # Sum over axes in a fixed order so one-point and batched calls agree bitwise.
    total = np.zeros_like(gradients[0])
    for axis, grad in enumerate(gradients):
        f = field_values[:, axis]
        total += grad * (f if grad.ndim == 1 else f[:, None])
    return total


def lie_derivative(
        c: CandidatePolynomial, vf: VectorField, x: Sequence[float]
) -> float:
    """Return ∇L(x)·f(x).

    Raises:
        DomainError: When f cannot be evaluated at x.
    """
    _check_dimensions(c, vf)
    point = np.asarray([x], dtype=float)
    tables = derivative_tables(c.basis, c.deviations(point))
    coefficients = np.asarray(c.coefficients)
    gradients = [combine(t, coefficients) for t in tables]
    return float(_lie_values(gradients, vf.tabulate(point))[0])


def _verdicts(values: np.ndarray, derivatives: np.ndarray) -> np.ndarray:
    # positivity is checked first; 0.0 counts as a failure for both conditions
    verdict = np.full(values.shape, Verdict.SATISFIED.value, dtype=object)
    verdict[derivatives >= 0] = Verdict.VIOLATED_DECREASE.value
    verdict[values <= 0] = Verdict.VIOLATED_POSITIVITY.value
    return verdict


def classify_point(
        c: CandidatePolynomial, vf: VectorField, x: Sequence[float]
) -> Verdict:
    """Classify x as satisfying or the first condition it violates."""
    _check_dimensions(c, vf)
    point = np.asarray(x, dtype=float)
    values = c.values(point[None, :])
    derivative = np.asarray([lie_derivative(c, vf, point)])
    return Verdict(_verdicts(values, derivative)[0])


def _check_dimensions(c: CandidatePolynomial, vf: VectorField) -> None:
    if c.dimension != vf.dimension:
        raise ValueError(
            f"Candidate dimension {c.dimension} does not match field dimension {vf.dimension}"
        )


class CostContext:
    """Precomputed tables for scoring many candidates on one grid.

    The monomial table, the derivative tables and f are tabulated once; scoring
    a genome is then a handful of column sums. Results do not depend on the
    worker count.

    Args:
        vf (VectorField): The dynamics.
        spec (GridSpec): Grid to check on.
        max_degree (int): Candidate degree N.
        equilibrium (Optional[Sequence[float]]): Expansion point of the
            candidates; defaults to the field's equilibrium.
    """

    def __init__(
            self,
            vf: VectorField,
            spec: GridSpec,
            max_degree: int,
            equilibrium: Optional[Sequence[float]] = None,
    ) -> None:
        if spec.region.dimension != vf.dimension:
            raise ValueError(
                f"Region dimension {spec.region.dimension} does not match field "
                f"dimension {vf.dimension}"
            )
        self.field = vf
        self.spec = spec
        self.max_degree = max_degree
        self.equilibrium = tuple(
            float(v) for v in (vf.equilibrium if equilibrium is None else equilibrium)
        )
        self.basis: list[MultiIndex] = enumerate_basis(vf.dimension, max_degree)
        self.points = build_grid(spec)
        deviations = self.points - np.asarray(self.equilibrium)
        self.field_values = vf.tabulate(self.points)
        self.monomials = monomial_table(self.basis, deviations)
        self.derivatives = derivative_tables(self.basis, deviations)
        logger.debug(
            "Cost context: %d points, %d basis terms", self.points.shape[0], len(self.basis)
        )

    @property
    def size(self) -> int:
        """Number of non-excluded grid points."""
        return int(self.points.shape[0])

    def values(self, coefficients: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (L, ∇L·f) on the grid for one genome or a population."""
        values = combine(self.monomials, coefficients)
        gradients = [combine(t, coefficients) for t in self.derivatives]
        return values, _lie_values(gradients, self.field_values)

    def _chunk_costs(self, population: np.ndarray) -> np.ndarray:
        values, derivatives = self.values(population)
        satisfied = np.count_nonzero((values > 0) & (derivatives < 0), axis=0)
        return (self.size - satisfied) / self.size

    def population_costs(self, population: np.ndarray, workers: int = 1) -> np.ndarray:
        """Score every row of population.

        Args:
            population (np.ndarray): Genomes, shape (m, γ).
            workers (int): Threads to spread genome chunks over.

        Returns:
            np.ndarray: J per genome, shape (m,).
        """
        population = np.atleast_2d(np.asarray(population, dtype=float))
        if population.shape[1] != len(self.basis):
            raise ValueError(
                f"Genomes have {population.shape[1]} genes, basis has {len(self.basis)} terms"
            )
        chunks = [
            population[start:start + CHUNK_SIZE]
            for start in range(0, population.shape[0], CHUNK_SIZE)
        ]
        if workers <= 1 or len(chunks) == 1:
            results = [self._chunk_costs(chunk) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(self._chunk_costs, chunks))
        return np.concatenate(results)

    def report(
            self, coefficients: Sequence[float], violation_limit: Optional[int] = None
    ) -> CostReport:
        """Build the full report for one genome.

        Args:
            coefficients (Sequence[float]): One genome in basis order.
            violation_limit (Optional[int]): Keep at most this many violations;
                counts are always complete.
        """
        genome = np.asarray(coefficients, dtype=float)
        values, derivatives = self.values(genome)
        verdicts = _verdicts(values, derivatives)
        failing = np.flatnonzero(verdicts != Verdict.SATISFIED.value)
        positivity = int(np.count_nonzero(verdicts == Verdict.VIOLATED_POSITIVITY.value))
        kept = failing if violation_limit is None else failing[:violation_limit]
        violations = [
            Violation(
                point=tuple(float(v) for v in self.points[i]),
                value=float(values[i]),
                derivative=float(derivatives[i]),
                verdict=Verdict(verdicts[i]),
            )
            for i in kept
        ]
        violated = int(failing.size)
        return CostReport(
            cost=violated / self.size,
            satisfied_count=self.size - violated,
            violated_count=violated,
            total_points=self.size,
            positivity_failures=positivity,
            decrease_failures=violated - positivity,
            min_value=float(np.min(values)),
            max_derivative=float(np.max(derivatives)),
            violations=violations,
        )


def cost(
        c: CandidatePolynomial,
        vf: VectorField,
        spec: GridSpec,
        *,
        violation_limit: Optional[int] = None,
) -> CostReport:
    """Compute J = |Y| / (|X| + |Y|) for a candidate over the grid.

    Raises:
        ValueError: On dimension mismatches or an empty grid.
        DomainError: When f leaves its domain at a grid point.
    """
    _check_dimensions(c, vf)
    context = CostContext(vf, spec, c.max_degree, equilibrium=c.equilibrium)
    return context.report(c.coefficients, violation_limit=violation_limit)
