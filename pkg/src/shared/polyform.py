"""Truncated Taylor candidates for Lyapunov functions.

A candidate is a polynomial in the deviation coordinates (x - x̄) with no
constant term, so it vanishes at the equilibrium by construction. The
coefficients are ordered over a graded lexicographic multi-index basis, which
is also the genome layout used by the genetic search.

Functions:
    enumerate_basis: List the multi-indices of total degree 1..N.
    evaluate: Evaluate a candidate at a point.
    gradient: Exact partial derivatives of a candidate at a point.
    format_polynomial: Render a candidate as text.
    parse_polynomial: Read a candidate back from text.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

try:
    from typing_extensions import Iterable, Sequence
except ImportError:
    from typing import Iterable, Sequence

import numpy as np


class PolynomialSyntaxError(ValueError):
    """Raised when candidate text cannot be represented in the basis."""


class MultiIndex(tuple):
    """Exponents (k1, ..., kn) of one monomial."""

    def __new__(cls, exponents: Iterable[int]) -> "MultiIndex":
        values = tuple(int(k) for k in exponents)
        if any(k < 0 for k in values):
            raise ValueError(f"Exponents must be non-negative, got {values}")
        return super().__new__(cls, values)

    @property
    def degree(self) -> int:
        """Total degree of the monomial."""
        return sum(self)


@lru_cache(maxsize=64)
def _basis(dimension: int, max_degree: int) -> tuple[MultiIndex, ...]:
    exponents = (
        e
        for e in itertools.product(range(max_degree + 1), repeat=dimension)
        if 1 <= sum(e) <= max_degree
    )
    ordered = sorted(exponents, key=lambda e: (sum(e), tuple(-k for k in e)))
    return tuple(MultiIndex(e) for e in ordered)


def enumerate_basis(dimension: int, max_degree: int) -> list[MultiIndex]:
    """Enumerate the candidate basis in graded lexicographic order.

    Within one total degree the exponent tuples are listed in descending
    lexicographic order, so for two variables and degree 2 the order is
    x1^2, x1*x2, x2^2.

    Args:
        dimension (int): Number of state variables n.
        max_degree (int): Highest total degree N.

    Returns:
        list[MultiIndex]: All C(n+N, N) - 1 multi-indices of degree 1..N.

    Raises:
        ValueError: If the dimension or the degree is below one.
    """
    if dimension < 1:
        raise ValueError(f"Dimension must be at least 1, got {dimension}")
    if max_degree < 1:
        raise ValueError(f"Max degree must be at least 1, got {max_degree}")
    return list(_basis(dimension, max_degree))


def basis_size(dimension: int, max_degree: int) -> int:
    """Return the number of basis terms, C(n+N, N) - 1."""
    return math.comb(dimension + max_degree, max_degree) - 1


def monomial_table(
        basis: Sequence[MultiIndex], deviations: np.ndarray
) -> np.ndarray:
    """Tabulate every basis monomial at every point.

    Powers are built by repeated multiplication in a fixed order, so a single
    point and a batch of points give bitwise identical values.

    Args:
        basis (Sequence[MultiIndex]): Basis to tabulate.
        deviations (np.ndarray): Points in deviation coordinates, shape (P, n).

    Returns:
        np.ndarray: Array of shape (P, len(basis)).
    """
    deviations = np.asarray(deviations, dtype=float)
    max_power = max((max(m) for m in basis), default=0)
    powers = [np.ones_like(deviations)]
    for _ in range(max_power):
        powers.append(powers[-1] * deviations)
    table = np.empty((deviations.shape[0], len(basis)))
    for column, exponents in enumerate(basis):
        product = powers[exponents[0]][:, 0].copy()
        for axis in range(1, len(exponents)):
            product *= powers[exponents[axis]][:, axis]
        table[:, column] = product
    return table


def derivative_tables(
        basis: Sequence[MultiIndex], deviations: np.ndarray
) -> np.ndarray:
    """Tabulate the partial derivatives of every basis monomial.

    Uses the exponent-times-lowered-power rule; no finite differences.

    Returns:
        np.ndarray: Array of shape (n, P, len(basis)); entry [i, p, k] is the
        derivative of monomial k along axis i at point p.
    """
    deviations = np.asarray(deviations, dtype=float)
    dimension = deviations.shape[1]
    tables = np.zeros((dimension, deviations.shape[0], len(basis)))
    for axis in range(dimension):
        lowered = []
        columns = []
        for column, exponents in enumerate(basis):
            if exponents[axis] == 0:
                continue
            reduced = list(exponents)
            reduced[axis] -= 1
            lowered.append(MultiIndex(reduced))
            columns.append(column)
        if not columns:
            continue
        values = monomial_table(lowered, deviations)
        for position, column in enumerate(columns):
            tables[axis, :, column] = basis[column][axis] * values[:, position]
    return tables


def combine(table: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    """Sum coefficient-weighted table columns in basis order.

    Args:
        table (np.ndarray): Monomial table, shape (P, γ).
        coefficients (np.ndarray): One genome (γ,) or a population (m, γ).

    Returns:
        np.ndarray: Shape (P,) for one genome, (P, m) for a population.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.ndim == 1:
        total = np.zeros(table.shape[0])
        for column in range(table.shape[1]):
            total += coefficients[column] * table[:, column]
        return total
    total = np.zeros((table.shape[0], coefficients.shape[0]))
    for column in range(table.shape[1]):
        total += table[:, column, None] * coefficients[None, :, column]
    return total


@dataclass(frozen=True, kw_only=True)
class CandidatePolynomial:
    """A potential Lyapunov function over the graded basis.

    Immutable; equal coefficient tuples describe the same function.
    """

    dimension: int
    max_degree: int
    coefficients: tuple[float, ...]
    equilibrium: tuple[float, ...] = ()
    basis: tuple[MultiIndex, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        basis = tuple(enumerate_basis(self.dimension, self.max_degree))
        coefficients = tuple(float(c) for c in self.coefficients)
        if len(coefficients) != len(basis):
            raise ValueError(
                f"Expected {len(basis)} coefficients for n={self.dimension}, "
                f"N={self.max_degree}, got {len(coefficients)}"
            )
        equilibrium = tuple(float(v) for v in self.equilibrium) or (0.0,) * self.dimension
        if len(equilibrium) != self.dimension:
            raise ValueError(
                f"Equilibrium has {len(equilibrium)} entries, expected {self.dimension}"
            )
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "equilibrium", equilibrium)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_genome(
            cls,
            genome: Sequence[float],
            *,
            dimension: int,
            max_degree: int,
            equilibrium: Sequence[float] = (),
    ) -> "CandidatePolynomial":
        """Wrap a GA genome as a candidate."""
        return cls(
            dimension=dimension,
            max_degree=max_degree,
            coefficients=tuple(float(g) for g in genome),
            equilibrium=tuple(equilibrium),
        )

    def scaled(self, alpha: float) -> "CandidatePolynomial":
        """Return the candidate with every coefficient multiplied by alpha."""
        return CandidatePolynomial(
            dimension=self.dimension,
            max_degree=self.max_degree,
            coefficients=tuple(alpha * c for c in self.coefficients),
            equilibrium=self.equilibrium,
        )

    def deviations(self, points: np.ndarray) -> np.ndarray:
        """Shift points to deviation coordinates, checking the dimension."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise ValueError(
                f"Point has dimension {points.shape[1]}, candidate expects {self.dimension}"
            )
        return points - np.asarray(self.equilibrium)

    def values(self, points: np.ndarray) -> np.ndarray:
        """Evaluate L at each row of points."""
        table = monomial_table(self.basis, self.deviations(points))
        return combine(table, np.asarray(self.coefficients))

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Evaluate ∇L at each row of points, shape (P, n)."""
        tables = derivative_tables(self.basis, self.deviations(points))
        coefficients = np.asarray(self.coefficients)
        return np.stack([combine(t, coefficients) for t in tables], axis=1)

    def __str__(self) -> str:
        return format_polynomial(self)


def evaluate(c: CandidatePolynomial, x: Sequence[float]) -> float:
    """Evaluate the candidate at x; exactly 0.0 at the equilibrium."""
    _check_point(c, x)
    return float(c.values(np.asarray([x], dtype=float))[0])


def gradient(c: CandidatePolynomial, x: Sequence[float]) -> np.ndarray:
    """Return (∂L/∂x1, ..., ∂L/∂xn) at x, computed analytically."""
    _check_point(c, x)
    return c.gradients(np.asarray([x], dtype=float))[0]


def _check_point(c: CandidatePolynomial, x: Sequence[float]) -> None:
    if len(x) != c.dimension:
        raise ValueError(f"Point has dimension {len(x)}, candidate expects {c.dimension}")


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _format_monomial(exponents: MultiIndex) -> str:
    factors = []
    for axis, power in enumerate(exponents, start=1):
        if power == 1:
            factors.append(f"x{axis}")
        elif power > 1:
            factors.append(f"x{axis}^{power}")
    return "*".join(factors)


def format_polynomial(c: CandidatePolynomial) -> str:
    """Render the candidate as signed terms, e.g. ``8*x1^2 - x2^3``.

    Zero coefficients are omitted, unit coefficients are written without a
    factor and the all-zero candidate is ``0``. Variables stand for the
    deviation coordinates x - x̄.
    """
    parts: list[str] = []
    for coefficient, exponents in zip(c.coefficients, c.basis):
        if coefficient == 0:
            continue
        sign = "-" if coefficient < 0 else "+"
        magnitude = abs(coefficient)
        monomial = _format_monomial(exponents)
        term = monomial if magnitude == 1 else f"{_format_number(magnitude)}*{monomial}"
        if not parts:
            parts.append(f"-{term}" if sign == "-" else term)
        else:
            parts.append(f" {sign} {term}")
    return "".join(parts) or "0"


_TERM_SPLIT = re.compile(r"(?<![eE])\s*([+-])\s*")
_NUMBER = re.compile(r"^(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_FACTOR = re.compile(r"^x(\d+)(\^(\d+))?$")


def parse_polynomial(
        text: str,
        *,
        dimension: int,
        max_degree: int,
        equilibrium: Sequence[float] = (),
) -> CandidatePolynomial:
    """Read candidate text in the ``format_polynomial`` syntax.

    Repeated monomials are summed. A literal ``0`` is the zero candidate.

    Raises:
        PolynomialSyntaxError: On a constant term, a term above max_degree, an
            unknown variable or a malformed factor.
    """
    basis = enumerate_basis(dimension, max_degree)
    position = {m: i for i, m in enumerate(basis)}
    coefficients = [0.0] * len(basis)
    source = text.strip()
    if not source:
        raise PolynomialSyntaxError("Empty candidate")
    if source == "0":
        return CandidatePolynomial(
            dimension=dimension,
            max_degree=max_degree,
            coefficients=tuple(coefficients),
            equilibrium=tuple(equilibrium),
        )

    pieces = _TERM_SPLIT.split(source)
    # split yields [leading, sign, term, sign, term, ...]
    terms: list[tuple[str, str]] = []
    if pieces[0]:
        terms.append(("+", pieces[0]))
    for i in range(1, len(pieces), 2):
        terms.append((pieces[i], pieces[i + 1]))

    for sign, term in terms:
        coefficient, exponents = _parse_term(term, dimension)
        monomial = MultiIndex(exponents)
        if monomial.degree == 0:
            raise PolynomialSyntaxError(f"Constant term {term!r} is not allowed")
        if monomial.degree > max_degree:
            raise PolynomialSyntaxError(
                f"Term {term!r} has degree {monomial.degree} > {max_degree}"
            )
        value = -coefficient if sign == "-" else coefficient
        coefficients[position[monomial]] += value

    return CandidatePolynomial(
        dimension=dimension,
        max_degree=max_degree,
        coefficients=tuple(coefficients),
        equilibrium=tuple(equilibrium),
    )


def _parse_term(term: str, dimension: int) -> tuple[float, list[int]]:
    if not term:
        raise PolynomialSyntaxError("Missing term after sign")
    coefficient = 1.0
    exponents = [0] * dimension
    for index, factor in enumerate(part.strip() for part in term.split("*")):
        if index == 0 and _NUMBER.match(factor):
            coefficient = float(factor)
            continue
        match = _FACTOR.match(factor)
        if not match:
            raise PolynomialSyntaxError(f"Cannot read factor {factor!r} in {term!r}")
        axis = int(match.group(1))
        if not 1 <= axis <= dimension:
            raise PolynomialSyntaxError(
                f"Variable x{axis} out of range for dimension {dimension}"
            )
        exponents[axis - 1] += int(match.group(3) or 1)
    return coefficient, exponents
