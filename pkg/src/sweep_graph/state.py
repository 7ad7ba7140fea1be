"""State management for the sweep graph.

A sweep plan is a base problem and GA configuration, zero or more varied axes
whose values are combined as a cartesian product into cells, and a list of
seeds run in every cell.
"""

import dataclasses
import itertools
import math
from dataclasses import dataclass, field

try:
    from typing_extensions import Annotated, Optional, Union
except ImportError:
    from typing import Annotated, Optional, Union

from analysis.bins import BinCount
from search_graph.configuration import Alphabet, GaConfiguration
from search_graph.state import RunTrace
from shared.dynsys import VectorField
from shared.state import reduce_records
from shared.verifier import GridSpec, Region

AXES = (
    "coefficient_range",
    "region_side",
    "region_area",
    "population_size",
    "mutation_prob",
    "max_generations",
)

SWEEP_HEADER = (
    "cell_id",
    "varied_param",
    "value",
    "seed",
    "success",
    "generations",
    "best_J",
    "elapsed_ms",
)


@dataclass(frozen=True, kw_only=True)
class Problem:
    """Dynamics, candidate degree and the box Ω centred on the equilibrium."""

    system: VectorField
    degree: int
    side_lengths: tuple[float, ...]
    points_per_axis: Union[int, tuple[int, ...]] = 51
    exclusion_radius: Optional[float] = None

    def grid(self) -> GridSpec:
        """The verification grid of this problem."""
        return GridSpec(
            region=Region(center=self.system.equilibrium, side_lengths=self.side_lengths),
            points_per_axis=self.points_per_axis,
            exclusion_radius=self.exclusion_radius,
        )


@dataclass(frozen=True)
class Axis:
    """One varied parameter and the values it takes."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.name not in AXES:
            raise ValueError(f"Unsupported sweep axis: {self.name}. Expected one of {AXES}")
        if not self.values:
            raise ValueError(f"Axis {self.name} has no values")


def apply_axis(
        problem: Problem, ga: GaConfiguration, name: str, value: float
) -> tuple[Problem, GaConfiguration]:
    """Return the problem and configuration with one axis set to value."""
    match name:
        case "coefficient_range":
            ga = dataclasses.replace(
                ga, alphabet=Alphabet(lo=-value, hi=value, step=ga.alphabet.step)
            )
        case "region_side":
            problem = dataclasses.replace(
                problem, side_lengths=(float(value),) * problem.system.dimension
            )
        case "region_area":
            if value <= 0:
                raise ValueError(f"region_area must be positive, got {value}")
            side = math.sqrt(value)
            problem = dataclasses.replace(
                problem, side_lengths=(side,) * problem.system.dimension
            )
        case "population_size" | "max_generations":
            if value != int(value):
                raise ValueError(f"{name} must be an integer, got {value}")
            ga = dataclasses.replace(ga, **{name: int(value)})
        case "mutation_prob":
            ga = dataclasses.replace(ga, mutation_prob=float(value))
        case _:
            raise ValueError(f"Unsupported sweep axis: {name}")
    problem.grid()
    return problem, ga


@dataclass(frozen=True, kw_only=True)
class Cell:
    """One point of the cartesian product of the axes."""

    cell_id: int
    assignments: tuple[tuple[str, float], ...]
    problem: Problem
    ga: GaConfiguration

    @property
    def varied_param(self) -> str:
        """Axis names joined with '+'."""
        return "+".join(name for name, _ in self.assignments)

    @property
    def value(self) -> str:
        """Axis values joined with '+', in axis order."""
        return "+".join(f"{v:g}" for _, v in self.assignments)


@dataclass(frozen=True, kw_only=True)
class SweepPlan:
    """Everything a sweep runs: base problem, base GA, axes and seeds."""

    problem: Problem
    ga: GaConfiguration
    axes: tuple[Axis, ...] = ()
    seeds: tuple[int, ...]
    keep_traces: bool = False
    """Keep each run's per-generation trace on its row."""

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("A sweep plan needs at least one seed")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"Sweep axes must be distinct, got {names}")
        if {"region_side", "region_area"} <= set(names):
            raise ValueError("region_side and region_area cannot be varied together")
        self.cells()

    def cells(self) -> list[Cell]:
        """Expand the axes into cells, last axis varying fastest.

        Raises:
            ValueError: If some combination of values is invalid.
        """
        cells = []
        combos = itertools.product(*(a.values for a in self.axes))
        for cell_id, combo in enumerate(combos):
            problem, ga = self.problem, self.ga
            assignments = tuple(zip((a.name for a in self.axes), combo))
            for name, value in assignments:
                problem, ga = apply_axis(problem, ga, name, value)
            cells.append(Cell(cell_id=cell_id, assignments=assignments, problem=problem, ga=ga))
        return cells


@dataclass(frozen=True, kw_only=True)
class SweepRow:
    """Outcome of one (cell, seed) run."""

    cell_id: int
    varied_param: str
    value: str
    seed: int
    success: bool
    generations: int
    """First generation with J = 0 on success, generations executed otherwise."""
    best_cost: float
    elapsed_ms: float
    trace: Optional[RunTrace] = field(default=None, repr=False, compare=False)

    def csv_row(self) -> tuple[object, ...]:
        """Row matching ``SWEEP_HEADER``."""
        return (
            self.cell_id,
            self.varied_param,
            self.value,
            self.seed,
            int(self.success),
            self.generations,
            self.best_cost,
            round(self.elapsed_ms, 3),
        )


@dataclass(frozen=True)
class SweepResult:
    """Rows ordered by (cell_id, seed) and the success bins."""

    rows: tuple[SweepRow, ...]
    bins: tuple[BinCount, ...]


@dataclass(kw_only=True)
class CellState:
    """Private state for the run_cell node: one cell and one seed."""

    cell: Cell
    seed: int
    keep_trace: bool = False


@dataclass(kw_only=True)
class InputState:
    """The sweep to run."""

    plan: SweepPlan


@dataclass(kw_only=True)
class SweepState(InputState):
    """State of the sweep graph."""

    rows: Annotated[list[SweepRow], reduce_records] = field(default_factory=list)
    """One row per finished run, in completion order."""
    bins: list[BinCount] = field(default_factory=list)
