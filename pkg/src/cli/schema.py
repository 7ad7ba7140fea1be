"""File schemas: search configs, sweep plans and reports.

Configs and plans are decoded strictly; an unknown or mistyped key fails with
its JSON path (e.g. ``$.ga.population_size``).
"""

from __future__ import annotations

try:
    from typing_extensions import Annotated, Literal, Optional, Union
except ImportError:
    from typing import Annotated, Literal, Optional, Union

import msgspec

from search_graph.configuration import Alphabet, GaConfiguration
from shared.dynsys import VectorField, builtin
from shared.polyform import CandidatePolynomial
from shared.verifier import CostReport, GridSpec, Region

PositiveInt = Annotated[int, msgspec.Meta(ge=1)]
Probability = Annotated[float, msgspec.Meta(ge=0, le=1)]


class SystemSpec(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    """A builtin system by name, or inline equations with their equilibrium."""

    name: Optional[str] = None
    params: dict[str, float] = {}
    equations: Optional[Annotated[list[str], msgspec.Meta(min_length=1)]] = None
    equilibrium: Optional[list[float]] = None

    def build(self) -> VectorField:
        """Construct the vector field.

        Raises:
            ValueError: If the entry mixes or omits the two forms.
        """
        if self.name is not None:
            if self.equations is not None or self.equilibrium is not None:
                raise ValueError("system: give either name or equations + equilibrium, not both")
            return builtin(self.name, **self.params)
        if self.equations is None or self.equilibrium is None:
            raise ValueError("system: needs a builtin name, or equations and equilibrium")
        if self.params:
            raise ValueError("system.params only applies to builtin systems")
        return VectorField.from_equations(self.equations, self.equilibrium)


class RegionSpec(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    side_lengths: Annotated[list[float], msgspec.Meta(min_length=1)]


class GridSection(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    points_per_axis: Union[int, list[int]] = 51
    exclusion_radius: Optional[float] = None


class AlphabetSpec(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    lo: float = -2.0
    hi: float = 2.0
    step: float = 1.0


class GaSection(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    """GA knobs; defaults are the reference configuration."""

    population_size: Annotated[int, msgspec.Meta(ge=2)] = 1000
    mutation_prob: Probability = 0.2
    crossover_prob: Probability = 0.4
    elite_fraction: Annotated[float, msgspec.Meta(ge=0, lt=1)] = 0.01
    max_generations: PositiveInt = 200
    alphabet: AlphabetSpec = msgspec.field(default_factory=AlphabetSpec)
    clamp_mode: Literal["clamped", "init-only"] = "clamped"
    early_exit: bool = True
    snapshot_every: Annotated[int, msgspec.Meta(ge=0)] = 0


class OutputSection(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    report: Optional[str] = None
    """Report path; the report goes to stdout when unset."""
    trace: Optional[str] = None


class ProblemConfig(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    """System, degree, region, grid and GA settings."""

    system: SystemSpec
    degree: PositiveInt
    region: RegionSpec
    grid: GridSection = msgspec.field(default_factory=GridSection)
    ga: GaSection = msgspec.field(default_factory=GaSection)
    workers: Optional[PositiveInt] = None
    violation_limit: Annotated[int, msgspec.Meta(ge=1)] = 100

    def build_problem(self) -> tuple[VectorField, GridSpec]:
        """Build the field and the grid over Ω centred on its equilibrium."""
        system = self.system.build()
        counts = self.grid.points_per_axis
        grid = GridSpec(
            region=Region(center=system.equilibrium, side_lengths=tuple(self.region.side_lengths)),
            points_per_axis=counts if isinstance(counts, int) else tuple(counts),
            exclusion_radius=self.grid.exclusion_radius,
        )
        return system, grid

    def ga_configuration(self, seed: int, workers: Optional[int] = None) -> GaConfiguration:
        """Build the GA configuration for one seed."""
        ga = self.ga
        overrides = {}
        workers = workers if workers is not None else self.workers
        if workers is not None:
            overrides["workers"] = workers
        return GaConfiguration(
            population_size=ga.population_size,
            mutation_prob=ga.mutation_prob,
            crossover_prob=ga.crossover_prob,
            elite_fraction=ga.elite_fraction,
            max_generations=ga.max_generations,
            alphabet=Alphabet(lo=ga.alphabet.lo, hi=ga.alphabet.hi, step=ga.alphabet.step),
            rng_seed=seed,
            early_exit_on_zero=ga.early_exit,
            clamp_mode=ga.clamp_mode,
            snapshot_every=ga.snapshot_every,
            violation_limit=self.violation_limit,
            **overrides,
        )


class SearchConfig(ProblemConfig, kw_only=True, forbid_unknown_fields=True):
    """A search run. The seed is mandatory."""

    seed: Annotated[int, msgspec.Meta(ge=0)]
    output: OutputSection = msgspec.field(default_factory=OutputSection)


class AxisSpec(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    name: str
    values: Annotated[list[float], msgspec.Meta(min_length=1)]


class SweepPlanFile(msgspec.Struct, kw_only=True, forbid_unknown_fields=True):
    """A sweep: base problem, varied axes and seeds."""

    base: ProblemConfig
    axes: list[AxisSpec] = []
    seeds: Annotated[list[Annotated[int, msgspec.Meta(ge=0)]], msgspec.Meta(min_length=1)]
    output_dir: str = "sweep_out"
    bin_width: PositiveInt = 200
    bin_count: PositiveInt = 5
    write_traces: bool = False
    max_concurrency: PositiveInt = 4


# Reports


class CandidateOut(msgspec.Struct, kw_only=True):
    dimension: int
    degree: int
    equilibrium: list[float]
    basis: list[list[int]]
    coefficients: list[float]
    text: str

    @classmethod
    def from_candidate(cls, c: CandidatePolynomial, text: str) -> CandidateOut:
        return cls(
            dimension=c.dimension,
            degree=c.max_degree,
            equilibrium=list(c.equilibrium),
            basis=[list(m) for m in c.basis],
            coefficients=list(c.coefficients),
            text=text,
        )


class ViolationOut(msgspec.Struct, kw_only=True):
    point: list[float]
    value: float
    derivative: float
    verdict: str


class CostOut(msgspec.Struct, kw_only=True):
    """J, the set sizes, the margins and the kept violations."""

    J: float
    satisfied: int
    violated: int
    total: int
    positivity_failures: int
    decrease_failures: int
    min_value: float
    max_derivative: float
    violations: list[ViolationOut]
    violations_truncated: bool

    @classmethod
    def from_report(cls, report: CostReport) -> CostOut:
        return cls(
            J=report.cost,
            satisfied=report.satisfied_count,
            violated=report.violated_count,
            total=report.total_points,
            positivity_failures=report.positivity_failures,
            decrease_failures=report.decrease_failures,
            min_value=report.min_value,
            max_derivative=report.max_derivative,
            violations=[
                ViolationOut(
                    point=list(v.point),
                    value=v.value,
                    derivative=v.derivative,
                    verdict=v.verdict.value,
                )
                for v in report.violations
            ],
            violations_truncated=len(report.violations) < report.violated_count,
        )


class Report(msgspec.Struct, kw_only=True):
    """Outcome of a search, with enough of the config to re-run it."""

    version: str
    outcome: Literal["found", "not_found"]
    seed: int
    generations: int
    first_success_generation: Optional[int]
    candidate: CandidateOut
    cost: CostOut
    trace: Optional[str]
    config: SearchConfig


def encode_pretty(obj: object) -> str:
    """Encode to indented JSON text with a trailing newline."""
    return msgspec.json.format(msgspec.json.encode(obj), indent=2).decode() + "\n"
