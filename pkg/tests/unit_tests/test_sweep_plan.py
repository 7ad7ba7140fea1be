import math

import pytest

from search_graph.configuration import Alphabet, GaConfiguration
from shared.dynsys import builtin
from sweep_graph.state import SWEEP_HEADER, Axis, Problem, SweepPlan, SweepRow, apply_axis


def pendulum_problem() -> Problem:
    return Problem(system=builtin("pendulum"), degree=3, side_lengths=(1.0, 1.0))


def test_table_two_shaped_plan_has_thirty_cells() -> None:
    plan = SweepPlan(
        problem=pendulum_problem(),
        ga=GaConfiguration(),
        axes=(
            Axis("region_side", (0.1, 0.5, 1.0)),
            Axis("coefficient_range", (1, 2, 3, 4, 5, 6, 7, 8, 9, 20)),
        ),
        seeds=(1,),
    )
    cells = plan.cells()
    assert len(cells) == 30
    assert [c.cell_id for c in cells] == list(range(30))
    assert cells[0].assignments == (("region_side", 0.1), ("coefficient_range", 1))
    assert cells[1].assignments == (("region_side", 0.1), ("coefficient_range", 2))
    assert cells[29].problem.side_lengths == (1.0, 1.0)
    assert cells[29].ga.alphabet == Alphabet(lo=-20, hi=20, step=1.0)
    assert cells[29].varied_param == "region_side+coefficient_range"
    assert cells[29].value == "1+20"


def test_plan_without_axes_is_a_single_cell() -> None:
    plan = SweepPlan(problem=pendulum_problem(), ga=GaConfiguration(), seeds=(1, 2))
    (cell,) = plan.cells()
    assert cell.varied_param == ""
    assert cell.ga == plan.ga


def test_apply_axis_population_and_generations() -> None:
    problem, ga = apply_axis(pendulum_problem(), GaConfiguration(), "population_size", 40)
    assert ga.population_size == 40
    assert problem == pendulum_problem()
    _, ga = apply_axis(problem, ga, "max_generations", 1000.0)
    assert ga.max_generations == 1000
    with pytest.raises(ValueError):
        apply_axis(problem, ga, "population_size", 10.5)


def test_apply_axis_region_area_is_a_square() -> None:
    problem, _ = apply_axis(pendulum_problem(), GaConfiguration(), "region_area", 10.0)
    assert problem.side_lengths == (math.sqrt(10.0),) * 2
    with pytest.raises(ValueError):
        apply_axis(pendulum_problem(), GaConfiguration(), "region_area", 0.0)


def test_apply_axis_validates_values() -> None:
    with pytest.raises(ValueError):
        apply_axis(pendulum_problem(), GaConfiguration(), "mutation_prob", 1.5)
    with pytest.raises(ValueError):
        apply_axis(pendulum_problem(), GaConfiguration(), "region_side", -1.0)
    with pytest.raises(ValueError):
        apply_axis(pendulum_problem(), GaConfiguration(), "coefficient_range", 0.0)


@pytest.mark.parametrize(
    "axes,seeds",
    [
        ((), ()),
        ((Axis("population_size", (10,)), Axis("population_size", (20,))), (1,)),
        ((Axis("region_side", (1.0,)), Axis("region_area", (1.0,))), (1,)),
        ((Axis("population_size", (1,)),), (1,)),
    ],
)
def test_plan_rejects(axes: tuple, seeds: tuple) -> None:
    with pytest.raises(ValueError):
        SweepPlan(problem=pendulum_problem(), ga=GaConfiguration(), axes=axes, seeds=seeds)


def test_axis_rejects_unknown_name_and_empty_values() -> None:
    with pytest.raises(ValueError):
        Axis("crossover_prob", (0.1,))
    with pytest.raises(ValueError):
        Axis("population_size", ())


def test_row_matches_header() -> None:
    row = SweepRow(
        cell_id=3,
        varied_param="population_size",
        value="40",
        seed=7,
        success=True,
        generations=12,
        best_cost=0.0,
        elapsed_ms=1.23456,
    )
    assert len(row.csv_row()) == len(SWEEP_HEADER)
    assert row.csv_row() == (3, "population_size", "40", 7, 1, 12, 0.0, 1.235)
