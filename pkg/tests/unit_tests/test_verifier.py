import itertools
import math

import numpy as np
import pytest

from shared.dynsys import DomainError, VectorField, builtin, eval_field
from shared.polyform import CandidatePolynomial, basis_size, evaluate, gradient, parse_polynomial
from shared.verifier import (
    CostContext,
    GridSpec,
    Region,
    Verdict,
    build_grid,
    classify_point,
    cost,
    lie_derivative,
)

PENDULUM_CUBIC = (0, 0, 8, 8, 9, -1, 3, 0, -1)


def box(side: float, points: int = 51, radius=None, center=(0.0, 0.0)) -> GridSpec:
    return GridSpec(
        region=Region(center=center, side_lengths=(side,) * len(center)),
        points_per_axis=points,
        exclusion_radius=radius,
    )


def quadratic(sign: float = 1.0) -> CandidatePolynomial:
    return CandidatePolynomial(dimension=2, max_degree=2, coefficients=(0, 0, sign, 0, sign))


def naive_cost(c: CandidatePolynomial, vf: VectorField, spec: GridSpec) -> float:
    axes = [
        np.linspace(m - a / 2, m + a / 2, k)
        for m, a, k in zip(spec.region.center, spec.region.side_lengths, spec.points_per_axis)
    ]
    violated = total = 0
    for coords in itertools.product(*axes):
        x = tuple(float(v) for v in coords)
        distance = max(abs(v - m) for v, m in zip(x, spec.region.center))
        if spec.radius > 0 and distance <= spec.radius:
            continue
        total += 1
        value = evaluate(c, x)
        derivative = 0.0
        for g, f in zip(gradient(c, x), eval_field(vf, x)):
            derivative += g * f
        if not (value > 0 and derivative < 0):
            violated += 1
    return violated / total


def test_region_validation() -> None:
    with pytest.raises(ValueError):
        Region(center=(0.0, 0.0), side_lengths=(1.0,))
    with pytest.raises(ValueError):
        Region(center=(0.0,), side_lengths=(0.0,))


def test_grid_validation() -> None:
    with pytest.raises(ValueError):
        box(1.0, points=2)
    with pytest.raises(ValueError):
        box(1.0, radius=0.5)
    with pytest.raises(ValueError):
        box(1.0, radius=-0.1)
    with pytest.raises(ValueError):
        GridSpec(region=Region(center=(0.0, 0.0), side_lengths=(1.0, 1.0)), points_per_axis=(5, 5, 5))


def test_build_grid_excludes_only_the_centre_by_default() -> None:
    points = build_grid(box(1.0, points=5))
    assert points.shape == (24, 2)
    assert not np.any(np.all(points == 0.0, axis=1))
    np.testing.assert_array_equal(points[0], [-0.5, -0.5])
    np.testing.assert_array_equal(points[1], [-0.5, -0.25])
    np.testing.assert_array_equal(points[-1], [0.5, 0.5])


def test_zero_exclusion_radius_keeps_the_centre() -> None:
    assert build_grid(box(1.0, points=5, radius=0.0)).shape == (25, 2)


def test_explicit_exclusion_radius_uses_infinity_norm() -> None:
    points = build_grid(box(1.0, points=5, radius=0.3))
    assert points.shape == (16, 2)
    assert np.all(np.max(np.abs(points), axis=1) > 0.3)


def test_per_axis_counts() -> None:
    spec = GridSpec(region=Region(center=(1.0, 2.0), side_lengths=(2.0, 1.0)), points_per_axis=(3, 5))
    points = build_grid(spec)
    assert points.shape == (14, 2)
    assert spec.steps == (1.0, 0.25)


def test_pendulum_cubic_on_pendulum_oracle() -> None:
    spec = box(1.0, points=101)
    c = CandidatePolynomial(dimension=2, max_degree=3, coefficients=PENDULUM_CUBIC)
    report = cost(c, builtin("pendulum"), spec)
    assert report.cost == 0.0
    assert report.total_points == 101 * 101 - 1
    assert report.satisfied_count == report.total_points
    assert report.violations == []
    assert report.min_value > 0
    assert report.max_derivative < 0
    assert naive_cost(c, builtin("pendulum"), spec) == 0.0


def test_trivial_system_sanity() -> None:
    vf = VectorField.from_equations(["-x1", "-x2"], equilibrium=(0.0, 0.0))
    for side in (0.1, 1.0, 7.5):
        assert cost(quadratic(), vf, box(side)).cost == 0.0
        assert cost(quadratic(-1.0), vf, box(side)).cost == 1.0


def test_planar_quadratic_oracle() -> None:
    spec = GridSpec(region=Region(center=(0.0, 0.0), side_lengths=(2.0, 1.8)), points_per_axis=51)
    assert cost(quadratic(), builtin("planar"), spec).cost == 0.0
    assert naive_cost(quadratic(), builtin("planar"), spec) == 0.0


def test_negative_definite_candidate_fails_everywhere() -> None:
    report = cost(quadratic(-1.0), builtin("planar"), box(1.0, points=21))
    assert report.cost == 1.0
    assert report.positivity_failures == report.total_points
    assert report.decrease_failures == 0
    assert all(v.verdict is Verdict.VIOLATED_POSITIVITY for v in report.violations)


def test_cost_matches_naive_loop_on_random_triples() -> None:
    rng = np.random.default_rng(7)
    systems = [
        builtin("pendulum"),
        builtin("planar"),
        VectorField.from_equations(["-x1 + x2^2", "-x2"], equilibrium=(0.0, 0.0)),
    ]
    for _ in range(20):
        vf = systems[int(rng.integers(0, len(systems)))]
        degree = int(rng.integers(1, 5))
        spec = GridSpec(
            region=Region(
                center=vf.equilibrium, side_lengths=tuple(rng.uniform(0.4, 2.0, size=2))
            ),
            points_per_axis=tuple(int(k) for k in rng.integers(5, 26, size=2)),
        )
        c = CandidatePolynomial(
            dimension=2,
            max_degree=degree,
            coefficients=tuple(rng.integers(-2, 3, size=basis_size(2, degree)).astype(float)),
        )
        assert cost(c, vf, spec).cost == naive_cost(c, vf, spec)


def test_cost_bounds_and_partition() -> None:
    rng = np.random.default_rng(99)
    vf = builtin("pendulum")
    for _ in range(30):
        degree = int(rng.integers(1, 4))
        spec = box(float(rng.uniform(0.2, 2.0)), points=int(rng.integers(3, 25)))
        c = CandidatePolynomial(
            dimension=2,
            max_degree=degree,
            coefficients=tuple(rng.normal(size=basis_size(2, degree))),
        )
        report = cost(c, vf, spec, violation_limit=5)
        assert 0.0 <= report.cost <= 1.0
        assert report.satisfied_count + report.violated_count == report.total_points
        assert report.positivity_failures + report.decrease_failures == report.violated_count
        assert len(report.violations) == min(5, report.violated_count)


def test_classification_is_invariant_under_positive_scaling() -> None:
    rng = np.random.default_rng(17)
    vf = builtin("pendulum")
    c = CandidatePolynomial(dimension=2, max_degree=3, coefficients=tuple(rng.normal(size=9)))
    spec = box(1.0, points=15)
    base = cost(c, vf, spec).cost
    points = rng.uniform(-0.5, 0.5, size=(20, 2))
    verdicts = [classify_point(c, vf, x) for x in points]
    for alpha in rng.uniform(0.01, 100.0, size=100):
        scaled = c.scaled(float(alpha))
        assert cost(scaled, vf, spec).cost == base
        assert [classify_point(scaled, vf, x) for x in points[:3]] == verdicts[:3]


def test_classify_point_checks_positivity_first() -> None:
    vf = VectorField.from_equations(["x1", "x2"], equilibrium=(0.0, 0.0))
    c = quadratic(-1.0)
    assert classify_point(c, vf, (0.3, 0.1)) is Verdict.VIOLATED_POSITIVITY
    assert classify_point(quadratic(), vf, (0.3, 0.1)) is Verdict.VIOLATED_DECREASE
    stable = VectorField.from_equations(["-x1", "-x2"], equilibrium=(0.0, 0.0))
    assert classify_point(quadratic(), stable, (0.3, 0.1)) is Verdict.SATISFIED


def test_zero_value_or_derivative_counts_as_violation() -> None:
    vf = VectorField.from_equations(["-x1", "0"], equilibrium=(0.0, 0.0))
    c = quadratic()
    assert lie_derivative(c, vf, (0.0, 0.5)) == 0.0
    assert classify_point(c, vf, (0.0, 0.5)) is Verdict.VIOLATED_DECREASE
    line = CandidatePolynomial(dimension=2, max_degree=1, coefficients=(1.0, 0.0))
    assert classify_point(line, vf, (0.0, 0.5)) is Verdict.VIOLATED_POSITIVITY


def test_equilibrium_in_grid_is_a_violation() -> None:
    vf = VectorField.from_equations(["-x1", "-x2"], equilibrium=(0.0, 0.0))
    report = cost(quadratic(), vf, box(1.0, points=5, radius=0.0))
    assert report.violated_count == 1
    assert report.violations[0].point == (0.0, 0.0)


def test_shifted_equilibrium() -> None:
    vf = VectorField.from_equations(["-(x1 - 1)", "-(x2 + 2)"], equilibrium=(1.0, -2.0))
    c = CandidatePolynomial(
        dimension=2, max_degree=2, coefficients=(0, 0, 1, 0, 1), equilibrium=(1.0, -2.0)
    )
    assert cost(c, vf, box(0.5, center=(1.0, -2.0))).cost == 0.0


def test_lie_derivative_pendulum_cubic_by_hand() -> None:
    c = CandidatePolynomial(dimension=2, max_degree=3, coefficients=PENDULUM_CUBIC)
    # ∇L(1, 0) = (13, 11), f(1, 0) = (0, -sin 1)
    assert lie_derivative(c, builtin("pendulum"), (1.0, 0.0)) == pytest.approx(-11 * math.sin(1.0))


def test_population_costs_match_single_costs_for_any_worker_count() -> None:
    rng = np.random.default_rng(23)
    vf = builtin("pendulum")
    spec = box(1.0, points=31)
    context = CostContext(vf, spec, 3)
    population = rng.integers(-2, 3, size=(300, 9)).astype(float)
    serial = context.population_costs(population, workers=1)
    threaded = context.population_costs(population, workers=4)
    np.testing.assert_array_equal(serial, threaded)
    for genome, value in zip(population[:40], serial[:40]):
        c = CandidatePolynomial(dimension=2, max_degree=3, coefficients=tuple(genome))
        assert cost(c, vf, spec).cost == value


def test_population_costs_check_genome_length() -> None:
    context = CostContext(builtin("planar"), box(1.0, points=5), 2)
    with pytest.raises(ValueError):
        context.population_costs(np.zeros((3, 9)))


def test_domain_error_propagates() -> None:
    vf = VectorField.from_equations(["-x1 + ln(x2 + 1)", "-x2"], equilibrium=(0.0, 0.0))
    with pytest.raises(DomainError) as error:
        cost(quadratic(), vf, box(2.0, points=5))
    assert error.value.component == 0


def test_dimension_mismatch() -> None:
    c = CandidatePolynomial(dimension=3, max_degree=2, coefficients=(1.0,) * 9)
    with pytest.raises(ValueError):
        cost(c, builtin("planar"), box(1.0))


def test_parsed_candidate_scores_like_coefficients() -> None:
    text = "8*x1^2 + 8*x1*x2 + 9*x2^2 - x1^3 + 3*x1^2*x2 - x2^3"
    c = parse_polynomial(text, dimension=2, max_degree=3)
    assert cost(c, builtin("pendulum"), box(1.0)).cost == 0.0
