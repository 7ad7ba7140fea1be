"""Command-line entry point: ``lyapga search|verify|bound|sweep``.

Exit codes: 0 when a candidate with J = 0 was found or verified, 3 when not,
2 for configuration, candidate or parameter errors, 4 when the dynamics cannot
be evaluated on the grid.
"""

import argparse
import logging
import sys
from pathlib import Path

try:
    from typing_extensions import Optional, Sequence, TypeVar
except ImportError:
    from typing import Optional, Sequence, TypeVar

import msgspec
from dotenv import load_dotenv

from analysis.bins import BIN_HEADER
from analysis.convergence import (
    ConvergenceParams,
    convergence_iterations,
    convergence_probability,
    min_term,
)
from cli import __version__
from cli.schema import (
    CandidateOut,
    CostOut,
    Report,
    SearchConfig,
    SweepPlanFile,
    encode_pretty,
)
from search_graph.graph import run
from search_graph.state import TRACE_HEADER
from shared.dynsys import DomainError
from shared.polyform import CandidatePolynomial, format_polynomial, parse_polynomial
from shared.utils import atomic_write_text, configure_logging, write_csv
from shared.verifier import CostContext
from sweep_graph.configuration import SweepConfiguration
from sweep_graph.graph import sweep
from sweep_graph.state import SWEEP_HEADER, Axis, Problem, SweepPlan

logger = logging.getLogger(__name__)

EXIT_FOUND = 0
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_DOMAIN = 4

S = TypeVar("S", bound=msgspec.Struct)


def load_struct(path: str, kind: type[S]) -> S:
    """Decode a JSON file strictly into a schema struct."""
    with open(path, "rb") as handle:
        return msgspec.json.decode(handle.read(), type=kind)


def cmd_search(args: argparse.Namespace) -> int:
    """Run the genetic search for the config and write the report and trace."""
    config = load_struct(args.config, SearchConfig)
    system, grid = config.build_problem()
    configuration = config.ga_configuration(config.seed, workers=args.workers)
    result = run(system, config.degree, grid, configuration)

    report_path = args.report or config.output.report
    trace_path = args.trace or config.output.trace
    if trace_path:
        write_csv(trace_path, TRACE_HEADER, result.trace.csv_rows())

    context = CostContext(system, grid, config.degree)
    cost_report = context.report(
        result.best.coefficients, violation_limit=configuration.violation_limit
    )
    report = Report(
        version=__version__,
        outcome="found" if result.success else "not_found",
        seed=config.seed,
        generations=result.generations,
        first_success_generation=result.first_success_generation,
        candidate=CandidateOut.from_candidate(result.best, format_polynomial(result.best)),
        cost=CostOut.from_report(cost_report),
        trace=str(trace_path) if trace_path else None,
        config=config,
    )
    text = encode_pretty(report)
    if report_path:
        atomic_write_text(report_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_FOUND if result.success else EXIT_NOT_FOUND


def _parse_coefficients(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValueError(f"--coeffs must be a comma separated list of numbers: {e}") from e


def cmd_verify(args: argparse.Namespace) -> int:
    """Score one candidate on the config's grid and print its cost report."""
    config = load_struct(args.config, SearchConfig)
    system, grid = config.build_problem()
    if args.candidate is not None:
        candidate = parse_polynomial(
            args.candidate,
            dimension=system.dimension,
            max_degree=config.degree,
            equilibrium=system.equilibrium,
        )
    else:
        candidate = CandidatePolynomial(
            dimension=system.dimension,
            max_degree=config.degree,
            coefficients=tuple(_parse_coefficients(args.coeffs)),
            equilibrium=system.equilibrium,
        )
    context = CostContext(system, grid, config.degree)
    report = context.report(candidate.coefficients, violation_limit=config.violation_limit)
    sys.stdout.write(encode_pretty(CostOut.from_report(report)))
    return EXIT_FOUND if report.success else EXIT_NOT_FOUND


def cmd_bound(args: argparse.Namespace) -> int:
    """Print τ(p_conv) and the per-genome term, or the probability curve."""
    params = ConvergenceParams(p_conv=args.pconv, mu=args.mu, gamma=args.gamma, K=args.K, n=args.n)
    tau = convergence_iterations(params)
    sys.stdout.write(f"tau {tau}\n")
    sys.stdout.write(f"min_term {min_term(params.mu, params.gamma, params.K)!r}\n")
    if args.curve is not None:
        if args.curve < 0:
            raise ValueError(f"--curve must be non-negative, got {args.curve}")
        sys.stdout.write("iterations,probability\n")
        for t in range(args.curve + 1):
            p = convergence_probability(params.mu, params.gamma, params.K, params.n, t)
            sys.stdout.write(f"{t},{p!r}\n")
    return EXIT_FOUND


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a sweep plan and write the run table, the bins and optional traces."""
    plan_file = load_struct(args.plan, SweepPlanFile)
    base = plan_file.base
    system, grid = base.build_problem()
    plan = SweepPlan(
        problem=Problem(
            system=system,
            degree=base.degree,
            side_lengths=grid.region.side_lengths,
            points_per_axis=grid.points_per_axis,
            exclusion_radius=grid.exclusion_radius,
        ),
        ga=base.ga_configuration(plan_file.seeds[0], workers=args.workers),
        axes=tuple(Axis(a.name, tuple(a.values)) for a in plan_file.axes),
        seeds=tuple(plan_file.seeds),
        keep_traces=plan_file.write_traces,
    )
    configuration = SweepConfiguration(
        bin_width=plan_file.bin_width,
        bin_count=plan_file.bin_count,
        max_concurrency=plan_file.max_concurrency,
        violation_limit=base.violation_limit,
        workers=plan.ga.workers,
    )
    result = sweep(plan, configuration)

    out = Path(args.output_dir or plan_file.output_dir)
    write_csv(out / "sweep.csv", SWEEP_HEADER, (row.csv_row() for row in result.rows))
    write_csv(out / "bins.csv", BIN_HEADER, ((b.label, b.successes) for b in result.bins))
    if plan_file.write_traces:
        for row in result.rows:
            if row.trace is not None:
                write_csv(
                    out / "traces" / f"trace_cell{row.cell_id:03d}_seed{row.seed}.csv",
                    TRACE_HEADER,
                    row.trace.csv_rows(),
                )
    successes = sum(row.success for row in result.rows)
    sys.stdout.write(f"{successes}/{len(result.rows)} runs found a candidate; tables in {out}\n")
    return EXIT_FOUND


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with its four subcommands."""
    parser = argparse.ArgumentParser(
        prog="lyapga",
        description="Genetic synthesis and grid verification of polynomial Lyapunov candidates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Logging level (default: $LYAPGA_LOG_LEVEL or WARNING).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="Evolve a candidate for a search config.")
    p.add_argument("config", help="Path to the JSON search config.")
    p.add_argument("--report", default=None, help="Write the JSON report here instead of output.report.")
    p.add_argument("--trace", default=None, help="Write the per-generation CSV trace here instead of output.trace.")
    p.add_argument("--workers", type=int, default=None, help="Threads for cost evaluation (overrides the config).")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("verify", help="Score one candidate on a config's grid.")
    p.add_argument("config", help="Path to the JSON search config.")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--candidate", help="Polynomial text, e.g. '8*x1^2 + 8*x1*x2 + 9*x2^2'.")
    group.add_argument("--coeffs", help="Comma separated coefficients in basis order.")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("bound", help="Iterations needed to find an optimum with probability p_conv.")
    p.add_argument("--pconv", type=float, required=True, help="Target probability in (0, 1).")
    p.add_argument("--mu", type=float, required=True, help="Per-gene mutation probability.")
    p.add_argument("--gamma", type=int, required=True, help="Number of genes.")
    p.add_argument("--K", type=int, required=True, help="Alphabet size.")
    p.add_argument("--n", type=int, required=True, help="Population size.")
    p.add_argument("--curve", type=int, default=None, metavar="T", help="Also print the success probability for 0..T iterations.")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("sweep", help="Run a sweep plan.")
    p.add_argument("plan", help="Path to the JSON sweep plan.")
    p.add_argument("--output-dir", default=None, help="Directory for the CSV tables (overrides the plan).")
    p.add_argument("--workers", type=int, default=None, help="Threads for cost evaluation within each run.")
    p.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except DomainError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_DOMAIN
    except (msgspec.ValidationError, msgspec.DecodeError) as e:
        sys.stderr.write(f"error: invalid file: {e}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
