"""The `burgerquad` command line.

```
burgerquad solve --problem P --x LO:HI:N --t LO:HI:N [--out FILE.csv]
burgerquad residual --problem P (--claim EXPR | --from-solve) --x ... --t ...
burgerquad breaking-time --problem P [--s LO:HI]
burgerquad phi-table --problem P --u LO:HI:N [--out FILE.csv]
burgerquad examples [--list] [--id ID]
```

Exit status is 0 on success, 1 for usage and input errors, 2 when a
verification fails and 3 when a numerical method does not converge.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from typing import IO, Callable, Final, NoReturn

import numpy as np
from numpy.typing import NDArray

from burgerquad._errors import (
    BurgerQuadError,
    EmptyReportError,
    NonConvergenceError,
)
from burgerquad._interval import Interval, parse_sampling
from burgerquad.constants import CSV_FLOAT_FORMAT
from burgerquad.examples import EXAMPLES, REGISTRY, run_example
from burgerquad.problemfile import load
from burgerquad.solver import (
    NonhomogeneousSolver,
    Problem,
    breaking_time,
    solver_for,
    sweep,
)
from burgerquad.verify import closed_form_field, residual_field, solved_field

logger = logging.getLogger(__name__)

EXIT_OK: Final = 0
EXIT_USAGE: Final = 1
EXIT_VERIFICATION_FAILED: Final = 2
EXIT_NONCONVERGENCE: Final = 3

DEFAULT_RESIDUAL_TOL: Final = 1e-5


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class GridAxis:
    """`LO:HI:N`, N evenly spaced points from LO to HI inclusive."""

    window: Interval
    n: int

    @property
    def points(self) -> NDArray[np.float64]:
        return np.linspace(self.window.lo, self.window.hi, self.n)


def grid_axis_arg(text: str) -> GridAxis:
    try:
        window, n = parse_sampling(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return GridAxis(window, n)


def interval_arg(text: str) -> Interval:
    try:
        return Interval.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def positive_float_arg(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return value


def format_float(value: float) -> str:
    """Format a float for CSV output with 17 significant digits.

    >>> format_float(0.1), format_float(1.0), format_float(float("nan"))
    ('0.10000000000000001', '1', '')
    """
    if not np.isfinite(value):
        return ""
    return format(value, CSV_FLOAT_FORMAT)


@contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _solve(args: argparse.Namespace) -> int:
    problem: Problem = args.problem
    xs, ts = args.x.points, args.t.points
    rows = sweep(problem, xs, ts, threads=args.threads)
    width = max([1, *(len(found) for row in rows for found in row)])
    unconverged = 0
    with _output(args.out) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(
            ["x", "t", "branch_count", *(f"u_{k}" for k in range(width)), "converged"]
        )
        for j, t in enumerate(ts):
            for i, x in enumerate(xs):
                found = rows[j][i]
                values = [format_float(u) for u in found]
                values.extend("" for _ in range(width - len(values)))
                writer.writerow(
                    [
                        format_float(x),
                        format_float(t),
                        len(found),
                        *values,
                        int(found.converged),
                    ]
                )
                unconverged += not found.converged
    if unconverged:
        logger.error("%d grid point(s) have unconverged roots", unconverged)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _residual(args: argparse.Namespace) -> int:
    problem: Problem = args.problem
    xs, ts = args.x.points, args.t.points
    if args.claim is not None:
        fld = closed_form_field(
            args.claim, xs, ts, params=problem.params, stencil=args.stencil
        )
    else:
        if not 0 <= args.branch < args.branches:
            raise UsageError(
                f"--branch must be in [0, {args.branches - 1}]: {args.branch}"
            )
        fld = solved_field(
            problem,
            xs,
            ts,
            branch=args.branch,
            branches=args.branches,
            stencil=args.stencil,
            threads=args.threads,
        )
    report = residual_field(problem.f, problem.g, fld, args.tol, params=problem.params)
    print(f"max_abs_residual = {format_float(report.max_abs)}")
    print(f"mean_abs_residual = {format_float(report.mean_abs)}")
    print(f"nodes = {report.interior_nodes}")
    if not report.passed:
        x, t, r = report.worst
        where = f"x = {format_float(x)}, t = {format_float(t)}"
        print(f"worst = {format_float(r)} at {where}")
    print(report.verdict)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def _breaking_time(args: argparse.Namespace) -> int:
    t_star = breaking_time(args.problem, args.s)
    print("none" if t_star is None else format_float(t_star))
    return EXIT_OK


def _phi_table(args: argparse.Namespace) -> int:
    solver = solver_for(args.problem)
    if not isinstance(solver, NonhomogeneousSolver):
        raise UsageError("phi-table needs a nonhomogeneous problem (f must not be 0)")
    phi, ell = solver.phi, solver.ell
    with _output(args.out) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["u", "phi", "ell_phi"])
        for u in map(float, args.u.points):
            if phi.domain.contains(u):
                row = [
                    format_float(u),
                    format_float(phi(u)),
                    format_float(ell.ell_of_u(u)),
                ]
            else:
                row = [format_float(u), "", ""]
            writer.writerow(row)
    return EXIT_OK


def _examples(args: argparse.Namespace) -> int:
    if args.list:
        for example in EXAMPLES:
            print(f"{example.id}\t{example.expected}\t{example.provenance}")
        return EXIT_OK
    if args.id is not None:
        if args.id not in REGISTRY:
            raise UsageError(
                f"unknown example {args.id!r}; choose from {', '.join(REGISTRY)}"
            )
        selected = [REGISTRY[args.id]]
    else:
        selected = list(EXAMPLES)
    all_expected = True
    for example in selected:
        result = run_example(example)
        print(result.summary())
        all_expected &= result.as_expected
    return EXIT_OK if all_expected else EXIT_VERIFICATION_FAILED


def _add_problem(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--problem", required=True, metavar="FILE", help="Problem file to load."
    )


def _add_threads(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Worker threads for grid sweeps (default: $BURGERQUAD_THREADS or 1).",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="burgerquad",
        description="Exact quadrature-based solutions of u_t + g(u)*u_x = f(u).",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log more detail to stderr (-v for INFO, -vv for DEBUG).",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    solve = commands.add_parser("solve", help="Solve on an (x, t) grid, write CSV.")
    _add_problem(solve)
    solve.add_argument("--x", type=grid_axis_arg, required=True, metavar="LO:HI:N")
    solve.add_argument("--t", type=grid_axis_arg, required=True, metavar="LO:HI:N")
    solve.add_argument("--out", default=None, metavar="FILE", help="Default: stdout.")
    _add_threads(solve)
    solve.set_defaults(handler=_solve)

    residual = commands.add_parser(
        "residual", help="Check a claimed or solved field against the PDE."
    )
    _add_problem(residual)
    source = residual.add_mutually_exclusive_group(required=True)
    source.add_argument("--claim", metavar="EXPR", help="Closed form u(x, t).")
    source.add_argument(
        "--from-solve", action="store_true", help="Check the solver's own field."
    )
    residual.add_argument("--x", type=grid_axis_arg, required=True, metavar="LO:HI:N")
    residual.add_argument("--t", type=grid_axis_arg, required=True, metavar="LO:HI:N")
    residual.add_argument(
        "--tol", type=positive_float_arg, default=DEFAULT_RESIDUAL_TOL
    )
    residual.add_argument(
        "--stencil",
        type=positive_float_arg,
        default=None,
        metavar="DELTA",
        help="Finite-difference spacing (default: the grid spacing).",
    )
    residual.add_argument(
        "--branch", type=int, default=0, help="Branch to check with --from-solve."
    )
    residual.add_argument(
        "--branches",
        type=int,
        default=1,
        help="Branch count a node must have to be checked with --from-solve.",
    )
    _add_threads(residual)
    residual.set_defaults(handler=_residual)

    breaking = commands.add_parser(
        "breaking-time",
        help="Estimate when the solution of a homogeneous problem breaks.",
    )
    _add_problem(breaking)
    breaking.add_argument("--s", type=interval_arg, default=None, metavar="LO:HI")
    breaking.set_defaults(handler=_breaking_time)

    phi_table = commands.add_parser(
        "phi-table", help="Tabulate phi(u) and ell(phi(u))."
    )
    _add_problem(phi_table)
    phi_table.add_argument("--u", type=grid_axis_arg, required=True, metavar="LO:HI:N")
    phi_table.add_argument(
        "--out", default=None, metavar="FILE", help="Default: stdout."
    )
    phi_table.set_defaults(handler=_phi_table)

    examples = commands.add_parser("examples", help="Run the built-in examples.")
    examples.add_argument("--list", action="store_true", help="List examples only.")
    examples.add_argument("--id", default=None, help="Run a single example.")
    examples.set_defaults(handler=_examples)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("burgerquad").setLevel(level)


def run(argv: Sequence[str] | None = None) -> int:
    """Run the command line with `argv` and return the exit status."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    _configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        if hasattr(args, "problem"):
            args.problem = load(args.problem)
        return handler(args)
    except UsageError as e:
        print(f"burgerquad: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as e:
        print(f"burgerquad: did not converge: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except EmptyReportError as e:
        print(f"burgerquad: nothing to verify: {e}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    except (BurgerQuadError, OSError, ValueError) as e:
        print(f"burgerquad: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> NoReturn:
    sys.exit(run())
