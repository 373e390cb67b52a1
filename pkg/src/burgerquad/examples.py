"""Built-in worked examples with their closed-form solutions.

Each entry pairs a `Problem` with a closed-form `u(x, t)` and says whether the
closed form is expected to solve the equation (`pass`) or is a published
formula known not to (`known-discrepancy`). Running an entry checks the
closed form with the residual oracle and compares it with the implicit
solver.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Final

import numpy as np

from burgerquad._interval import Interval
from burgerquad._pycompat import StrEnum
from burgerquad.expr import Expr, compile_scalar, parse
from burgerquad.solver import Problem, solver_for
from burgerquad.verify import (
    ResidualReport,
    closed_form_field,
    grid_axis,
    residual_field,
)

logger = logging.getLogger(__name__)


class Expectation(StrEnum):
    PASS = "pass"
    KNOWN_DISCREPANCY = "known-discrepancy"


class Outcome(StrEnum):
    PASS = "PASS"
    FAIL = "FAIL"
    DISCREPANCY_CONFIRMED = "KNOWN-DISCREPANCY CONFIRMED"
    DISCREPANCY_NOT_REPRODUCED = "KNOWN-DISCREPANCY NOT REPRODUCED"


@dataclass(frozen=True)
class Example:
    """A registry entry: a problem, a closed form and the expected verdict."""

    id: str
    problem: Problem
    reference: Expr
    expected: Expectation
    provenance: str
    x_window: Interval
    t_window: Interval
    tol: float = 1e-5
    stencil: float | None = 1e-4
    grid_points: int = 41
    agreement_tol: float = 1e-7


@dataclass(frozen=True, eq=False)
class ExampleResult:
    example: Example
    report: ResidualReport
    agreement: float
    """Largest distance from the closed form to the nearest solver branch."""

    @property
    def outcome(self) -> Outcome:
        if self.example.expected is Expectation.KNOWN_DISCREPANCY:
            if self.report.passed:
                return Outcome.DISCREPANCY_NOT_REPRODUCED
            return Outcome.DISCREPANCY_CONFIRMED
        if self.report.passed and self.agreement <= self.example.agreement_tol:
            return Outcome.PASS
        return Outcome.FAIL

    @property
    def as_expected(self) -> bool:
        return self.outcome in (Outcome.PASS, Outcome.DISCREPANCY_CONFIRMED)

    def summary(self) -> str:
        return (
            f"{self.example.id}: {self.outcome} ({self.report.summary()}; "
            f"solver agreement {self.agreement:.3g})"
        )


def _solver_agreement(example: Example, samples: int = 3) -> float:
    """Max over a coarse subgrid of |closed form - nearest solver branch|."""
    problem = example.problem
    reference = compile_scalar(example.reference, ["x", "t"], problem.params)
    solver = solver_for(problem)
    worst = 0.0
    for t in np.linspace(example.t_window.lo, example.t_window.hi, samples):
        for x in np.linspace(example.x_window.lo, example.x_window.hi, samples):
            expected = reference(float(x), float(t))
            found = solver.solve(float(x), float(t))
            gap = min((abs(u - expected) for u in found), default=math.inf)
            worst = max(worst, gap)
    return worst


def run_example(example: Example) -> ExampleResult:
    """Check an entry's closed form by residual and against the solver."""
    problem = example.problem
    xs = grid_axis(example.x_window, example.grid_points)
    ts = grid_axis(example.t_window, example.grid_points)
    fld = closed_form_field(
        example.reference, xs, ts, params=problem.params, stencil=example.stencil
    )
    report = residual_field(
        problem.f, problem.g, fld, example.tol, params=problem.params
    )
    result = ExampleResult(example, report, _solver_agreement(example))
    logger.info("%s", result.summary())
    return result


def _example(
    id: str,
    f: str,
    g: str,
    h: str,
    reference: str,
    expected: Expectation,
    provenance: str,
    x_window: tuple[float, float],
    t_window: tuple[float, float],
    *,
    params: Mapping[str, float] | None = None,
    **options: object,
) -> Example:
    problem_options = {
        k: v
        for k, v in options.items()
        if k in ("u_domain", "u_ref", "phi_at_ref", "v_ref", "ell_at_ref")
    }
    example_options = {k: v for k, v in options.items() if k not in problem_options}
    return Example(
        id=id,
        problem=Problem.of(f, g, h, params=params, **problem_options),
        reference=parse(reference),
        expected=expected,
        provenance=provenance,
        x_window=Interval(*x_window),
        t_window=Interval(*t_window),
        **example_options,  # type: ignore[arg-type]
    )


_CUBIC = dict(
    u_domain=Interval(0.05, 20.0),
    u_ref=1.0,
    phi_at_ref=-1.0,
    v_ref=-1.0,
    ell_at_ref=3.0,
)
_QUADRATIC = dict(
    u_domain=Interval(0.05, 10.0),
    u_ref=1.0,
    phi_at_ref=0.0,
    v_ref=0.0,
    ell_at_ref=2.0,
)
_EXPONENTIAL = dict(
    u_domain=Interval(-5.0, 5.0),
    u_ref=0.0,
    phi_at_ref=-1.0,
    v_ref=-1.0,
    ell_at_ref=-1.0,
)

EXAMPLES: Final[tuple[Example, ...]] = (
    _example(
        "ex2.2-rational",
        "0",
        "u",
        "(a*s + b)/c",
        "(a*x + b)/(a*t + c)",
        Expectation.PASS,
        "Example 2.2, inviscid Burgers u_t + u*u_x = 0 with the affine "
        "profile h(s) = (a*s + b)/c",
        (0.0, 1.0),
        (0.0, 1.0),
        params=dict(a=1.0, b=0.0, c=1.0),
        tol=1e-6,
    ),
    _example(
        "ex2.2-sqrt",
        "0",
        "u",
        "sqrt(a*s + b) + c",
        "c - (a*t - sqrt(a^2*t^2 + 4*a*x - 4*a*c*t + 4*b))/2",
        Expectation.PASS,
        "Example 2.2, inviscid Burgers with the square-root profile "
        "h(s) = sqrt(a*s + b) + c",
        (0.0, 1.0),
        (0.0, 1.0),
        params=dict(a=1.0, b=1.0, c=0.0),
        u_domain=Interval(-10.0, 10.0),
    ),
    _example(
        "ex2.2-lambertw",
        "0",
        "u",
        "exp(a - s)",
        "-(1/t)*lambertw0(-t*exp(a - x))",
        Expectation.PASS,
        "Example 2.2, inviscid Burgers with the exponential profile "
        "h(s) = exp(a - s); the solution uses the principal Lambert W branch",
        (1.0, 3.0),
        (0.1, 0.9),
        params=dict(a=0.0),
        u_domain=Interval(-10.0, 10.0),
    ),
    _example(
        "ex3.4",
        "exp(u)",
        "u",
        "s",
        "-lambertw0(x - t)",
        Expectation.PASS,
        "Example 3.4, u_t + u*u_x = exp(u) with h(s) = s, phi = -exp(-u) and "
        "ell(v) = v*(1 - ln(-v))",
        (1.0, 3.0),
        (0.0, 0.5),
        **_EXPONENTIAL,
    ),
    _example(
        "ex3.4-intermediate",
        "exp(u)",
        "u",
        "s",
        "-2 - lambertw0(-(x - t)*exp(-2))",
        Expectation.KNOWN_DISCREPANCY,
        "Example 3.4, intermediate relation "
        "x = (u + 1)*exp(-u) + h(t + exp(-u)) solved for u with h(s) = s; "
        "its ell term has the opposite sign to the one the construction gives",
        (1.0, 2.0),
        (0.0, 0.5),
        **_EXPONENTIAL,
    ),
    _example(
        "ex3.5-cubic-upper",
        "u^2",
        "3*u^2",
        "3*s",
        "(x - 3*t + sqrt(x^2 + 9*t^2 - 6*x*t - 36))/6",
        Expectation.PASS,
        "Example 3.5, u_t + (u^3)_x = u^2 with h(s) = 3*s, upper branch",
        (12.0, 14.0),
        (0.5, 1.5),
        **_CUBIC,
    ),
    _example(
        "ex3.5-cubic-lower",
        "u^2",
        "3*u^2",
        "3*s",
        "(x - 3*t - sqrt(x^2 + 9*t^2 - 6*x*t - 36))/6",
        Expectation.PASS,
        "Example 3.5, u_t + (u^3)_x = u^2 with h(s) = 3*s, lower branch",
        (12.0, 14.0),
        (0.5, 1.5),
        **_CUBIC,
    ),
    _example(
        "ex3.5-quadratic-claim",
        "u",
        "2*u",
        "exp(-s)",
        "x*(1 + exp(-t))/2",
        Expectation.KNOWN_DISCREPANCY,
        "Example 3.5, u_t + (u^2)_x = u: the formula x*(1 + exp(-t))/2 "
        "leaves a residual of 1/2 at (x, t) = (1, 0)",
        (0.5, 1.5),
        (-0.2, 0.2),
        **_QUADRATIC,
    ),
    _example(
        "ex3.5-quadratic-derived",
        "u",
        "2*u",
        "exp(-s)",
        "x/(2 + exp(-t))",
        Expectation.PASS,
        "Example 3.5, u_t + (u^2)_x = u with h(s) = exp(-s), solved with "
        "phi = ln(u) and ell(v) = 2*exp(v)",
        (0.5, 1.5),
        (0.0, 1.0),
        **_QUADRATIC,
    ),
)

REGISTRY: Final[Mapping[str, Example]] = {e.id: e for e in EXAMPLES}
