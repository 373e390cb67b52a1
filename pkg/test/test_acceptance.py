"""End-to-end checks of the solvers against closed forms and each other."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burgerquad._interval import Interval
from burgerquad.examples import REGISTRY, Outcome, run_example
from burgerquad.expr import compile_array
from burgerquad.solver import (
    Problem,
    breaking_time,
    canonicalize,
    characteristic_trace,
    solve,
    solve_homogeneous,
    solve_nonhomogeneous,
    solve_via_canonical,
)
from burgerquad.special import lambert_w_array
from burgerquad.verify import (
    ResidualReport,
    closed_form_field,
    grid_axis,
    residual_field,
    solved_field,
    verify_canonical,
)
from test.strategies import characteristics, reals

UNIT = Interval(0.0, 1.0)


def _rational_field(n: int, stencil: float) -> None:
    problem = REGISTRY["ex2.2-rational"].problem
    xs, ts = grid_axis(UNIT, n), grid_axis(UNIT, n)
    fld = solved_field(problem, xs, ts, stencil=stencil)
    grid_t, grid_x = np.meshgrid(ts, xs, indexing="ij")

    assert fld.valid.all()
    np.testing.assert_allclose(fld.u, grid_x / (grid_t + 1), rtol=0, atol=1e-8)
    report = residual_field(problem.f, problem.g, fld, 1e-5, params=problem.params)
    assert report.passed, report.summary()
    assert report.interior_nodes == n * n


def test_rational_profile__solver_field_matches_closed_form() -> None:
    _rational_field(41, 1e-3)


@pytest.mark.integration
def test_rational_profile__solver_field_matches_closed_form_full_grid() -> None:
    _rational_field(201, 1e-3)


def test_sqrt_profile__closed_form_is_a_solver_branch() -> None:
    example = REGISTRY["ex2.2-sqrt"]
    assert run_example(example).outcome is Outcome.PASS

    exact = compile_array(example.reference, ["x", "t"], example.problem.params)
    for x in np.linspace(0, 1, 6):
        for t in np.linspace(0, 1, 6):
            found = solve_homogeneous(example.problem, x, t)
            u = float(exact(x, t))
            assert min(abs(v - u) for v in found) <= 1e-7


def test_lambertw_profile__closed_form_and_identity() -> None:
    example = REGISTRY["ex2.2-lambertw"]
    assert run_example(example).outcome is Outcome.PASS

    xs = grid_axis(example.x_window, 201)
    grid_t, grid_x = np.meshgrid(grid_axis(example.t_window, 201), xs, indexing="ij")
    z = -grid_t * np.exp(-grid_x)
    w = lambert_w_array(z)

    assert np.isfinite(w).all()
    assert (np.abs(w * np.exp(w) - z) <= 1e-12 * np.maximum(1.0, np.abs(z))).all()


def test_exponential_source__solver_matches_lambertw_closed_form() -> None:
    example = REGISTRY["ex3.4"]
    assert run_example(example).outcome is Outcome.PASS

    exact = compile_array(example.reference, ["x", "t"])
    for t in np.linspace(0, 0.5, 6):
        for x in t + np.linspace(0.1, 3, 30):
            found = solve_nonhomogeneous(example.problem, x, t)
            u = float(exact(x, t))
            assert min(abs(v - u) for v in found) <= 1e-7


def test_exponential_source__intermediate_relation_does_not_reproduce() -> None:
    result = run_example(REGISTRY["ex3.4-intermediate"])

    assert result.outcome is Outcome.DISCREPANCY_CONFIRMED
    assert not result.report.passed


def test_cubic_flux__branches_and_their_fields(cubic_problem: Problem) -> None:
    assert solve_nonhomogeneous(cubic_problem, 13.0, 1.0).values == pytest.approx(
        [1 / 3, 3.0], abs=1e-8
    )
    xs = grid_axis(Interval(12.8, 13.2), 5)
    ts = grid_axis(Interval(0.9, 1.1), 5)
    for branch in (0, 1):
        fld = solved_field(
            cubic_problem, xs, ts, branch=branch, branches=2, stencil=1e-3
        )
        assert fld.valid.all()
        report = residual_field(cubic_problem.f, cubic_problem.g, fld, 1e-5)
        assert report.passed, report.summary()

    assert run_example(REGISTRY["ex3.5-cubic-upper"]).outcome is Outcome.PASS
    assert run_example(REGISTRY["ex3.5-cubic-lower"]).outcome is Outcome.PASS


def test_quadratic_flux__claimed_solution_fails_under_refinement() -> None:
    example = REGISTRY["ex3.5-quadratic-claim"]
    problem = example.problem
    x_window, t_window = Interval(0.5, 1.5), Interval(-0.2, 0.2)

    def report(n: int, stencil: float | None = None) -> ResidualReport:
        fld = closed_form_field(
            example.reference,
            grid_axis(x_window, n),
            grid_axis(t_window, n),
            stencil=stencil,
        )
        return residual_field(problem.f, problem.g, fld, 1e-5)

    assert report(11, stencil=1e-4).at(1.0, 0.0) == pytest.approx(0.5, abs=1e-6)
    coarse, fine = report(11), report(41)
    assert not coarse.passed
    assert not fine.passed
    assert fine.at(1.0, 0.0) == pytest.approx(0.5, abs=1e-3)
    assert fine.max_abs >= coarse.max_abs


def test_quadratic_flux__derived_solution_matches_solver() -> None:
    example = REGISTRY["ex3.5-quadratic-derived"]
    result = run_example(example)
    assert result.outcome is Outcome.PASS

    for x in (0.5, 1.0, 1.5):
        for t in (0.0, 0.5, 1.0):
            found = solve_nonhomogeneous(example.problem, x, t)
            assert found.values == pytest.approx([x / (2 + math.exp(-t))], abs=1e-7)


@pytest.mark.parametrize(
    "example_id", ["ex3.4", "ex3.5-cubic-upper"], ids=["exp-source", "square-source"]
)
def test_transformed_field_solves_unit_source_equation(example_id: str) -> None:
    example = REGISTRY[example_id]
    phi, speed = canonicalize(example.problem)
    fld = closed_form_field(
        example.reference,
        grid_axis(example.x_window, 201),
        grid_axis(example.t_window, 201),
    )

    report = verify_canonical(phi, speed, fld, 1e-4)

    assert report.passed, report.summary()
    assert report.interior_nodes == 199 * 199


COMPOSITION_CASES = [
    (
        Problem.of("u", "2*u", "exp(-s)", u_domain=Interval(0.05, 10), u_ref=1.0),
        (0.5, 3.0),
        (0.0, 1.0),
    ),
    (
        Problem.of("2 + sin(u)", "1 + u^2", "-s", u_domain=Interval(-4, 4)),
        (-0.5, 0.5),
        (0.0, 0.5),
    ),
]


@pytest.mark.parametrize("case", COMPOSITION_CASES, ids=["linear-source", "sin-source"])
@settings(max_examples=100)
@given(data=st.data())
def test_direct_and_canonical_solves_agree(
    case: tuple[Problem, tuple[float, float], tuple[float, float]], data: st.DataObject
) -> None:
    problem, x_window, t_window = case
    x = data.draw(reals(*x_window), label="x")
    t = data.draw(reals(*t_window), label="t")

    direct = solve_nonhomogeneous(problem, x, t)
    via = solve_via_canonical(problem, x, t)

    assert len(direct) == len(via) == 1
    assert via.values == pytest.approx(direct.values, abs=1e-7)


@settings(max_examples=20)
@given(characteristics())
def test_implicit_solve_follows_characteristics(
    case: tuple[Problem, float, float],
) -> None:
    problem, x0, t_end = case
    (u0,) = solve(problem, x0, 0.0).values
    path = characteristic_trace(problem, x0, u0, t_end, 0.01)

    assert not path.truncated
    for t, x, u in list(zip(path.t, path.x, path.u))[::10]:
        found = solve(problem, float(x), float(t)).values
        assert min(abs(v - u) for v in found) <= 1e-6


def test_burgers_breaks_at_one_and_grows_branches(burgers_problem: Problem) -> None:
    t_break = breaking_time(burgers_problem)

    assert t_break == pytest.approx(1.0, abs=1e-3)
    assert len(solve_homogeneous(burgers_problem, 0.0, 0.9)) == 1
    assert len(solve_homogeneous(burgers_problem, 0.0, 1.1)) == 3


@settings(max_examples=100)
@given(a=reals(0.5, 2.0), b=reals(0.0, 1.0), c=reals(1.0, 2.0))
def test_residual_is_second_order_in_grid_spacing(a: float, b: float, c: float) -> None:
    def residual_at_centre(n: int) -> float:
        fld = closed_form_field(
            "(a*x + b)/(a*t + c)",
            grid_axis(UNIT, n),
            grid_axis(UNIT, n),
            params=dict(a=a, b=b, c=c),
        )
        return residual_field("0", "u", fld, 1.0).at(0.5, 0.5)

    ratio = residual_at_centre(11) / residual_at_centre(21)

    assert 3.5 <= ratio <= 4.5
