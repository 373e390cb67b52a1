from __future__ import annotations

import numpy as np
import pytest

from burgerquad._errors import EmptyReportError
from burgerquad._interval import Interval
from burgerquad.expr import evaluate
from burgerquad.solver import Problem, canonicalize
from burgerquad.verify import (
    Field,
    Provenance,
    Verdict,
    closed_form_field,
    grid_axis,
    residual_field,
    solved_field,
    symbolic_residual,
    verify_canonical,
)

CLAIM = "x*(1 + exp(-t))/2"
DERIVED = "x/(2 + exp(-t))"
UPPER = "(x - 3*t + sqrt(x^2 + 9*t^2 - 6*x*t - 36))/6"


def test_residual_field__travelling_wave_is_exact() -> None:
    fld = closed_form_field("x - t", grid_axis(Interval(0, 1), 11), [0, 0.5, 1])
    report = residual_field("0", "1", fld, 1e-9)

    assert report.passed
    assert report.max_abs <= 1e-12
    assert report.interior_nodes == 9
    assert np.isnan(report.residual[0]).all()


def test_residual_field__quadratic_claim_fails_by_one_half() -> None:
    xs = grid_axis(Interval(0.5, 1.5), 11)
    ts = grid_axis(Interval(-0.2, 0.2), 5)
    fld = closed_form_field(CLAIM, xs, ts, stencil=1e-4)
    report = residual_field("u", "2*u", fld, 1e-5)

    assert report.verdict is Verdict.FAIL
    assert report.at(1.0, 0.0) == pytest.approx(0.5, abs=1e-6)
    assert report.interior_nodes == 55
    *_, r = report.worst
    assert abs(r) == report.max_abs
    assert report.summary().endswith(": FAIL")


def test_residual_field__derived_quadratic_passes() -> None:
    xs = grid_axis(Interval(0.5, 1.5), 21)
    ts = grid_axis(Interval(0, 1), 21)
    report = residual_field(
        "u", "2*u", closed_form_field(DERIVED, xs, ts, stencil=1e-4), 1e-6
    )

    assert report.passed
    assert report.summary().startswith("max |r| = ")


def test_residual_field__second_order_convergence() -> None:
    def max_residual(n: int) -> float:
        xs = grid_axis(Interval(0.5, 1.5), n)
        ts = grid_axis(Interval(0, 1), n)
        fld = closed_form_field(DERIVED, xs, ts)
        return residual_field("u", "2*u", fld, 1.0).max_abs

    ratio = max_residual(11) / max_residual(21)

    assert 3.0 < ratio < 5.0


def test_residual_field__no_usable_nodes() -> None:
    fld = closed_form_field("sqrt(-1 - x)", [0, 1, 2], [0, 1, 2])

    assert not fld.valid.any()
    with pytest.raises(EmptyReportError):
        residual_field("0", "u", fld, 1e-6)


def test_residual_field__needs_three_nodes_per_axis_without_stencil() -> None:
    fld = closed_form_field("x", [0, 1, 2], [0, 1])

    with pytest.raises(ValueError, match="3 nodes"):
        residual_field("0", "u", fld, 1e-6)
    assert residual_field(
        "0", "0", closed_form_field("x", [0, 1, 2], [0, 1], stencil=1e-3), 1e-9
    ).passed


def test_field__rejects_unordered_axes() -> None:
    u = np.zeros((2, 2))
    with pytest.raises(ValueError, match="increasing"):
        Field(
            np.array([1.0, 0.0]),
            np.array([0.0, 1.0]),
            u,
            np.ones((2, 2), dtype=np.bool_),
            Provenance.CLOSED_FORM,
        )


def test_field__non_finite_nodes_are_invalid() -> None:
    fld = closed_form_field("1/x", [-1, 0, 1], [0])

    assert fld.valid.tolist() == [[True, False, True]]


def test_solved_field__homogeneous_matches_residual() -> None:
    problem = Problem.of("0", "u", "(a*s + b)/c", params=dict(a=1, b=0, c=1))
    fld = solved_field(problem, [0.0, 0.5, 1.0], [0.0, 0.5], stencil=1e-3, threads=2)

    assert fld.provenance is Provenance.IMPLICIT_SOLVE
    assert fld.u[1].tolist() == pytest.approx([0.0, 1 / 3, 2 / 3], abs=1e-10)
    assert residual_field("0", "u", fld, 1e-5).passed


def test_solved_field__branch_count_mismatch_is_invalid() -> None:
    problem = Problem.of("0", "u", "s")
    fld = solved_field(problem, [0.0, 1.0, 2.0], [0.0, 0.1, 0.2], branches=2)

    assert not fld.valid.any()
    with pytest.raises(EmptyReportError):
        residual_field("0", "u", fld, 1e-6)


def test_solved_field__picks_requested_branch(cubic_problem: Problem) -> None:
    lower = solved_field(cubic_problem, [13.0], [1.0], branch=0, branches=2)
    upper = solved_field(cubic_problem, [13.0], [1.0], branch=1, branches=2)

    assert lower.u[0, 0] == pytest.approx(1 / 3, abs=1e-8)
    assert upper.u[0, 0] == pytest.approx(3.0, abs=1e-8)


def test_verify_canonical__transformed_field_passes(cubic_problem: Problem) -> None:
    phi, speed = canonicalize(cubic_problem)
    fld = closed_form_field(
        UPPER,
        grid_axis(Interval(12, 14), 5),
        grid_axis(Interval(0.5, 1.5), 5),
        stencil=1e-4,
    )

    report = verify_canonical(phi, speed, fld, 1e-5)

    assert report.passed
    assert report.interior_nodes == 25


def test_verify_canonical__constant_field_has_residual_minus_one(
    cubic_problem: Problem,
) -> None:
    phi, _speed = canonicalize(cubic_problem)
    fld = closed_form_field("2", [0, 1, 2], [0, 1, 2])

    report = verify_canonical(phi, lambda v: 0.0, fld, 1e-5)

    assert report.verdict is Verdict.FAIL
    assert report.residual[1, 1] == pytest.approx(-1.0)
    assert report.max_abs == pytest.approx(1.0)


def test_symbolic_residual() -> None:
    claim = symbolic_residual("u", "2*u", CLAIM)
    derived = symbolic_residual("u", "2*u", DERIVED)

    assert evaluate(claim, dict(x=1, t=0)) == pytest.approx(0.5)
    for x, t in [(0.5, 0.0), (1.0, 0.3), (1.5, 1.0), (-2.0, 4.0)]:
        assert evaluate(derived, dict(x=x, t=t)) == pytest.approx(0.0, abs=1e-12)
    assert claim.free_names == frozenset({"x", "t"})
