from __future__ import annotations

from pathlib import Path

import pytest

from burgerquad import problemfile
from burgerquad._errors import ProblemFileError
from burgerquad._interval import Interval
from burgerquad.examples import EXAMPLES, Example
from burgerquad.expr import parse
from burgerquad.solver import Problem

CUBIC_FILE = """\
# u_t + (u^3)_x = u^2
f = "u^2"
g = '3*u^2'
h = 3*s

u_domain = [0.05, 20]
u_ref = 1
phi_ref = -1
v_ref = -1
ell_ref = 3
n_scan = 512
tol = 1e-12
"""


def test_loads() -> None:
    problem = problemfile.loads(CUBIC_FILE)

    assert problem == Problem.of(
        "u^2",
        "3*u^2",
        "3*s",
        u_domain=Interval(0.05, 20),
        u_ref=1.0,
        phi_at_ref=-1.0,
        v_ref=-1.0,
        ell_at_ref=3.0,
        n_scan=512,
        tol=1e-12,
    )


def test_loads__params_and_range_syntax() -> None:
    problem = problemfile.loads(
        'f = "0"\ng = "u"\nh = "sqrt(a*s + b) + c"\n'
        "param.a = 1\nparam.b = 1\nparam.c = 0\ns_domain = -1:3\n"
    )

    assert dict(problem.params) == {"a": 1.0, "b": 1.0, "c": 0.0}
    assert problem.s_domain == Interval(-1, 3)
    assert problem.h == parse("sqrt(a*s + b) + c")


@pytest.mark.parametrize(
    "text, line_number, message",
    [
        ('f = "0"\ng = "u"\nh = "s"\nf = "1"\n', 4, "more than once"),
        ('f = "0"\ng\nh = "s"\n', 2, "key = value"),
        ('f = "0"\ng = "u"\nh =\n', 3, "no value"),
        ('f = "0"\n# g\ng = "u*"\nh = "s"\n', 3, "not a valid expression"),
        ('f = "0"\ng = "u"\nh = "s"\nwidth = 3\n', 4, "unknown key"),
        ('f = "0"\ng = "u"\nh = "s"\nparam.a = one\n', 4, "real number"),
        ('f = "0"\ng = "u"\nh = "s"\nu_domain = [2, 1]\n', 4, "u_domain"),
        ('f = "0"\ng = "u"\nh = "s"\nn_scan = 1.5\n', 4, "n_scan"),
        ('f = "0"\ng = "k*u"\nh = "s"\n', 2, "'k'"),
        ('f = "0"\ng = "u"\n\nh = "u"\n', 4, "'u'"),
        ('f = "0"\ng = "u"\n', 0, "missing required key(s): h"),
        ('f = "0"\ng = "u"\nh = "s"\nn_scan = 1\n', 0, "n_scan"),
    ],
)
def test_loads__errors_name_the_line(text: str, line_number: int, message: str) -> None:
    with pytest.raises(ProblemFileError) as exc_info:
        problemfile.loads(text)
    assert exc_info.value.line_number == line_number
    assert message in str(exc_info.value)
    if line_number:
        assert str(exc_info.value).startswith(f"line {line_number}: ")
        assert exc_info.value.line == text.splitlines()[line_number - 1]


def test_dumps__writes_only_non_default_settings() -> None:
    problem = Problem.of(
        "u", "2*u", "exp(-s)", params=dict(a=0.5), u_ref=1.0, ell_at_ref=2.0
    )

    assert problemfile.dumps(problem) == (
        'f = "u"\ng = "2*u"\nh = "exp(-s)"\nparam.a = 0.5\nu_ref = 1\nell_ref = 2\n'
    )


@pytest.mark.parametrize("example", EXAMPLES, ids=lambda e: e.id)
def test_registry_problems_survive_dump_and_load(example: Example) -> None:
    assert problemfile.loads(problemfile.dumps(example.problem)) == example.problem


def test_dump_and_load_files(tmp_path: Path) -> None:
    problem = problemfile.loads(CUBIC_FILE)
    path = tmp_path / "cubic.problem"

    problemfile.dump(problem, path)

    assert problemfile.load(path) == problem
    assert problemfile.load(str(path)) == problem
    assert b"\r\n" not in path.read_bytes()
