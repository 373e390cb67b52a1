from __future__ import annotations

import csv
import io
from collections.abc import Callable
from pathlib import Path

import pytest
from pytest_insta import SnapshotFixture

from burgerquad import cli
from burgerquad._errors import NonConvergenceError
from burgerquad._interval import Interval
from burgerquad.cli import (
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
    run,
)
from burgerquad.rootfind import BranchSet, Root

AFFINE = """\
f = 0
g = u
h = (a*s + b)/c
param.a = 1
param.b = 0
param.c = 1
"""
BURGERS = 'f = "0"\ng = "u"\nh = "-tanh(s)"\n'
QUADRATIC = """\
f = u
g = 2*u
h = exp(-s)
u_domain = [0.05, 10]
u_ref = 1
ell_ref = 2
"""


@pytest.fixture
def problem_file(tmp_path: Path) -> Callable[[str], str]:
    def write(text: str) -> str:
        path = tmp_path / f"problem{len(list(tmp_path.iterdir()))}.txt"
        path.write_text(text)
        return str(path)

    return write


def read_csv(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


def test_solve__writes_csv(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    path = problem_file(AFFINE)
    status = run(["solve", "--problem", path, "--x", "0:1:3", "--t", "0:1:2"])

    assert status == EXIT_OK
    rows = read_csv(capsys.readouterr().out)
    assert rows[0] == ["x", "t", "branch_count", "u_0", "converged"]
    assert len(rows) == 1 + 6
    assert rows[1][:3] == ["0", "0", "1"]
    x, t, count, u, converged = rows[-1]
    assert (x, t, count, converged) == ("1", "1", "1", "1")
    assert float(u) == pytest.approx(0.5, abs=1e-10)


def test_solve__pads_rows_to_the_widest_branch_set(
    problem_file: Callable[[str], str], tmp_path: Path
) -> None:
    out = tmp_path / "field.csv"
    status = run(
        [
            "solve",
            "--problem",
            problem_file(BURGERS),
            "--x=-3:0:2",
            "--t",
            "1.5:1.5:1",
            "--out",
            str(out),
            "--threads",
            "2",
        ]
    )

    assert status == EXIT_OK
    header, far, centre = read_csv(out.read_text())
    assert header == ["x", "t", "branch_count", "u_0", "u_1", "u_2", "converged"]
    assert far[2] == "1"
    assert far[4:6] == ["", ""]
    assert centre[2] == "3"
    assert float(centre[4]) == pytest.approx(0.0, abs=1e-10)


def test_solve__unconverged_points_exit_3(
    problem_file: Callable[[str], str],
    monkeypatch: pytest.MonkeyPatch,
    capsys: pytest.CaptureFixture[str],
) -> None:
    stuck = BranchSet(
        roots=(Root(0.5, 1e-3, False),), interval=Interval(-1, 1), n_scan=8, tol=1e-10
    )
    monkeypatch.setattr(cli, "sweep", lambda p, xs, ts, threads: [[stuck]])

    path = problem_file(AFFINE)
    status = run(["solve", "--problem", path, "--x", "0:0:1", "--t", "0:0:1"])

    assert status == EXIT_NONCONVERGENCE
    assert read_csv(capsys.readouterr().out)[1] == ["0", "0", "1", "0.5", "0"]


def test_nonconvergence_error_exits_3(
    problem_file: Callable[[str], str], monkeypatch: pytest.MonkeyPatch
) -> None:
    def fail(*args: object, **kwargs: object) -> None:
        raise NonConvergenceError("Stuck", estimate=0.0, iterations=1)

    monkeypatch.setattr(cli, "sweep", fail)

    path = problem_file(AFFINE)
    status = run(["solve", "--problem", path, "--x", "0:1:2", "--t", "0:1:2"])

    assert status == EXIT_NONCONVERGENCE


def test_residual__claim_fails(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    status = run(
        [
            "residual",
            "--problem",
            problem_file(QUADRATIC),
            "--claim",
            "x*(1 + exp(-t))/2",
            "--x",
            "0.5:1.5:11",
            "--t=-0.2:0.2:5",
            "--stencil",
            "1e-4",
        ]
    )

    out = capsys.readouterr().out
    assert status == EXIT_VERIFICATION_FAILED
    lines = out.splitlines()
    assert lines[0].startswith("max_abs_residual = ")
    assert lines[2] == "nodes = 55"
    assert lines[3].startswith("worst = ")
    assert lines[-1] == "FAIL"


def test_residual__claim_passes(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    status = run(
        [
            "residual",
            "--problem",
            problem_file(QUADRATIC),
            "--claim",
            "x/(2 + exp(-t))",
            "--x",
            "0.5:1.5:11",
            "--t",
            "0:1:11",
            "--stencil",
            "1e-4",
        ]
    )

    out = capsys.readouterr().out
    assert status == EXIT_OK
    assert "worst" not in out
    assert out.splitlines()[-1] == "PASS"


def test_residual__from_solve(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    status = run(
        [
            "residual",
            "--problem",
            problem_file(AFFINE),
            "--from-solve",
            "--x",
            "0:1:5",
            "--t",
            "0:1:5",
            "--stencil",
            "1e-3",
        ]
    )

    assert status == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "PASS"


@pytest.mark.parametrize(
    "extra",
    [
        ["--from-solve", "--branch", "1"],
        ["--from-solve", "--claim", "x"],
        [],
        ["--claim", "x", "--tol", "0"],
    ],
)
def test_residual__usage_errors(
    problem_file: Callable[[str], str],
    capsys: pytest.CaptureFixture[str],
    extra: list[str],
) -> None:
    path = problem_file(AFFINE)
    args = ["residual", "--problem", path, "--x", "0:1:3", "--t", "0:1:3"]

    assert run([*args, *extra]) == EXIT_USAGE
    assert capsys.readouterr().err


def test_breaking_time(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    assert run(["breaking-time", "--problem", problem_file(BURGERS)]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(1.0, abs=1e-5)

    expanding = problem_file('f = "0"\ng = "u"\nh = "s"\n')
    assert run(["breaking-time", "--problem", expanding, "--s=-1:1"]) == EXIT_OK
    assert capsys.readouterr().out == "none\n"


def test_phi_table(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    status = run(["phi-table", "--problem", problem_file(QUADRATIC), "--u", "0:2:5"])

    assert status == EXIT_OK
    header, *rows = read_csv(capsys.readouterr().out)
    assert header == ["u", "phi", "ell_phi"]
    assert rows[0] == ["0", "", ""]
    u, phi, ell_phi = rows[2]
    assert u == "1"
    assert float(phi) == pytest.approx(0.0, abs=1e-12)
    assert float(ell_phi) == pytest.approx(2.0, abs=1e-9)
    # ell(phi(u)) = 2u
    assert float(rows[4][2]) == pytest.approx(4.0, rel=1e-9)


def test_phi_table__needs_nonhomogeneous_problem(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    path = problem_file(AFFINE)

    assert run(["phi-table", "--problem", path, "--u", "0:1:3"]) == EXIT_USAGE
    assert "nonhomogeneous" in capsys.readouterr().err


def test_examples_list(
    snapshot: SnapshotFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    assert run(["examples", "--list"]) == EXIT_OK
    assert snapshot() == capsys.readouterr().out


def test_examples_single_id(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["examples", "--id", "ex3.5-quadratic-claim"]) == EXIT_OK
    assert capsys.readouterr().out.startswith(
        "ex3.5-quadratic-claim: KNOWN-DISCREPANCY CONFIRMED ("
    )


def test_examples_unknown_id(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["examples", "--id", "ex9.9"]) == EXIT_USAGE
    assert "ex3.4" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve"],
        ["solve", "--problem", "p", "--x", "0:1", "--t", "0:1:2"],
        ["breaking-time", "--problem", "p", "--s", "1:0"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("burgerquad")


def test_missing_problem_file(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    missing = str(tmp_path / "absent.txt")

    assert run(["breaking-time", "--problem", missing]) == EXIT_USAGE
    assert "absent.txt" in capsys.readouterr().err


def test_malformed_problem_file(
    problem_file: Callable[[str], str], capsys: pytest.CaptureFixture[str]
) -> None:
    path = problem_file('f = "0"\ng = "u +"\nh = "s"\n')

    assert run(["breaking-time", "--problem", path]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_help_exits_0(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["--help"]) == EXIT_OK
    assert "phi-table" in capsys.readouterr().out
