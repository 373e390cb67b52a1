"""Residual checks of candidate solutions of `u_t + g(u)*u_x = f(u)`.

A `Field` holds u on a rectangular (x, t) grid, from a closed-form expression
or from the implicit solvers. `residual_field` measures the defect of the
equation with second-order central differences; `verify_canonical` does the
same for the transformed field `v = phi(u)` against `v_t + g(phi^-1(v))*v_x = 1`.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Union

import numpy as np

from burgerquad._errors import EmptyReportError, EvaluationDomainError
from burgerquad._interval import Interval
from burgerquad._pycompat import StrEnum
from burgerquad.constants import GRID_POINTS
from burgerquad.expr import (
    Expr,
    ExprLike,
    add,
    as_expr,
    compile_array,
    differentiate,
    mul,
    sub,
    substitute,
)
from burgerquad.quad import ComposedSpeed, PhiMap
from burgerquad.solver import Problem, configured_threads, solver_for

if TYPE_CHECKING:
    from numpy.typing import NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]
    BoolArray: TypeAlias = NDArray[np.bool_]

logger = logging.getLogger(__name__)

CanonicalSpeed: TypeAlias = Union[ComposedSpeed, Callable[[float], float]]


class Provenance(StrEnum):
    IMPLICIT_SOLVE = "implicit-solve"
    CLOSED_FORM = "closed-form-expression"


class Verdict(StrEnum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True, eq=False)
class Stencil:
    """u sampled at `(x ± delta, t)` and `(x, t ± delta)` around every node.

    Lets derivatives use a spacing finer than the grid's own. NaN marks a
    neighbour that could not be evaluated.
    """

    delta: float
    x_minus: FloatArray
    x_plus: FloatArray
    t_minus: FloatArray
    t_plus: FloatArray

    def map(self, fn: Callable[[FloatArray], FloatArray]) -> Stencil:
        return Stencil(
            self.delta,
            fn(self.x_minus),
            fn(self.x_plus),
            fn(self.t_minus),
            fn(self.t_plus),
        )


@dataclass(frozen=True, eq=False)
class Field:
    """u on the grid `x[i]`, `t[j]`, stored as `u[j, i]`.

    Nodes with `valid` False (unconverged or multivalued solves, evaluation
    failures) never enter residual statistics. Non-finite u is always invalid.
    """

    x: FloatArray
    t: FloatArray
    u: FloatArray
    valid: BoolArray
    provenance: Provenance
    stencil: Stencil | None = None

    def __post_init__(self) -> None:
        for name, axis in (("x", self.x), ("t", self.t)):
            if axis.ndim != 1 or not np.all(np.diff(axis) > 0):
                raise ValueError(f"Field {name} values must be strictly increasing")
        shape = (len(self.t), len(self.x))
        if self.u.shape != shape or self.valid.shape != shape:
            raise ValueError(
                f"Field u and valid must have shape (len(t), len(x)) = {shape}"
            )
        object.__setattr__(self, "valid", self.valid & np.isfinite(self.u))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.t), len(self.x)

    def map(self, fn: Callable[[FloatArray], FloatArray]) -> Field:
        """Apply `fn` to u at every node (and stencil neighbour)."""
        return Field(
            self.x,
            self.t,
            fn(self.u),
            self.valid.copy(),
            self.provenance,
            None if self.stencil is None else self.stencil.map(fn),
        )


def grid_axis(window: Interval, n: int = GRID_POINTS) -> FloatArray:
    return np.linspace(window.lo, window.hi, n)


def closed_form_field(
    candidate: ExprLike,
    x: Sequence[float] | FloatArray,
    t: Sequence[float] | FloatArray,
    *,
    params: Mapping[str, float] | None = None,
    stencil: float | None = None,
) -> Field:
    """Evaluate a candidate `u(x, t)` on a grid, optionally with a stencil.

    >>> fld = closed_form_field("x/(t + 1)", [0, 1, 2], [0, 1])
    >>> fld.u.tolist()
    [[0.0, 1.0, 2.0], [0.0, 0.5, 1.0]]
    """
    u_of = compile_array(as_expr(candidate), ["x", "t"], params)
    xs, ts = np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64)
    grid_t, grid_x = np.meshgrid(ts, xs, indexing="ij")
    u = u_of(grid_x, grid_t)
    neighbours = None
    if stencil is not None:
        neighbours = Stencil(
            stencil,
            u_of(grid_x - stencil, grid_t),
            u_of(grid_x + stencil, grid_t),
            u_of(grid_x, grid_t - stencil),
            u_of(grid_x, grid_t + stencil),
        )
    return Field(xs, ts, u, np.isfinite(u), Provenance.CLOSED_FORM, neighbours)


_NodeResult: TypeAlias = tuple[float, bool, tuple[float, ...]]


def solved_field(
    problem: Problem,
    x: Sequence[float] | FloatArray,
    t: Sequence[float] | FloatArray,
    *,
    branch: int = 0,
    branches: int = 1,
    stencil: float | None = None,
    threads: int | None = None,
) -> Field:
    """Solve the problem at every node and keep branch number `branch`.

    A node is valid when the solve finds exactly `branches` converged roots.
    With `stencil`, each valid node's neighbours at spacing `stencil` are
    solved locally starting from the node's root.
    """
    solver = solver_for(problem)
    xs, ts = np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64)
    nan4 = (np.nan, np.nan, np.nan, np.nan)

    def node(point: tuple[float, float]) -> _NodeResult:
        px, pt = point
        found = solver.solve(px, pt)
        if len(found) != branches or not found.converged:
            return np.nan, False, nan4
        u = found.values[branch]
        if stencil is None:
            return u, True, nan4
        near = [
            solver.solve_near(qx, qt, u)
            for qx, qt in (
                (px - stencil, pt),
                (px + stencil, pt),
                (px, pt - stencil),
                (px, pt + stencil),
            )
        ]
        return u, True, tuple(np.nan if v is None else v for v in near)

    points = [(float(px), float(pt)) for pt in ts for px in xs]
    workers = configured_threads(threads)
    if workers == 1:
        results = [node(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(node, points))

    shape = (len(ts), len(xs))
    u = np.array([r[0] for r in results]).reshape(shape)
    valid = np.array([r[1] for r in results]).reshape(shape)
    logger.info(
        "Solved %d nodes, %d valid (branch %d of %d)",
        valid.size,
        int(valid.sum()),
        branch,
        branches,
    )
    neighbours = None
    if stencil is not None:
        stacked = np.array([r[2] for r in results]).reshape((*shape, 4))
        neighbours = Stencil(
            stencil,
            stacked[..., 0],
            stacked[..., 1],
            stacked[..., 2],
            stacked[..., 3],
        )
    return Field(xs, ts, u, valid, Provenance.IMPLICIT_SOLVE, neighbours)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Residuals of a field at the nodes where derivatives were available.

    `residual` is NaN at every node left out of the statistics: boundary
    nodes, invalid nodes and (without a stencil) their neighbours.
    """

    x: FloatArray
    t: FloatArray
    residual: FloatArray
    max_abs: float
    mean_abs: float
    interior_nodes: int
    tol: float
    verdict: Verdict
    spacing: tuple[float, float]

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def worst(self) -> tuple[float, float, float]:
        """`(x, t, r)` at the node with the largest `|r|`."""
        flat = np.nanargmax(np.abs(self.residual))
        j, i = np.unravel_index(flat, self.residual.shape)
        return float(self.x[i]), float(self.t[j]), float(self.residual[j, i])

    def at(self, x: float, t: float) -> float:
        """The residual at the node nearest `(x, t)`; NaN if it was left out."""
        i = int(np.argmin(np.abs(self.x - x)))
        j = int(np.argmin(np.abs(self.t - t)))
        return float(self.residual[j, i])

    def summary(self) -> str:
        return (
            f"max |r| = {self.max_abs:.6g}, mean |r| = {self.mean_abs:.6g} "
            f"over {self.interior_nodes} nodes (tol {self.tol:g}): {self.verdict}"
        )


def _derivatives(
    fld: Field,
) -> tuple[FloatArray, FloatArray, BoolArray, tuple[float, float]]:
    """`(u_t, u_x, usable, (dx, dt))` by second-order central differences."""
    nt, nx = fld.shape
    u_t = np.full(fld.shape, np.nan)
    u_x = np.full(fld.shape, np.nan)
    if fld.stencil is not None:
        s = fld.stencil
        with np.errstate(all="ignore"):
            u_x = (s.x_plus - s.x_minus) / (2 * s.delta)
            u_t = (s.t_plus - s.t_minus) / (2 * s.delta)
        usable = fld.valid & np.isfinite(u_x) & np.isfinite(u_t)
        return u_t, u_x, usable, (s.delta, s.delta)

    if nt < 3 or nx < 3:
        raise ValueError(
            f"Need at least 3 nodes per axis without a stencil: {fld.shape}"
        )
    u, valid = fld.u, fld.valid
    dx = (fld.x[2:] - fld.x[:-2])[np.newaxis, :]
    dt = (fld.t[2:] - fld.t[:-2])[:, np.newaxis]
    with np.errstate(all="ignore"):
        u_x[1:-1, 1:-1] = ((u[:, 2:] - u[:, :-2]) / dx)[1:-1, :]
        u_t[1:-1, 1:-1] = ((u[2:, :] - u[:-2, :]) / dt)[:, 1:-1]
    usable = np.zeros(fld.shape, dtype=np.bool_)
    usable[1:-1, 1:-1] = (
        valid[1:-1, 1:-1]
        & valid[1:-1, 2:]
        & valid[1:-1, :-2]
        & valid[2:, 1:-1]
        & valid[:-2, 1:-1]
    )
    spacing = (float(np.mean(np.diff(fld.x))), float(np.mean(np.diff(fld.t))))
    return u_t, u_x, usable, spacing


def _report(
    fld: Field,
    residual: FloatArray,
    usable: BoolArray,
    tol: float,
    spacing: tuple[float, float],
) -> ResidualReport:
    usable = usable & np.isfinite(residual)
    count = int(usable.sum())
    if count == 0:
        raise EmptyReportError("No valid interior nodes to compute a residual at")
    residual = np.where(usable, residual, np.nan)
    magnitude = np.abs(residual[usable])
    max_abs = float(magnitude.max())
    report = ResidualReport(
        x=fld.x,
        t=fld.t,
        residual=residual,
        max_abs=max_abs,
        mean_abs=float(magnitude.mean()),
        interior_nodes=count,
        tol=tol,
        verdict=Verdict.PASS if max_abs <= tol else Verdict.FAIL,
        spacing=spacing,
    )
    logger.debug("Residual: %s", report.summary())
    return report


def residual_field(
    f: ExprLike,
    g: ExprLike,
    fld: Field,
    tol: float,
    *,
    params: Mapping[str, float] | None = None,
) -> ResidualReport:
    """The defect `u_t + g(u)*u_x - f(u)` of a field at its usable nodes.

    Derivatives are central differences on the grid (interior nodes whose
    four neighbours are valid) or, when the field carries a `Stencil`, on the
    stencil (every valid node). The verdict is PASS iff `max|r| <= tol`.

    Raises
    ------
    EmptyReportError
        If no node is usable.
    """
    u_t, u_x, usable, spacing = _derivatives(fld)
    f_of = compile_array(as_expr(f), ["u"], params)
    g_of = compile_array(as_expr(g), ["u"], params)
    with np.errstate(all="ignore"):
        residual = u_t + g_of(fld.u) * u_x - f_of(fld.u)
    return _report(fld, residual, usable, tol, spacing)


def verify_canonical(
    phi: PhiMap, speed: CanonicalSpeed, fld: Field, tol: float
) -> ResidualReport:
    """Check that `v = phi(u)` solves `v_t + speed(v)*v_x = 1`.

    `fld` is a u-field; phi is applied at every node (and stencil neighbour),
    nodes outside phi's domain become invalid. When `speed` is the
    `ComposedSpeed` of phi, `speed(phi(u))` is evaluated as `g(u)`.
    """
    v_field = fld.map(phi.tabulate)
    v_t, v_x, usable, spacing = _derivatives(v_field)
    speeds = np.full(fld.shape, np.nan)
    for (j, i), ok in np.ndenumerate(usable):
        if not ok:
            continue
        try:
            if isinstance(speed, ComposedSpeed) and speed.phi is phi:
                speeds[j, i] = speed.of_u(float(fld.u[j, i]))
            else:
                speeds[j, i] = speed(float(v_field.u[j, i]))
        except EvaluationDomainError:
            continue
    with np.errstate(all="ignore"):
        residual = v_t + speeds * v_x - 1.0
    return _report(v_field, residual, usable, tol, spacing)


def symbolic_residual(f: ExprLike, g: ExprLike, candidate: ExprLike) -> Expr:
    """The exact defect `u_t + g(u)*u_x - f(u)` of a closed-form `u(x, t)`.

    >>> from burgerquad.expr import evaluate
    >>> r = symbolic_residual("u", "2*u", "x*(1 + exp(-t))/2")
    >>> evaluate(r, dict(x=1, t=0))
    0.5
    """
    u = as_expr(candidate)
    u_t = differentiate(u, "t")
    u_x = differentiate(u, "x")
    return sub(
        add(u_t, mul(substitute(as_expr(g), "u", u), u_x)),
        substitute(as_expr(f), "u", u),
    )
