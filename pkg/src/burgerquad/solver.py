"""Implicit solutions of `u_t + g(u)*u_x = f(u)` and their independent checks.

- Homogeneous (f ≡ 0): `u = h(x - t*g(u))`.
- Canonical (f ≡ 1): `x = ∫ g(u) du + h(t - u)`.
- Nonhomogeneous (f nowhere zero): `x = (ell∘phi)(u) + h(t - phi(u))` with
  `phi = ∫ du/f` and `ell = ∫ g∘phi^-1` from `burgerquad.quad`.

Every solve returns a `BranchSet` with all roots the scan finds, so points past
the breaking time report each branch of the multivalued solution.
"""

from __future__ import annotations

import functools
import logging
import math
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Optional, Union

import numpy as np
from frozendict import frozendict

from burgerquad._errors import (
    DifferentiationError,
    EvaluationDomainError,
    InvalidBracketError,
    NonConvergenceError,
    RangeError,
    SignChangeError,
    UnboundNameError,
)
from burgerquad._interval import Interval
from burgerquad.constants import (
    BREAKING_SAMPLES,
    N_SCAN,
    NONHOMOGENEOUS_DOMAIN,
    QUAD_TOL,
    ROOT_TOL,
    S_INTERVAL,
    SCAN_INTERVAL,
    SIGN_SAMPLES,
    THREADS_ENV_VAR,
)
from burgerquad.expr import (
    Expr,
    ExprLike,
    as_expr,
    compile_array,
    compile_scalar,
    differentiate,
    is_zero,
    substitute,
)
from burgerquad.quad import (
    ComposedSpeed,
    PhiMap,
    RunningIntegral,
    build_ell,
    build_phi_map,
    phi_inverse,
)
from burgerquad.rootfind import BranchSet, Root, find_all_roots, find_root

if TYPE_CHECKING:
    from numpy.typing import NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]

logger = logging.getLogger(__name__)

Speed: TypeAlias = Union[Expr, Callable[[float], float]]
_EPS = float(np.finfo(np.float64).eps)


def _check_names(
    e: Expr, role: str, variable: str, params: Mapping[str, float]
) -> None:
    unbound = sorted(e.free_names - {variable} - params.keys())
    if unbound:
        raise UnboundNameError(
            f"{role} = {e} may only use {variable!r} and declared parameters",
            name=unbound[0],
        )


@dataclass(frozen=True)
class Problem:
    """One equation `u_t + g(u)*u_x = f(u)` with a profile `h(s)`.

    f and g are expressions in `u`, h is an expression in `s`; any other name
    must be a key of `params`. `u_domain` is where roots are looked for (and,
    for nonhomogeneous problems, where phi is built); `s_domain` is where the
    profile is sampled for the breaking time. The reference fields fix the
    additive constants of phi and ell (see `burgerquad.quad`).
    """

    f: Expr
    g: Expr
    h: Expr
    u_domain: Interval | None = None
    s_domain: Interval | None = None
    params: Mapping[str, float] = field(default_factory=frozendict)
    tol: float = ROOT_TOL
    quad_tol: float = QUAD_TOL
    n_scan: int = N_SCAN
    u_ref: float | None = None
    phi_at_ref: float = 0.0
    v_ref: float | None = None
    ell_at_ref: float = 0.0

    def __post_init__(self) -> None:
        params = frozendict({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", params)
        _check_names(self.f, "f", "u", self.params)
        _check_names(self.g, "g", "u", self.params)
        _check_names(self.h, "h", "s", self.params)
        if self.n_scan < 2:
            raise ValueError(f"n_scan must be >= 2: {self.n_scan}")

    @classmethod
    def of(
        cls,
        f: ExprLike,
        g: ExprLike,
        h: ExprLike,
        *,
        params: Mapping[str, float] | None = None,
        **options: object,
    ) -> Problem:
        """Build a Problem, parsing any of f, g, h given as text.

        >>> p = Problem.of("0", "u", "(a*s + b)/c", params=dict(a=1, b=0, c=1))
        >>> p.homogeneous, str(p.h)
        (True, '(a*s + b)/c')
        """
        return cls(
            as_expr(f),
            as_expr(g),
            as_expr(h),
            params=frozendict(params or {}),
            **options,  # type: ignore[arg-type]
        )

    @property
    def homogeneous(self) -> bool:
        return is_zero(self.f)


def constant_sign_domain(
    f: Expr,
    params: Mapping[str, float],
    within: Interval = NONHOMOGENEOUS_DOMAIN,
    *,
    prefer: float | None = None,
    tol: float = ROOT_TOL,
) -> Interval:
    """The longest stretch of `within` where f is finite and of one sign.

    Zeros found by `find_all_roots` cut the stretch, including touching zeros
    such as that of `u^2` at 0 (its `marginal` roots); the ends of a stretch
    keep one sample spacing clear of every zero. When `prefer` lies in a
    stretch, that stretch is returned instead of the longest.

    >>> constant_sign_domain(as_expr("u^2"), {}, prefer=1.0).hi
    10.0

    Raises
    ------
    SignChangeError
        If f is zero or not evaluable at every sample.
    """
    f_array = compile_array(f, ["u"], params)
    samples = np.linspace(within.lo, within.hi, SIGN_SAMPLES)
    signs = np.nan_to_num(np.sign(f_array(samples)))
    if signs.any():
        zeros = find_all_roots(
            compile_scalar(f, ["u"], params),
            within,
            SIGN_SAMPLES - 1,
            tol,
            fn_array=f_array,
        )
        step = within.width / (SIGN_SAMPLES - 1)
        for zero in (*zeros.roots, *zeros.marginal):
            signs[np.abs(samples - zero.value) <= step] = 0

    runs: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(signs) + 1):
        if i < len(signs) and signs[i] == signs[start]:
            continue
        if signs[start] != 0 and i - 1 > start:
            runs.append((start, i - 1))
        start = i
    if not runs:
        raise SignChangeError(
            f"f = {f} has no stretch of constant sign in {within}",
            u=float(samples[0]),
            f_value=float(f_array(samples[0])),
        )
    best = max(runs, key=lambda run: run[1] - run[0])
    if prefer is not None:
        best = next(
            (r for r in runs if samples[r[0]] <= prefer <= samples[r[1]]), best
        )
    domain = Interval(float(samples[best[0]]), float(samples[best[1]]))
    if domain != within:
        logger.info("u-domain for f = %s narrowed to %s", f, domain)
    return domain


def _derivative(
    e: Expr, var: str, params: Mapping[str, float]
) -> Callable[[float], float] | None:
    try:
        return compile_scalar(differentiate(e, var), [var], params)
    except DifferentiationError:
        return None


class _ScanGrid:
    """Arrays tabulated once over a solver's scan grid."""

    def __init__(self, domain: Interval, n_scan: int) -> None:
        self.u = np.linspace(domain.lo, domain.hi, n_scan + 1)
        self._tables: dict[str, FloatArray] = {}

    def matches(self, u: FloatArray) -> bool:
        return u.shape == self.u.shape and bool(np.array_equal(u, self.u))

    def table(self, name: str, fn: Callable[[FloatArray], FloatArray]) -> FloatArray:
        if name not in self._tables:
            self._tables[name] = fn(self.u)
        return self._tables[name]


Equation: TypeAlias = tuple[
    Callable[[float], float],
    Callable[["FloatArray"], "FloatArray"],
    Optional[Callable[[float], float]],
]


class _Solver:
    """Shared root-scanning over an implicit equation `F(u; x, t) = 0`."""

    domain: Interval
    n_scan: int
    tol: float

    def equation(self, x: float, t: float) -> Equation:
        """`(F, F over an array, F' or None)` at the point `(x, t)`."""
        raise NotImplementedError

    def solve(self, x: float, t: float) -> BranchSet:
        fn, fn_array, derivative = self.equation(x, t)
        branches = find_all_roots(
            fn,
            self.domain,
            self.n_scan,
            self.tol,
            fn_array=fn_array,
            derivative=derivative,
        )
        return branches.at(x, t)

    def solve_near(self, x: float, t: float, u_guess: float) -> float | None:
        """The root nearest `u_guess`, or None if none can be bracketed nearby.

        Takes one Newton step from the guess and then widens a bracket around
        the prediction until F changes sign. Used to resolve stencil
        neighbours of a node whose root is already known.
        """
        fn, _fn_array, derivative = self.equation(x, t)
        u = self.domain.clamp(u_guess)
        try:
            fu = fn(u)
            if fu == 0:
                return u
            step = 0.0
            if derivative is not None:
                slope = derivative(u)
                if slope != 0 and math.isfinite(slope):
                    step = fu / slope
            centre = self.domain.clamp(u - step)
            radius = max(2.0 * abs(step), self.tol, 4 * _EPS * max(1.0, abs(u)))
            for _attempt in range(16):
                a = self.domain.clamp(centre - radius)
                b = self.domain.clamp(centre + radius)
                try:
                    return find_root(fn, (a, b), self.tol, derivative=derivative)
                except InvalidBracketError:
                    radius *= 4.0
        except NonConvergenceError as e:
            return e.estimate
        except EvaluationDomainError:
            return None
        return None


class HomogeneousSolver(_Solver):
    """`F(u) = u - h(x - t*g(u))`."""

    def __init__(self, problem: Problem) -> None:
        if not problem.homogeneous:
            raise ValueError(f"f = {problem.f} is not 0: the problem is inhomogeneous")
        self.problem = problem
        self.domain = problem.u_domain or SCAN_INTERVAL
        self.n_scan = problem.n_scan
        self.tol = problem.tol
        params = problem.params
        self._g = compile_scalar(problem.g, ["u"], params)
        self._h = compile_scalar(problem.h, ["s"], params)
        self._g_array = compile_array(problem.g, ["u"], params)
        self._h_array = compile_array(problem.h, ["s"], params)
        self._dg = _derivative(problem.g, "u", params)
        self._dh = _derivative(problem.h, "s", params)

    def equation(self, x: float, t: float) -> Equation:
        g, h, dg, dh = self._g, self._h, self._dg, self._dh
        g_array, h_array = self._g_array, self._h_array

        def fn(u: float) -> float:
            return u - h(x - t * g(u))

        def fn_array(u: FloatArray) -> FloatArray:
            return u - h_array(x - t * g_array(u))

        if dg is None or dh is None:
            return fn, fn_array, None

        def derivative(u: float) -> float:
            return 1.0 + t * dg(u) * dh(x - t * g(u))

        return fn, fn_array, derivative


class NonhomogeneousSolver(_Solver):
    """`F(u) = x - (ell∘phi)(u) - h(t - phi(u))`."""

    def __init__(self, problem: Problem) -> None:
        if problem.homogeneous:
            raise ValueError("f is 0: solve the problem as homogeneous")
        self.problem = problem
        params = problem.params
        self.domain = problem.u_domain or constant_sign_domain(
            problem.f, params, prefer=problem.u_ref, tol=problem.tol
        )
        self.n_scan = problem.n_scan
        self.tol = problem.tol
        self.phi = build_phi_map(
            problem.f,
            problem.u_ref,
            self.domain,
            problem.quad_tol,
            phi_at_ref=problem.phi_at_ref,
            params=params,
        )
        self.ell = build_ell(
            problem.g,
            self.phi,
            problem.v_ref,
            problem.quad_tol,
            ell_at_ref=problem.ell_at_ref,
        )
        self._g = compile_scalar(problem.g, ["u"], params)
        self._h = compile_scalar(problem.h, ["s"], params)
        self._h_array = compile_array(problem.h, ["s"], params)
        self._dh = _derivative(problem.h, "s", params)
        self._grid = _ScanGrid(self.domain, self.n_scan)
        logger.debug(
            "Nonhomogeneous solver for f = %s on %s, phi attains %s",
            problem.f,
            self.domain,
            self.phi.attained,
        )

    @property
    def speed(self) -> ComposedSpeed:
        return self.ell.speed

    def _phi_and_ell(self, u: FloatArray) -> tuple[FloatArray, FloatArray]:
        if self._grid.matches(u):
            return (
                self._grid.table("phi", self.phi.tabulate),
                self._grid.table("ell", self._tabulate_ell),
            )
        return self.phi.tabulate(u), self._tabulate_ell(u)

    def _tabulate_ell(self, us: FloatArray) -> FloatArray:
        out = np.full(us.shape, np.nan)
        for index, u in np.ndenumerate(us):
            if self.domain.contains(float(u)):
                out[index] = self.ell.ell_of_u(float(u))
        return out

    def equation(self, x: float, t: float) -> Equation:
        phi, ell, h, h_array, dh, g = (
            self.phi,
            self.ell,
            self._h,
            self._h_array,
            self._dh,
            self._g,
        )

        def fn(u: float) -> float:
            return x - ell.ell_of_u(u) - h(t - phi(u))

        def fn_array(u: FloatArray) -> FloatArray:
            phi_u, ell_u = self._phi_and_ell(u)
            return x - ell_u - h_array(t - phi_u)

        if dh is None:
            return fn, fn_array, None

        def derivative(u: float) -> float:
            return (dh(t - phi(u)) - g(u)) * phi.derivative(u)

        return fn, fn_array, derivative


class CanonicalSolver(_Solver):
    """`F(u) = x - G(u) - h(t - u)` with `G(u) = ∫_{u_ref}^u g`."""

    def __init__(
        self,
        g: Speed,
        h: Expr,
        u_domain: Interval,
        *,
        u_ref: float | None = None,
        params: Mapping[str, float] | None = None,
        tol: float = ROOT_TOL,
        quad_tol: float = QUAD_TOL,
        n_scan: int = N_SCAN,
    ) -> None:
        params = frozendict(params or {})
        self.domain = u_domain
        self.n_scan = n_scan
        self.tol = tol
        self.u_ref = u_domain.midpoint if u_ref is None else u_ref
        if not u_domain.contains(self.u_ref):
            raise RangeError(
                "u_ref is outside the domain", value=self.u_ref, attained=u_domain
            )
        if isinstance(g, Expr):
            variables = sorted(g.free_names - params.keys()) or ["u"]
            if len(variables) > 1:
                raise UnboundNameError(
                    f"g = {g} must be a function of one variable", name=variables[1]
                )
            self._g: Callable[[float], float] = compile_scalar(g, variables, params)
        else:
            self._g = g
        _check_names(h, "h", "s", params)
        self._h = compile_scalar(h, ["s"], params)
        self._h_array = compile_array(h, ["s"], params)
        self._dh = _derivative(h, "s", params)
        self._integral = RunningIntegral(self._g, self.u_ref, u_domain, quad_tol)
        self._grid = _ScanGrid(u_domain, n_scan)

    def primitive(self, u: float) -> float:
        """`G(u) = ∫_{u_ref}^u g`."""
        return self._integral(u)

    def _primitive_array(self, us: FloatArray) -> FloatArray:
        return np.array([self._integral(float(u)) for u in us.ravel()]).reshape(
            us.shape
        )

    def equation(self, x: float, t: float) -> Equation:
        g, h, h_array, dh, primitive = (
            self._g,
            self._h,
            self._h_array,
            self._dh,
            self.primitive,
        )

        def fn(u: float) -> float:
            return x - primitive(u) - h(t - u)

        def fn_array(u: FloatArray) -> FloatArray:
            if self._grid.matches(u):
                big_g = self._grid.table("G", self._primitive_array)
            else:
                big_g = self._primitive_array(u)
            return x - big_g - h_array(t - u)

        if dh is None:
            return fn, fn_array, None

        def derivative(u: float) -> float:
            return dh(t - u) - g(u)

        return fn, fn_array, derivative


@functools.lru_cache(maxsize=32)
def solver_for(problem: Problem) -> HomogeneousSolver | NonhomogeneousSolver:
    """The (cached) solver for a problem, chosen by whether f is 0."""
    if problem.homogeneous:
        return HomogeneousSolver(problem)
    return NonhomogeneousSolver(problem)


@functools.lru_cache(maxsize=32)
def _canonical_solver(
    g: Speed,
    h: Expr,
    u_domain: Interval,
    u_ref: float | None,
    params: frozendict[str, float],
    tol: float,
    quad_tol: float,
    n_scan: int,
) -> CanonicalSolver:
    return CanonicalSolver(
        g,
        h,
        u_domain,
        u_ref=u_ref,
        params=params,
        tol=tol,
        quad_tol=quad_tol,
        n_scan=n_scan,
    )


def solve_homogeneous(p: Problem, x: float, t: float) -> BranchSet:
    """All roots of `u = h(x - t*g(u))` in the problem's u-domain.

    The u-domain defaults to [-100, 100]. Subintervals where h cannot be
    evaluated are skipped and listed in the result's `skipped`.
    """
    if not p.homogeneous:
        raise ValueError(f"f = {p.f} is not 0: use solve_nonhomogeneous")
    return solver_for(p).solve(x, t)


def canonicalize(p: Problem) -> tuple[PhiMap, ComposedSpeed]:
    """phi for the problem's f and the transformed speed `v -> g(phi^-1(v))`.

    `v = phi(u)` turns the problem into `v_t + g(phi^-1(v))*v_x = 1`.
    """
    solver = solver_for(p)
    if not isinstance(solver, NonhomogeneousSolver):
        raise ValueError("f is 0: the problem has no canonical form")
    return solver.phi, solver.speed


def solve_canonical(
    g: Speed | str,
    h: ExprLike,
    x: float,
    t: float,
    u_domain: Interval,
    *,
    u_ref: float | None = None,
    params: Mapping[str, float] | None = None,
    tol: float = ROOT_TOL,
    quad_tol: float = QUAD_TOL,
    n_scan: int = N_SCAN,
) -> BranchSet:
    """All roots of `x = G(u) + h(t - u)` with `G(u) = ∫_{u_ref}^u g`.

    g is an expression in one variable or any callable, for instance the
    transformed speed returned by `canonicalize`. `u_ref` defaults to the
    midpoint of `u_domain`.
    """
    solver = _canonical_solver(
        as_expr(g) if isinstance(g, str) else g,
        as_expr(h),
        u_domain,
        u_ref,
        frozendict(params or {}),
        tol,
        quad_tol,
        n_scan,
    )
    return solver.solve(x, t)


def solve_nonhomogeneous(p: Problem, x: float, t: float) -> BranchSet:
    """All roots of `x = (ell∘phi)(u) + h(t - phi(u))` in the problem's u-domain.

    Without a declared u-domain, the longest stretch of [-10, 10] where f has
    one sign is used.
    """
    if p.homogeneous:
        raise ValueError("f is 0: use solve_homogeneous")
    return solver_for(p).solve(x, t)


def solve_via_canonical(p: Problem, x: float, t: float) -> BranchSet:
    """Solve a nonhomogeneous problem through its canonical form.

    Solves `x = ∫ g(phi^-1(v)) dv + h(t - v)` for v over phi's attained range,
    with the primitive anchored where ell is, and maps each root back through
    phi^-1. Agrees with `solve_nonhomogeneous` when `ell_at_ref` is 0.
    """
    solver = solver_for(p)
    if not isinstance(solver, NonhomogeneousSolver):
        raise ValueError("f is 0: the problem has no canonical form")
    phi, ell = solver.phi, solver.ell
    canonical = solve_canonical(
        solver.speed,
        p.h,
        x,
        t,
        phi.attained,
        u_ref=ell.v_ref,
        params=p.params,
        tol=p.tol,
        quad_tol=p.quad_tol,
        n_scan=p.n_scan,
    )
    roots = []
    for root in canonical.roots:
        u = phi_inverse(phi, root.value)
        roots.append(Root(u, root.residual, root.converged))
    roots.sort(key=lambda r: r.value)
    return BranchSet(
        roots=tuple(roots),
        interval=phi.domain,
        n_scan=canonical.n_scan,
        tol=canonical.tol,
        point=(x, t),
    )


def solve(p: Problem, x: float, t: float) -> BranchSet:
    """`solve_homogeneous` or `solve_nonhomogeneous`, by whether f is 0."""
    return solver_for(p).solve(x, t)


def configured_threads(threads: int | None = None) -> int:
    """The thread count for sweeps: `threads`, else `$BURGERQUAD_THREADS`, else 1."""
    if threads is not None:
        return max(1, threads)
    value = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", THREADS_ENV_VAR, value)
        return 1


def sweep(
    p: Problem,
    xs: Sequence[float],
    ts: Sequence[float],
    *,
    threads: int | None = None,
) -> list[list[BranchSet]]:
    """Solve at every grid point; `result[j][i]` is the point `(xs[i], ts[j])`.

    Points are independent and may be solved on a thread pool; the result
    order does not depend on the thread count.
    """
    solver = solver_for(p)
    points = [(float(x), float(t)) for t in ts for x in xs]
    workers = configured_threads(threads)
    if workers == 1:
        flat = [solver.solve(x, t) for x, t in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(lambda point: solver.solve(*point), points))
    nx = len(xs)
    return [flat[j * nx : (j + 1) * nx] for j in range(len(ts))]


@dataclass(frozen=True, eq=False)
class CharPath:
    """Samples `(t, x(t), u(t))` of a characteristic from `t = 0`.

    `truncated` is set when an expression could not be evaluated before
    `t_end`; the samples then stop at the last good step.
    """

    t: FloatArray
    x: FloatArray
    u: FloatArray
    dt: float
    method: str = "rk4"
    truncated: bool = False
    reason: str | None = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def end(self) -> tuple[float, float, float]:
        return float(self.t[-1]), float(self.x[-1]), float(self.u[-1])


def characteristic_trace(
    p: Problem, x0: float, u0: float, t_end: float, dt: float
) -> CharPath:
    """Integrate `dx/dt = g(u)`, `du/dt = f(u)` from `(0, x0, u0)` to `t_end`.

    Uses the classic 4th-order Runge-Kutta method with step `dt`; the last
    step is shortened to land on `t_end`.

    >>> path = characteristic_trace(Problem.of("0", "u", "s"), 0.0, 2.0, 1.0, 0.1)
    >>> [round(v, 12) for v in path.end]
    [1.0, 2.0, 2.0]
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0: {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0: {t_end}")
    f = compile_scalar(p.f, ["u"], p.params)
    g = compile_scalar(p.g, ["u"], p.params)

    ts, xs, us = [0.0], [float(x0)], [float(u0)]
    truncated, reason = False, None
    steps = max(1, math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    x, u = float(x0), float(u0)
    for step in range(1, steps + 1):
        t_next = min(step * dt, t_end)
        h = t_next - ts[-1]
        try:
            k1x, k1u = g(u), f(u)
            u2 = u + h / 2 * k1u
            k2x, k2u = g(u2), f(u2)
            u3 = u + h / 2 * k2u
            k3x, k3u = g(u3), f(u3)
            u4 = u + h * k3u
            k4x, k4u = g(u4), f(u4)
        except EvaluationDomainError as e:
            truncated, reason = True, str(e)
            logger.warning(
                "Characteristic from x0=%r truncated at t=%r: %s", x0, ts[-1], e
            )
            break
        x_next = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        u_next = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        if not (math.isfinite(x_next) and math.isfinite(u_next)):
            truncated, reason = True, "solution left the finite range"
            logger.warning("Characteristic from x0=%r blew up at t=%r", x0, t_next)
            break
        x, u = x_next, u_next
        ts.append(t_next)
        xs.append(x)
        us.append(u)

    return CharPath(
        t=np.array(ts),
        x=np.array(xs),
        u=np.array(us),
        dt=dt,
        truncated=truncated,
        reason=reason,
    )


def breaking_time(
    p: Problem, s_interval: Interval | None = None, n_samples: int = BREAKING_SAMPLES
) -> float | None:
    """The time at which the homogeneous solution first steepens into a shock.

    With `m` the smallest sampled value of `d/ds[g(h(s))]` over `s_interval`
    (default: the problem's `s_domain`, else [-10, 10]), returns `-1/m` when
    `m < 0` and None when the profile never compresses. Sampling makes this
    an estimate from below of the infimum's magnitude.

    >>> breaking_time(Problem.of("0", "u", "-s"), Interval(-1, 1))
    1.0

    Raises
    ------
    DifferentiationError
        If g(h(s)) contains `abs`.
    """
    if not p.homogeneous:
        raise ValueError("breaking_time applies to homogeneous problems (f = 0)")
    s_interval = s_interval or p.s_domain or S_INTERVAL
    slope = differentiate(substitute(p.g, "u", p.h), "s")
    samples = np.linspace(s_interval.lo, s_interval.hi, n_samples)
    values = compile_array(slope, ["s"], p.params)(samples)
    if np.isnan(values).all():
        raise EvaluationDomainError(
            f"d/ds[g(h(s))] = {slope} cannot be evaluated on {s_interval}",
            function=str(slope),
            argument=float(samples[0]),
        )
    least = float(np.nanmin(values))
    logger.debug("min d/ds[g(h(s))] on %s is %r", s_interval, least)
    if least >= 0:
        return None
    return -1.0 / least
