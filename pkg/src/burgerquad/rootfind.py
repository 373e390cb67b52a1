"""Roots of scalar implicit equations `F(u) = 0`.

`find_root` refines a single bracketed root; `find_all_roots` scans an
interval for every sign change so that multivalued (post-breaking) points
report all of their branches.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Union

import numpy as np

from burgerquad._errors import (
    EvaluationDomainError,
    InvalidBracketError,
    NonConvergenceError,
)
from burgerquad._interval import Interval
from burgerquad._pycompat import slots_if310
from burgerquad.constants import N_SCAN, ROOT_MAX_ITERATIONS, ROOT_TOL

if TYPE_CHECKING:
    from numpy.typing import NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]

logger = logging.getLogger(__name__)

ScalarFunction: TypeAlias = Callable[[float], float]
ArrayFunction: TypeAlias = Callable[["FloatArray"], "FloatArray"]
BracketLike: TypeAlias = Union[Interval, Sequence[float]]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True, **slots_if310())
class Root:
    """A root `value` of F with its residual `|F(value)|`."""

    value: float
    residual: float
    converged: bool


@dataclass(frozen=True, **slots_if310())
class BranchSet:
    """All roots found in a scanned interval, in increasing order.

    An empty BranchSet means no sign change was detected at the scan
    resolution, not that no root exists. Tangency candidates (local minima of
    `|F|` that are nearly zero without a sign change) are reported in
    `marginal`, never in `roots`. Subintervals where F could not be evaluated
    are listed in `skipped`.
    """

    roots: tuple[Root, ...]
    interval: Interval
    n_scan: int
    tol: float
    marginal: tuple[Root, ...] = ()
    skipped: tuple[Interval, ...] = ()
    point: tuple[float, float] | None = field(default=None, compare=False)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(r.value for r in self.roots)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def at(self, x: float, t: float) -> BranchSet:
        """This BranchSet labelled with the point `(x, t)` it was solved at."""
        return BranchSet(
            roots=self.roots,
            interval=self.interval,
            n_scan=self.n_scan,
            tol=self.tol,
            marginal=self.marginal,
            skipped=self.skipped,
            point=(x, t),
        )


def _as_bracket(bracket: BracketLike) -> tuple[float, float]:
    if isinstance(bracket, Interval):
        return bracket.lo, bracket.hi
    a, b = bracket
    return (float(a), float(b)) if a <= b else (float(b), float(a))


def _same_sign(a: float, b: float) -> bool:
    return (a > 0 and b > 0) or (a < 0 and b < 0)


def find_root(
    fn: ScalarFunction,
    bracket: BracketLike,
    tol: float = ROOT_TOL,
    *,
    xtol: float | None = None,
    derivative: ScalarFunction | None = None,
    max_iterations: int = ROOT_MAX_ITERATIONS,
) -> float:
    """Find a root of `fn` inside a sign-changing bracket.

    Each step tries a Newton step (when `derivative` is given) or a secant
    step through the two latest iterates, and accepts it only if it lands
    strictly inside the current bracket; otherwise, and after two consecutive
    steps that each fail to halve the bracket, it bisects. The bracket always keeps the
    sign change, so the iteration cannot escape.

    Stops when `|fn(u)| <= tol` or the bracket is narrower than
    `xtol*max(1, |u|)` (`xtol` defaults to `tol`).

    >>> find_root(lambda u: u - 1, (0, 2))
    1.0
    >>> round(find_root(lambda u: 3*u*u - 10*u + 3, (0, 1)), 9)
    0.333333333

    Raises
    ------
    InvalidBracketError
        If `fn` has the same strict sign at both ends of the bracket.
    NonConvergenceError
        If `max_iterations` steps are not enough.
    """
    a, b = _as_bracket(bracket)
    fa, fb = fn(a), fn(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if _same_sign(fa, fb):
        raise InvalidBracketError(
            "Bracket does not contain a sign change",
            bracket=(a, b),
            values=(fa, fb),
        )
    xtol = tol if xtol is None else xtol

    x, fx = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    previous: tuple[float, float] = (b, fb) if x == a else (a, fa)
    stalled = 0
    for _iteration in range(max_iterations):
        if abs(fx) <= tol:
            return x
        width = b - a
        if width <= xtol * max(1.0, abs(x)):
            return x

        candidate = math.nan
        if stalled < 2:
            if derivative is not None:
                slope = derivative(x)
                if slope != 0 and math.isfinite(slope):
                    candidate = x - fx / slope
            else:
                xp, fp = previous
                if fx != fp:
                    candidate = x - fx * (x - xp) / (fx - fp)
        if not a < candidate < b:
            candidate = a + width / 2.0

        fc = fn(candidate)
        previous = (x, fx)
        x, fx = candidate, fc
        if fc == 0:
            return candidate
        if _same_sign(fc, fa):
            a, fa = candidate, fc
        else:
            b, fb = candidate, fc

        stalled = stalled + 1 if b - a > width / 2.0 else 0

    raise NonConvergenceError(
        "Root refinement did not converge",
        estimate=x,
        iterations=max_iterations,
    )


def _evaluate_or_nan(fn: ScalarFunction, u: float) -> float:
    try:
        value = fn(u)
    except EvaluationDomainError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def _minimize_abs(
    fn: ScalarFunction, a: float, b: float, xtol: float
) -> tuple[float, float]:
    """Golden-section search for the minimum of `|fn|` on `[a, b]`."""

    def objective(u: float) -> float:
        value = _evaluate_or_nan(fn, u)
        return math.inf if math.isnan(value) else abs(value)

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    for _iteration in range(200):
        if b - a <= xtol * max(1.0, abs(a), abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refine(
    fn: ScalarFunction,
    a: float,
    b: float,
    tol: float,
    derivative: ScalarFunction | None,
) -> float | None:
    try:
        return find_root(fn, (a, b), tol, derivative=derivative)
    except NonConvergenceError as e:
        logger.warning("Root in [%r, %r] did not converge: %s", a, b, e)
        return e.estimate
    except InvalidBracketError:
        # The scan saw a sign change that scalar evaluation does not
        # reproduce; accept an endpoint only if it is already a root.
        for u in (a, b):
            if abs(_evaluate_or_nan(fn, u)) <= tol:
                return u
        return None


def _dedupe(roots: list[Root], distance: float) -> list[Root]:
    merged: list[Root] = []
    for root in sorted(roots, key=lambda r: r.value):
        if merged and root.value - merged[-1].value < distance:
            if root.residual < merged[-1].residual:
                merged[-1] = root
            continue
        merged.append(root)
    return merged


def find_all_roots(
    fn: ScalarFunction,
    interval: BracketLike,
    n_scan: int = N_SCAN,
    tol: float = ROOT_TOL,
    *,
    fn_array: ArrayFunction | None = None,
    derivative: ScalarFunction | None = None,
) -> BranchSet:
    """Find every root of `fn` that the scan of `interval` can see.

    The interval is split into `n_scan` equal subintervals; each one whose
    endpoint values change sign is refined with `find_root`. Roots closer than
    `10*tol` are merged. Interior local minima of `|F|` on the scan grid with
    no adjacent sign change are polished by golden-section search and
    reported as `marginal` when the polished `|F|` is below `sqrt(tol)`.

    `fn_array`, when given, evaluates `fn` over the whole scan grid at once,
    with NaN for points outside its domain. Runs of subintervals with a
    non-finite endpoint value are skipped and recorded.

    >>> [round(u, 9) for u in find_all_roots(lambda u: 3*u*u - 10*u + 3, (0, 5), 64)]
    [0.333333333, 3.0]
    >>> len(find_all_roots(lambda u: u*u + 1, (-5, 5)))
    0
    """
    if n_scan < 2:
        raise ValueError(f"n_scan must be >= 2: {n_scan}")
    lo, hi = _as_bracket(interval)
    scanned = Interval(lo, hi)
    grid = np.linspace(lo, hi, n_scan + 1)
    if fn_array is not None:
        with np.errstate(all="ignore"):
            values = np.asarray(fn_array(grid), dtype=np.float64)
        values = np.where(np.isfinite(values), values, np.nan)
    else:
        values = np.array([_evaluate_or_nan(fn, float(u)) for u in grid])

    left, right = values[:-1], values[1:]
    evaluable = ~(np.isnan(left) | np.isnan(right))
    sign_change = evaluable & ~(((left > 0) & (right > 0)) | ((left < 0) & (right < 0)))

    found: list[Root] = []
    skipped = _runs(grid, ~evaluable)
    for k in np.flatnonzero(sign_change):
        a, b = float(grid[k]), float(grid[k + 1])
        try:
            u = _refine(fn, a, b, tol, derivative)
        except EvaluationDomainError:
            skipped.append(Interval(a, b))
            continue
        if u is None:
            continue
        residual = abs(_evaluate_or_nan(fn, u))
        found.append(Root(u, residual, residual <= tol))

    roots = _dedupe(found, 10 * tol)
    for root in roots:
        if not root.converged:
            logger.warning(
                "Root u=%r has residual %r above tolerance %r",
                root.value,
                root.residual,
                tol,
            )
    if skipped:
        logger.debug("Skipped %d stretches of %s", len(skipped), scanned)

    return BranchSet(
        roots=tuple(roots),
        interval=scanned,
        n_scan=n_scan,
        tol=tol,
        marginal=tuple(_tangencies(fn, grid, values, tol)),
        skipped=tuple(sorted(skipped)),
    )


def _runs(grid: FloatArray, mask: NDArray[np.bool_]) -> list[Interval]:
    """Merge consecutive masked subintervals of `grid` into intervals."""
    if not mask.any():
        return []
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts, stops = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)
    return [Interval(float(grid[i]), float(grid[j])) for i, j in zip(starts, stops)]


def _tangencies(
    fn: ScalarFunction, grid: FloatArray, values: FloatArray, tol: float
) -> Iterator[Root]:
    threshold = math.sqrt(tol)
    left, centre, right = values[:-2], values[1:-1], values[2:]
    # Orient each triple so that |F| = side*F near the centre.
    side = np.sign(centre)
    lo, mid, hi = side * left, side * centre, side * right
    with np.errstate(all="ignore"):
        h = float(grid[1] - grid[0])
        curvature = (lo + hi - 2 * mid) / (2 * h * h)
        slope = (hi - lo) / (2 * h)
        predicted = mid - slope * slope / (4 * curvature)
        candidates = (
            (side != 0)
            & (lo > 0)
            & (hi > 0)
            & (mid <= lo)
            & (mid < hi)
            & (curvature > 0)
            & (predicted <= 10 * threshold)
        )
    for k in np.flatnonzero(candidates) + 1:
        u, residual = _minimize_abs(
            fn, float(grid[k - 1]), float(grid[k + 1]), 64 * _EPS
        )
        if residual <= threshold:
            logger.debug("Tangency candidate at u=%r, |F|=%r", u, residual)
            yield Root(u, residual, residual <= tol)
