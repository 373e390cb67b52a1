"""Quadrature-defined maps: `phi(u) = ∫ du/f(u)` and `ell(v) = ∫ g(phi^-1(v)) dv`.

Both maps are fixed by a reference point: `phi(u_ref) = phi_at_ref` and
`ell(v_ref) = ell_at_ref`, with both offsets 0 unless the caller wants to
reproduce a particular antiderivative. Evaluation is on demand: each map keeps
a ladder of memoized running integrals at equally spaced checkpoints across
its u-domain and only integrates from the nearest checkpoint.
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np
from frozendict import frozendict

from burgerquad._errors import (
    EllNotCoveredError,
    EvaluationDomainError,
    NonConvergenceError,
    RangeError,
    SignChangeError,
)
from burgerquad._interval import Interval
from burgerquad.constants import (
    CHECKPOINTS,
    INVERSE_TOL,
    QUAD_MAX_DEPTH,
    QUAD_TOL,
    SIGN_SAMPLES,
)
from burgerquad.expr import (
    Const,
    Expr,
    ExprLike,
    Func,
    Name,
    as_expr,
    call,
    compile_array,
    compile_scalar,
    mul,
    power,
)
from burgerquad.rootfind import find_root

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def integrate(
    fn: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    *,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """Integrate `fn` over `[a, b]` by adaptive Simpson quadrature.

    Panels are split until the two-halves estimate agrees with the whole-panel
    estimate to within their share of `tol*max(1, |I|)`, then the Richardson
    correction is added. `integrate(fn, b, a) == -integrate(fn, a, b)`.

    >>> round(integrate(lambda u: 1.0, 0, 1), 12)
    1.0
    >>> round(integrate(lambda u: 1/u, 1, 2), 9)
    0.693147181

    Raises
    ------
    NonConvergenceError
        If a panel is still unresolved at `max_depth` subdivisions. The error's
        `estimate` is the integral with the unresolved panels' best estimates.
    """
    if a == b:
        return 0.0
    if a > b:
        return -integrate(fn, b, a, tol, max_depth=max_depth)

    fa, fm, fb = fn(a), fn((a + b) / 2.0), fn(b)
    whole = _simpson(fa, fm, fb, b - a)
    target = tol * max(1.0, abs(whole))

    parts: list[float] = []
    unresolved = 0
    stack = [(a, b, fa, fm, fb, whole, target, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, estimate, panel_tol, depth = stack.pop()
        mid = (lo + hi) / 2.0
        h = hi - lo
        fl = fn((lo + mid) / 2.0)
        fr = fn((mid + hi) / 2.0)
        left = _simpson(flo, fl, fmid, h / 2.0)
        right = _simpson(fmid, fr, fhi, h / 2.0)
        delta = left + right - estimate
        # Below this the difference is rounding noise in the panel sums.
        floor = 64.0 * _EPS * (abs(left) + abs(right))
        if abs(delta) <= 15.0 * max(panel_tol, floor) or depth >= max_depth:
            if abs(delta) > 15.0 * max(panel_tol, floor):
                unresolved += 1
            parts.append(left + right + delta / 15.0)
            continue
        stack.append((mid, hi, fmid, fr, fhi, right, panel_tol / 2.0, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, panel_tol / 2.0, depth + 1))

    result = math.fsum(parts)
    if unresolved:
        raise NonConvergenceError(
            f"Quadrature over [{a!r}, {b!r}] left {unresolved} panels unresolved",
            estimate=result,
            iterations=max_depth,
        )
    return result


class RunningIntegral:
    """The running integral `∫_anchor^u integrand` with memoized checkpoints.

    Checkpoints sit at `anchor + k*step` inside `domain`. They are filled
    outwards from the anchor on first use and never recomputed; the memo is
    guarded by a lock so concurrent evaluation is safe.
    """

    def __init__(
        self,
        integrand: Callable[[float], float],
        anchor: float,
        domain: Interval,
        tol: float,
        size: int = CHECKPOINTS,
    ) -> None:
        self._integrand = integrand
        self.anchor = anchor
        self.domain = domain
        self._tol = tol
        self._step = domain.width / size
        self._k_min = math.ceil((domain.lo - anchor) / self._step)
        self._k_max = math.floor((domain.hi - anchor) / self._step)
        self._upper = [0.0]  # k = 0, 1, 2, ...
        self._lower = [0.0]  # k = 0, -1, -2, ...
        self._lock = threading.Lock()

    def point(self, k: int) -> float:
        return self.anchor + k * self._step

    def _checkpoint(self, k: int) -> float:
        memo, direction = (self._upper, 1) if k >= 0 else (self._lower, -1)
        with self._lock:
            while len(memo) <= abs(k):
                i = direction * len(memo)
                a, b = self.point(i - direction), self.point(i)
                memo.append(memo[-1] + integrate(self._integrand, a, b, self._tol))
            return memo[abs(k)]

    def __call__(self, u: float) -> float:
        k = round((u - self.anchor) / self._step)
        k = min(max(k, self._k_min), self._k_max)
        return self._checkpoint(k) + integrate(
            self._integrand, self.point(k), u, self._tol
        )

    def table(self) -> tuple[FloatArray, FloatArray]:
        """Every checkpoint and the domain ends, with their integrals."""
        ks = [
            k
            for k in range(self._k_min, self._k_max + 1)
            if self.domain.lo < self.point(k) < self.domain.hi
        ]
        points = [self.domain.lo, *(self.point(k) for k in ks), self.domain.hi]
        values = [self(self.domain.lo), *(self._checkpoint(k) for k in ks)]
        values.append(self(self.domain.hi))
        return np.array(points), np.array(values)


@dataclass(frozen=True, eq=False)
class PhiMap:
    """The strictly monotone map `phi(u) = phi_at_ref + ∫_{u_ref}^u ds/f(s)`.

    Construct with `build_phi_map`, which checks that f keeps one sign on
    `domain`. `attained` is `phi(domain)`, the set `phi_inverse` accepts.
    """

    f: Expr
    u_ref: float
    domain: Interval
    tol: float
    phi_at_ref: float
    params: Mapping[str, float]
    sign: int
    attained: Interval
    _f: Callable[[float], float] = field(repr=False)
    _ladder: RunningIntegral = field(repr=False)
    _table: tuple[FloatArray, FloatArray] = field(repr=False)

    def __call__(self, u: float) -> float:
        if not self.domain.contains(u):
            raise RangeError(
                "u is outside the domain phi was validated on",
                value=u,
                attained=self.domain,
            )
        return self.phi_at_ref + self._ladder(u)

    def source(self, u: float) -> float:
        """f(u)."""
        return self._f(u)

    def derivative(self, u: float) -> float:
        """`phi'(u) = 1/f(u)`."""
        return _reciprocal(self._f, u)

    def inverse(self, v: float) -> float:
        return phi_inverse(self, v)

    def tabulate(self, us: ArrayLike) -> FloatArray:
        """phi at each of `us`; NaN where u is outside the domain."""
        us = np.asarray(us, dtype=np.float64)
        out = np.full(us.shape, np.nan)
        for index, u in np.ndenumerate(us):
            if self.domain.contains(float(u)):
                out[index] = self(float(u))
        return out

    def checkpoints(self) -> tuple[FloatArray, FloatArray]:
        """The u checkpoints (increasing, including the domain ends) and phi there."""
        return self._table


def _reciprocal(f: Callable[[float], float], u: float) -> float:
    value = f(u)
    if value == 0:
        raise SignChangeError("f vanishes inside the domain", u=u, f_value=value)
    return 1.0 / value


def _check_sign(f: Expr, domain: Interval, params: Mapping[str, float]) -> int:
    samples = np.linspace(domain.lo, domain.hi, SIGN_SAMPLES)
    values = compile_array(f, ["u"], params)(samples)
    invalid = np.flatnonzero(np.isnan(values))
    if invalid.size:
        u = float(samples[invalid[0]])
        raise EvaluationDomainError(
            f"f = {f} cannot be evaluated on {domain}", function=str(f), argument=u
        )
    signs = np.sign(values)
    offending = np.flatnonzero(signs != signs[0])
    if signs[0] == 0 or offending.size:
        index = 0 if signs[0] == 0 else int(offending[0])
        raise SignChangeError(
            f"f = {f} must be nonzero with one sign on {domain}",
            u=float(samples[index]),
            f_value=float(values[index]),
        )
    return int(signs[0])


def build_phi_map(
    f: ExprLike,
    u_ref: float | None,
    domain: Interval,
    tol: float = QUAD_TOL,
    *,
    phi_at_ref: float = 0.0,
    params: Mapping[str, float] | None = None,
) -> PhiMap:
    """Build `phi(u) = ∫ du/f(u)` on `domain` with `phi(u_ref) = phi_at_ref`.

    `u_ref` defaults to the midpoint of the domain. f is sampled at 1024
    points across the domain (ends included) and must be finite, nonzero and
    of one sign at all of them. This is a sampling heuristic: a sign change
    between samples goes unnoticed.

    Raises
    ------
    SignChangeError
        Quoting the first sample where f is zero or has the other sign.
    EvaluationDomainError
        If f cannot be evaluated at a sample.
    RangeError
        If `u_ref` is outside the domain.
    """
    f = as_expr(f)
    params = frozendict(params or {})
    if domain.width <= 0:
        raise ValueError(f"phi needs a domain of positive width: {domain}")
    u_ref = domain.midpoint if u_ref is None else float(u_ref)
    if not domain.contains(u_ref):
        raise RangeError("u_ref is outside the domain", value=u_ref, attained=domain)

    sign = _check_sign(f, domain, params)
    f_fn = compile_scalar(f, ["u"], params)
    ladder = RunningIntegral(lambda u: _reciprocal(f_fn, u), u_ref, domain, tol)
    points, integrals = ladder.table()
    values = integrals + phi_at_ref
    attained = Interval.around(float(values[0]), float(values[-1]))
    logger.debug("phi for f = %s on %s attains %s", f, domain, attained)
    return PhiMap(
        f=f,
        u_ref=u_ref,
        domain=domain,
        tol=tol,
        phi_at_ref=phi_at_ref,
        params=params,
        sign=sign,
        attained=attained,
        _f=f_fn,
        _ladder=ladder,
        _table=(points, values),
    )


def phi_inverse(phi: PhiMap, v: float, tol: float = INVERSE_TOL) -> float:
    """The u with `phi(u) = v`, to `|phi(u) - v| <= tol*max(1, |v|)`.

    The root is bracketed between neighbouring checkpoints, refined with the
    safeguarded Newton iteration using `phi'(u) = 1/f(u)`, then polished with
    further Newton steps while they keep reducing the defect.

    Raises
    ------
    RangeError
        If v is outside `phi.attained`.
    """
    slack = tol * max(1.0, abs(v))
    attained = phi.attained
    if not attained.lo - slack <= v <= attained.hi + slack:
        raise RangeError(
            "v is outside the range attained by phi", value=v, attained=attained
        )
    points, values = phi.checkpoints()
    if phi.sign < 0:
        points, values = points[::-1], values[::-1]
    if v <= values[0]:
        return float(points[0])
    if v >= values[-1]:
        return float(points[-1])
    k = int(np.searchsorted(values, v))
    k = min(max(k, 1), len(values) - 1)
    bracket = (float(points[k - 1]), float(points[k]))

    def defect(u: float) -> float:
        return phi(u) - v

    u = find_root(defect, bracket, slack, derivative=phi.derivative)
    lo, hi = min(bracket), max(bracket)
    residual = defect(u)
    for _polish in range(3):
        if residual == 0:
            break
        candidate = u - residual * phi.source(u)
        if not lo <= candidate <= hi:
            break
        candidate_residual = defect(candidate)
        if abs(candidate_residual) >= abs(residual):
            break
        u, residual = candidate, candidate_residual
    return u


@dataclass(frozen=True, eq=False)
class ComposedSpeed:
    """The transformed speed `v -> g(phi^-1(v))` of the canonical equation."""

    g: Expr
    phi: PhiMap
    _g: Callable[[float], float] = field(repr=False)

    def __call__(self, v: float) -> float:
        return self._g(phi_inverse(self.phi, v))

    def of_u(self, u: float) -> float:
        """`g(u)`, which equals the transformed speed at `v = phi(u)`."""
        return self._g(u)


def compose_speed(g: ExprLike, phi: PhiMap) -> ComposedSpeed:
    g = as_expr(g)
    return ComposedSpeed(g=g, phi=phi, _g=compile_scalar(g, ["u"], phi.params))


@dataclass(frozen=True, eq=False)
class EllMap:
    """`ell(v) = ell_at_ref + ∫_{v_ref}^v g(phi^-1(w)) dw`.

    Evaluated through the substitution `w = phi(s)`, which turns the composed
    integral into `(ell∘phi)(u) = ell_at_ref + ∫_{phi^-1(v_ref)}^u g(s)/f(s) ds`
    and needs no inversion per quadrature node. `integrate_direct` evaluates
    the defining integral literally.
    """

    speed: ComposedSpeed
    v_ref: float
    ell_at_ref: float
    tol: float
    u_at_ref: float
    _ladder: RunningIntegral = field(repr=False)

    @property
    def phi(self) -> PhiMap:
        return self.speed.phi

    def __call__(self, v: float) -> float:
        return self.ell_of_u(phi_inverse(self.phi, v))

    def ell_of_u(self, u: float) -> float:
        """`(ell∘phi)(u)`."""
        if not self.phi.domain.contains(u):
            raise RangeError(
                "u is outside the domain phi was validated on",
                value=u,
                attained=self.phi.domain,
            )
        return self.ell_at_ref + self._ladder(u)

    def derivative(self, v: float) -> float:
        """`ell'(v) = g(phi^-1(v))`."""
        return self.speed(v)

    def integrate_direct(self, v: float) -> float:
        return self.ell_at_ref + integrate(self.speed, self.v_ref, v, self.tol)


def build_ell(
    g: ExprLike,
    phi: PhiMap,
    v_ref: float | None = None,
    tol: float = QUAD_TOL,
    *,
    ell_at_ref: float = 0.0,
) -> EllMap:
    """Build `ell` for speed g over the map phi, with `ell(v_ref) = ell_at_ref`.

    `v_ref` defaults to 0 when phi attains it, and to `phi(u_ref)` otherwise.

    Raises
    ------
    RangeError
        If `v_ref` is outside `phi.attained`.
    """
    speed = compose_speed(g, phi)
    if v_ref is None:
        v_ref = 0.0 if phi.attained.contains(0.0) else phi.phi_at_ref
    u_at_ref = phi_inverse(phi, v_ref)
    g_fn = speed.of_u
    ladder = RunningIntegral(
        lambda u: g_fn(u) * phi.derivative(u), u_at_ref, phi.domain, tol
    )
    logger.debug("ell for g = %s anchored at v = %r (u = %r)", speed.g, v_ref, u_at_ref)
    return EllMap(
        speed=speed,
        v_ref=v_ref,
        ell_at_ref=ell_at_ref,
        tol=tol,
        u_at_ref=u_at_ref,
        _ladder=ladder,
    )


def ell_closed_form(m: int, n: int, var: str = "v") -> Expr:
    """The closed-form ell for `u_t + (u^m)_x = u^n`, i.e. `g = m*u^(m-1)`, `f = u^n`.

    The antiderivatives are those with no added constant, taken with
    `phi = u^(1-n)/(1-n)` (or `ln(u)` when n = 1):

    - `1 < n != m`: `(m/(m-n))*((1-n)*v)^((n-m)/(n-1))`
    - `n = m != 1`: `(m/(1-m))*ln((1-m)*v)`
    - `n = 1, m != 1`: `(m/(m-1))*exp((m-1)*v)`
    - `n = m = 1`: `exp(v)`

    >>> str(ell_closed_form(3, 2))
    '3*(-1*v)^-1'
    >>> str(ell_closed_form(2, 1))
    '2*exp(v)'

    Raises
    ------
    EllNotCoveredError
        For pairs none of the four cases covers, e.g. `n <= 0`.
    """
    v = Name(var)
    if n == 1 and m == 1:
        return call(Func.EXP, v)
    if n == 1:
        return mul(Const(m / (m - 1)), call(Func.EXP, mul(Const(m - 1), v)))
    if n == m:
        return mul(Const(m / (1 - m)), call(Func.LN, mul(Const(1 - m), v)))
    if n > 1:
        return mul(
            Const(m / (m - n)),
            power(mul(Const(1 - n), v), Const((n - m) / (n - 1))),
        )
    raise EllNotCoveredError(
        f"No closed-form ell for m={m}, n={n}; build it numerically with build_ell",
        m=m,
        n=n,
    )
