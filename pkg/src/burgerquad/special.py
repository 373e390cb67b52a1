"""The real branches of the Lambert W function.

W is the inverse of `w -> w*exp(w)`. On the reals it has two branches meeting
at `z = -1/e`: the principal branch W0 (`z >= -1/e`, `W0 >= -1`) and the lower
branch W-1 (`-1/e <= z < 0`, `W-1 <= -1`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from burgerquad._errors import EvaluationDomainError, NonConvergenceError
from burgerquad._pycompat import StrEnum
from burgerquad.constants import BRANCH_POINT, HALLEY_MAX_ITERATIONS, LAMBERT_W_TOL

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)
# Arguments this close below -1/e are rounding noise from computing -1/e.
_BRANCH_POINT_SLACK = 4 * _EPS * -BRANCH_POINT


class WBranch(StrEnum):
    """The real branches of Lambert W."""

    PRINCIPAL = "0"
    """W0, defined for z >= -1/e."""
    LOWER = "-1"
    """W-1, defined for -1/e <= z < 0."""

    @property
    def domain_description(self) -> str:
        if self is WBranch.PRINCIPAL:
            return "z >= -1/e"
        return "-1/e <= z < 0"


@dataclass(init=False)
class LambertWDomainError(EvaluationDomainError):
    branch: WBranch

    def __init__(self, message: str, *args: object, branch: WBranch, z: float) -> None:
        super().__init__(
            message, *args, function=f"lambertw{branch.value}", argument=z
        )
        self.branch = branch


def in_domain(z: ArrayLike, branch: WBranch) -> NDArray[np.bool_]:
    """Elementwise test of whether `z` is in `branch`'s domain."""
    z = np.asarray(z, dtype=np.float64)
    ok = np.isfinite(z) & (z >= BRANCH_POINT - _BRANCH_POINT_SLACK)
    if branch is WBranch.LOWER:
        ok &= z < 0
    return ok


def _initial_guess(z: FloatArray, branch: WBranch) -> FloatArray:
    """Starting points for Halley's iteration.

    - Near the branch point (z < -0.25): the series in
      `p = ±sqrt(2(e*z + 1))`, `w = -1 + p - p²/3 + 11p³/72`, with the sign
      of p selecting the branch.
    - W0 near 0 (-0.25 <= z <= 0.5): `z*(1 - z)`.
    - W0 for 0.5 < z <= 3: `log1p(z)`.
    - W0 for large z, and W-1 near 0: the asymptotic series
      `L1 - L2 + L2/L1` with `L1 = ln|z|` and `L2 = ln|L1|`.
    """
    with np.errstate(all="ignore"):
        q = 2.0 * (math.e * z + 1.0)
        p = np.where(q <= 8.0 * _EPS, 0.0, np.sqrt(np.maximum(q, 0.0)))
        if branch is WBranch.LOWER:
            p = -p
        series = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p

        l1 = np.log(np.abs(z))
        l2 = np.log(np.abs(l1))
        asymptotic = l1 - l2 + l2 / l1

        if branch is WBranch.LOWER:
            return np.where(z < -0.25, series, asymptotic)
        return np.select(
            [z < -0.25, z <= 0.5, z <= 3.0],
            [series, z * (1.0 - z), np.log1p(z)],
            default=asymptotic,
        )


def _halley(z: FloatArray, branch: WBranch) -> tuple[FloatArray, int]:
    w = _initial_guess(z, branch)
    active = np.ones(z.shape, dtype=np.bool_)
    iterations = 0
    with np.errstate(all="ignore"):
        while active.any() and iterations < HALLEY_MAX_ITERATIONS:
            iterations += 1
            ew = np.exp(w)
            f = w * ew - z
            wp1 = w + 1.0
            denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
            step = np.where(active & (denom != 0) & np.isfinite(denom), f / denom, 0.0)
            # At the branch point w = -1 the residual is flat and already ~0.
            step = np.where(np.isfinite(step), step, 0.0)
            w = w - step
            if branch is WBranch.PRINCIPAL:
                w = np.maximum(w, -1.0)
            else:
                w = np.minimum(w, -1.0)
            active &= np.abs(step) > 4.0 * _EPS * (1.0 + np.abs(w))
    return w, iterations


def lambert_w_array(
    z: ArrayLike, branch: WBranch = WBranch.PRINCIPAL
) -> FloatArray:
    """Evaluate a real branch of Lambert W elementwise.

    Elements outside the branch's domain are NaN.

    >>> [round(float(w), 12) for w in lambert_w_array([0.0, math.e])]
    [0.0, 1.0]
    """
    z = np.asarray(z, dtype=np.float64)
    out = np.full(z.shape, np.nan)
    ok = in_domain(z, branch)
    if ok.any():
        zs = np.maximum(z[ok], BRANCH_POINT)
        w, iterations = _halley(zs, branch)
        logger.debug("Lambert W%s: %d Halley iterations", branch.value, iterations)
        out[ok] = w
    return out


def residual(w: float, z: float) -> float:
    """The defect `|w*exp(w) - z|` of the defining identity."""
    return abs(w * math.exp(w) - z)


def lambert_w(z: float, branch: WBranch = WBranch.PRINCIPAL) -> float:
    """Evaluate a real branch of the Lambert W function.

    Returns `w` with `|w*exp(w) - z| <= 1e-12 * max(1, |z|)`, found by Halley
    iteration (at most 50 steps) from the initial guesses documented in
    `_initial_guess`.

    Raises
    ------
    LambertWDomainError
        If `z < -1/e`, or if `z >= 0` for the lower branch.
    NonConvergenceError
        If the defining identity is not met after the iteration limit.

    Examples
    --------
    >>> lambert_w(0.0)
    0.0
    >>> round(lambert_w(1.0), 12)
    0.56714329041
    >>> lambert_w(-math.exp(-1), WBranch.LOWER)
    -1.0
    """
    if not in_domain(z, branch):
        raise LambertWDomainError(
            f"Lambert W{branch.value} is only defined for "
            f"{branch.domain_description}",
            branch=branch,
            z=z,
        )
    w = float(lambert_w_array(z, branch))
    z = max(z, BRANCH_POINT)
    if residual(w, z) > LAMBERT_W_TOL * max(1.0, abs(z)):
        raise NonConvergenceError(
            f"Lambert W{branch.value} did not converge",
            estimate=w,
            iterations=HALLEY_MAX_ITERATIONS,
        )
    return w
