"""Default tolerances and sizes used throughout burgerquad."""

from __future__ import annotations

import math
from typing import Final

from burgerquad._interval import Interval

QUAD_TOL: Final = 1e-10
"""Relative tolerance of adaptive Simpson quadrature: `|error| <= tol*max(1, |I|)`."""

QUAD_MAX_DEPTH: Final = 48

ROOT_TOL: Final = 1e-10
"""Residual tolerance `|F(u)|` accepted for a root of an implicit equation."""

ROOT_MAX_ITERATIONS: Final = 200

N_SCAN: Final = 1024
"""Number of subintervals scanned for sign changes when looking for all roots."""

SCAN_INTERVAL: Final = Interval(-100.0, 100.0)
"""u-interval scanned by the homogeneous solver when a problem declares none."""

NONHOMOGENEOUS_DOMAIN: Final = Interval(-10.0, 10.0)
"""u-domain of the nonhomogeneous solver when a problem declares none."""

SIGN_SAMPLES: Final = 1024
"""Samples used to check that f keeps a constant, nonzero sign on its domain."""

CHECKPOINTS: Final = 1024
"""Size of the ladder of memoized quadrature checkpoints across a u-domain."""

INVERSE_TOL: Final = 1e-10

BREAKING_SAMPLES: Final = 4096

GRID_POINTS: Final = 201

HALLEY_MAX_ITERATIONS: Final = 50

LAMBERT_W_TOL: Final = 1e-12

BRANCH_POINT: Final = -math.exp(-1.0)
"""-1/e, where the two real branches of the Lambert W function meet."""

THREADS_ENV_VAR: Final = "BURGERQUAD_THREADS"

CSV_FLOAT_FORMAT: Final = ".17g"

S_INTERVAL: Final = Interval(-10.0, 10.0)
"""s-interval sampled for the breaking time when a problem declares none."""
