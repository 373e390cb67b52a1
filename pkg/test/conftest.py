from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from burgerquad.examples import REGISTRY
from burgerquad.solver import Problem

# Quadrature-backed maps are slow to build, so examples get no deadline.
settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "thorough", parent=settings.get_profile("default"), max_examples=1000
)
settings.load_profile(os.environ.get("BURGERQUAD_HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def cubic_problem() -> Problem:
    """`u_t + (u^3)_x = u^2` with `h(s) = 3s`, two branches near x = 13."""
    return REGISTRY["ex3.5-cubic-upper"].problem


@pytest.fixture(scope="session")
def burgers_problem() -> Problem:
    """Inviscid Burgers with the smooth decreasing profile `h(s) = -tanh(s)`."""
    return Problem.of("0", "u", "-tanh(s)")
