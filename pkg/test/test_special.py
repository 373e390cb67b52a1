from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings

from burgerquad.special import (
    LambertWDomainError,
    WBranch,
    in_domain,
    lambert_w,
    lambert_w_array,
    residual,
)
from test.strategies import lambert_w0_arguments, lambert_wm1_arguments

LN2 = math.log(2.0)


@pytest.mark.parametrize(
    "z, branch, expected",
    [
        (0.0, WBranch.PRINCIPAL, 0.0),
        (math.e, WBranch.PRINCIPAL, 1.0),
        (1.0, WBranch.PRINCIPAL, 0.5671432904097838),
        (-LN2 / 2, WBranch.PRINCIPAL, -LN2),
        (-LN2 / 2, WBranch.LOWER, -2 * LN2),
        (-0.2, WBranch.LOWER, -2.5426413577735265),
        (2 * math.exp(2), WBranch.PRINCIPAL, 2.0),
        (-math.exp(-1.0), WBranch.PRINCIPAL, -1.0),
        (-math.exp(-1.0), WBranch.LOWER, -1.0),
    ],
)
def test_lambert_w__known_values(z: float, branch: WBranch, expected: float) -> None:
    assert lambert_w(z, branch) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@settings(max_examples=200)
@given(lambert_w0_arguments)
def test_lambert_w0__defining_identity(z: float) -> None:
    w = lambert_w(z)

    assert w >= -1.0
    assert residual(w, z) <= 1e-12 * max(1.0, abs(z))


@settings(max_examples=200)
@given(lambert_wm1_arguments)
def test_lambert_wm1__defining_identity(z: float) -> None:
    w = lambert_w(z, WBranch.LOWER)

    assert w <= -1.0
    assert residual(w, z) <= 1e-12 * max(1.0, abs(z))


@pytest.mark.parametrize(
    "z, branch",
    [
        (-1.0, WBranch.PRINCIPAL),
        (-0.3679, WBranch.PRINCIPAL),
        (math.nan, WBranch.PRINCIPAL),
        (math.inf, WBranch.PRINCIPAL),
        (0.0, WBranch.LOWER),
        (0.5, WBranch.LOWER),
        (-1.0, WBranch.LOWER),
    ],
)
def test_lambert_w__domain_errors(z: float, branch: WBranch) -> None:
    with pytest.raises(LambertWDomainError) as exc_info:
        lambert_w(z, branch)
    assert exc_info.value.branch is branch
    assert exc_info.value.function == f"lambertw{branch.value}"


def test_lambert_w_array__nan_outside_domain() -> None:
    w = lambert_w_array([-1.0, -0.2, 0.5], WBranch.LOWER)

    assert np.isnan(w[[0, 2]]).all()
    assert w[1] == pytest.approx(-2.5426413577735265, rel=1e-12)


def test_lambert_w_array__matches_scalar() -> None:
    zs = np.linspace(-0.36, 50.0, 101)

    assert lambert_w_array(zs).tolist() == pytest.approx(
        [lambert_w(float(z)) for z in zs], rel=1e-15, abs=1e-15
    )


def test_lambert_w_array__keeps_shape() -> None:
    assert lambert_w_array(np.zeros((2, 3))).shape == (2, 3)


def test_in_domain() -> None:
    zs = [-1.0, -math.exp(-1.0), -0.1, 0.0, 1.0]

    assert in_domain(zs, WBranch.PRINCIPAL).tolist() == [False, True, True, True, True]
    assert in_domain(zs, WBranch.LOWER).tolist() == [False, True, True, False, False]
