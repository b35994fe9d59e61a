"""Tests for scheme parameter construction and the closure rules."""

import math
from fractions import Fraction

import numpy as np
import pytest

from galpha.errors import OutOfTable, PoleAtRho, VariantUnsupported
from galpha.schemes import (
    RhoBranch,
    SchemeParams,
    Variant,
    c_of_p,
    in_stability_region,
    make_scheme,
    order_condition_residuals,
    params_from_rho,
    remark_one_gammas,
)

TABLE = {
    2: Fraction(1, 2),
    3: Fraction(5, 12),
    4: Fraction(1, 3),
    5: Fraction(31, 120),
    6: Fraction(1, 5),
    7: Fraction(41, 252),
    8: Fraction(1, 7),
    9: Fraction(31, 240),
    10: Fraction(1, 9),
    11: Fraction(61, 660),
}


@pytest.mark.parametrize("p,expected", sorted(TABLE.items()))
def test_tabulated_constants(p, expected):
    assert c_of_p(p) == expected


@pytest.mark.parametrize("p", [1, 0, 12, 40])
def test_constants_out_of_table(p):
    with pytest.raises(OutOfTable):
        c_of_p(p)


@pytest.mark.parametrize("p", [2, 3, 5, 8, 11])
def test_equal_gamma_closure(p):
    params = make_scheme(p, 0.9, 0.6)
    assert params.variant is Variant.EQUAL_GAMMA
    assert len(params.gammas) == p - 1
    target = float(c_of_p(p)) + 0.9 - 0.6
    assert all(g == pytest.approx(target, abs=1e-15) for g in params.gammas)
    assert params.gamma1 == params.gammas[0]


def test_equal_gamma_validation_rejects_wrong_gammas():
    with pytest.raises(ValueError, match="closure violated"):
        SchemeParams(3, 0.9, 0.6, (0.7, 0.8), Variant.EQUAL_GAMMA)


def test_params_require_two_gammas_for_p3():
    with pytest.raises(ValueError):
        SchemeParams(3, 0.9, 0.6, (0.7,), Variant.EQUAL_GAMMA)


def test_params_reject_nonfinite():
    with pytest.raises(ValueError):
        make_scheme(3, math.nan, 0.6)


def test_params_reject_low_order():
    with pytest.raises(ValueError):
        make_scheme(1, 0.9, 0.6)


def test_remark_one_reference_point():
    # At (alpha_m, alpha_f) = (2/3, 1/3) the distinct weights are (2/3, 5/6).
    g1, g2 = remark_one_gammas(2.0 / 3.0, 1.0 / 3.0)
    assert g1 == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert g2 == pytest.approx(5.0 / 6.0, abs=1e-15)


def test_remark_one_satisfies_both_order_conditions():
    rng = np.random.default_rng(11)
    for _ in range(10):
        am, af = rng.uniform(0.3, 1.3, size=2)
        params = make_scheme(3, am, af, Variant.REMARK_ONE)
        r1, r2 = order_condition_residuals(params)
        assert abs(r1) <= 1e-12
        assert abs(r2) <= 1e-12


def test_remark_one_only_defined_for_p3():
    with pytest.raises(VariantUnsupported):
        make_scheme(4, 0.9, 0.6, Variant.REMARK_ONE)


def test_equal_gamma_satisfies_first_condition_only():
    am, af = params_from_rho(0.5)
    params = make_scheme(3, am, af)
    r1, r2 = order_condition_residuals(params)
    assert abs(r1) <= 1e-12
    # the auxiliary residual is generically nonzero for the equal-gamma rule
    assert r2 == pytest.approx(-1.0 / 9.0, abs=1e-12)


def test_order_conditions_p3_only():
    with pytest.raises(VariantUnsupported):
        order_condition_residuals(make_scheme(2, 0.5, 0.5))


def test_main_branch_endpoints():
    assert params_from_rho(1.0) == pytest.approx((7.0 / 12.0, 0.5), abs=1e-15)
    assert params_from_rho(0.0) == pytest.approx((13.0 / 12.0, 0.5), abs=1e-15)
    assert params_from_rho(0.5) == pytest.approx((29.0 / 36.0, 5.0 / 9.0), abs=1e-15)


def test_alt1_meets_main_at_rho_zero():
    assert params_from_rho(0.0, RhoBranch.ALT1) == pytest.approx(
        params_from_rho(0.0, RhoBranch.MAIN), abs=1e-15
    )


def test_alt2_at_rho_zero():
    am, af = params_from_rho(0.0, RhoBranch.ALT2)
    assert af == pytest.approx((5.0 + math.sqrt(7.0)) / 4.0, abs=1e-15)
    assert am == pytest.approx((22.0 + 3.0 * math.sqrt(7.0)) / 12.0, abs=1e-15)


@pytest.mark.parametrize("branch", [RhoBranch.ALT1, RhoBranch.ALT2, RhoBranch.ALT3])
def test_alt_branches_pole_at_one(branch):
    with pytest.raises(PoleAtRho):
        params_from_rho(1.0, branch)
    # just below the pole the formulas still evaluate
    am, af = params_from_rho(1.0 - 1e-6, branch)
    assert math.isfinite(am) and math.isfinite(af)


@pytest.mark.parametrize("rho", [-0.1, 1.1, 5.0])
def test_rho_out_of_range(rho):
    with pytest.raises(ValueError):
        params_from_rho(rho)


def test_region_predicate_corner_and_boundaries():
    # the corner and the edges belong to the (closed) region
    assert in_stability_region(7.0 / 12.0, 0.5)
    assert in_stability_region(1.0, 0.5)
    assert in_stability_region(1.0, 1.0 - 1.0 / 12.0)
    # just outside along each constraint
    assert not in_stability_region(7.0 / 12.0 - 1e-12, 0.5)
    assert not in_stability_region(1.0, 0.5 - 1e-12)
    assert not in_stability_region(1.0, 1.0 - 1.0 / 12.0 + 1e-9)
    assert not in_stability_region(0.5, 0.5)


def test_main_branch_curve_stays_inside_region():
    for rho in np.linspace(0.0, 1.0, 101):
        am, af = params_from_rho(float(rho))
        assert in_stability_region(am, af), f"rho={rho}: ({am}, {af}) left the region"
