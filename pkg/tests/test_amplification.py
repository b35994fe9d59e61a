"""Tests for the one-step matrices, their limits, and local-error tools."""

import numpy as np
import pytest

from galpha import numkit
from galpha.amplification import (
    amplification_matrix,
    build_lr,
    build_lr_from_gammas,
    characteristic_recurrence_residual,
    limit_matrix_inf,
    limit_matrix_zero,
    truncation_bracket,
    truncation_residual,
)
from galpha.errors import DegenerateParams, SingularAtT, TooShort, VariantUnsupported
from galpha.schemes import Variant, make_scheme, params_from_rho

from conftest import assert_spectrum, closed_form_g3


# --- matrix layout -----------------------------------------------------------


def test_one_step_matrices_p2_literal():
    am, af, g, t = 0.8, 0.6, 0.7, 0.9
    L, R = build_lr_from_gammas(2, am, af, (g,), t)
    assert np.allclose(L, [[1.0, -g], [af * t, am]], atol=0)
    assert np.allclose(R, [[1.0, 1.0 - g], [(af - 1.0) * t, am - 1.0]], atol=0)


def test_one_step_matrices_p4_literal():
    am, af, g, t = 0.9, 0.7, 0.45, 1.3
    L, R = build_lr_from_gammas(4, am, af, (g, g, g), t)
    L_expected = [
        [1.0, 0.0, 0.0, -g / 6.0],
        [0.0, 1.0, 0.0, -g / 2.0],
        [0.0, 0.0, 1.0, -g],
        [0.0, 0.0, af * t / 2.0, am / 2.0],
    ]
    R_expected = [
        [1.0, 1.0, 0.5, (1.0 - g) / 6.0],
        [0.0, 1.0, 1.0, (1.0 - g) / 2.0],
        [0.0, 0.0, 1.0, 1.0 - g],
        [-t, -1.0 - t, -1.0 + (af - 1.0) * t / 2.0, (am - 1.0) / 2.0],
    ]
    assert np.allclose(L, L_expected, atol=1e-15)
    assert np.allclose(R, R_expected, atol=1e-15)


@pytest.mark.parametrize("t", [0.5, 1e3, -0.25 + 1.7j])
@pytest.mark.parametrize("variant", [Variant.EQUAL_GAMMA, Variant.REMARK_ONE])
def test_p3_matches_hand_written_entries(t, variant):
    params = make_scheme(3, 0.85, 0.58, variant)
    g1, g2 = params.gammas
    G = amplification_matrix(params, t)
    expected = closed_form_g3(0.85, 0.58, g1, g2, t)
    assert np.allclose(G, expected, rtol=1e-13, atol=1e-13)


def test_build_lr_uses_scheme_gammas():
    params = make_scheme(3, 0.85, 0.58, Variant.REMARK_ONE)
    L, R = build_lr(params, 0.4)
    L2, R2 = build_lr_from_gammas(3, 0.85, 0.58, params.gammas, 0.4)
    assert np.array_equal(L, L2)
    assert np.array_equal(R, R2)


def test_singular_at_the_pole():
    params = make_scheme(3, 0.9, 0.6)
    t_pole = -params.alpha_m / (params.gamma1 * params.alpha_f)
    with pytest.raises(SingularAtT):
        amplification_matrix(params, t_pole)


# --- spectral accuracy of the principal root ---------------------------------


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_principal_eigenvalue_order(p):
    """|principal eigenvalue - exp(-T)| shrinks like T^(p+1)."""
    params = make_scheme(p, 1.0, 0.75)

    def err(t):
        eigs = numkit.eigenvalues(amplification_matrix(params, t))
        target = np.exp(-t)
        return np.abs(eigs - target).min()

    t1, t2 = 0.2, 0.1
    slope = np.log2(err(t1) / err(t2)) / np.log2(t1 / t2)
    # at least order p + 1; some parameter points do better (the next
    # coefficient can be tiny there, e.g. p = 5 at these alphas)
    assert p + 0.5 <= slope <= p + 2.5, f"p={p}: slope {slope}"


# --- limit matrices -----------------------------------------------------------


def test_limit_zero_is_the_small_t_limit():
    params = make_scheme(3, 0.9, 0.6, Variant.REMARK_ONE)
    A0 = limit_matrix_zero(params)
    assert np.allclose(amplification_matrix(params, 1e-9), A0, atol=1e-8)


def test_limit_inf_is_the_large_t_limit():
    params = make_scheme(3, 0.9, 0.6)
    Ainf = limit_matrix_inf(params)
    assert np.allclose(amplification_matrix(params, 1e12), Ainf, atol=1e-9)


def test_limit_zero_spectrum_at_corner(eig_match):
    # (7/12, 1/2) is the rho_inf = 1 design point
    A0 = limit_matrix_zero(make_scheme(3, 7.0 / 12.0, 0.5))
    root = np.sqrt(3.0)
    eig_match(
        numkit.eigenvalues(A0),
        [1.0, (-2.0 + 1j * root) / 7.0, (-2.0 - 1j * root) / 7.0],
        tol=1e-12,
    )


def test_limit_zero_block_invariants():
    """Eigenvalue 1 plus a 2x2 block with trace/det linear in the parameters."""
    rng = np.random.default_rng(5)
    for _ in range(10):
        am, af = rng.uniform(0.55, 1.3, size=2)
        params = make_scheme(3, am, af)
        eigs = sorted(numkit.eigenvalues(limit_matrix_zero(params)), key=lambda z: abs(z - 1.0))
        assert abs(eigs[0] - 1.0) <= 1e-10
        pair = eigs[1:]
        g1 = params.gamma1
        assert pair[0] + pair[1] == pytest.approx(2.0 - (g1 + 1.0) / am, abs=1e-10)
        assert pair[0] * pair[1] == pytest.approx(1.0 - g1 / am, abs=1e-10)


def test_limit_inf_spectrum_at_design_points(eig_match):
    am, af = params_from_rho(0.5)
    eig_match(
        numkit.eigenvalues(limit_matrix_inf(make_scheme(3, am, af))),
        [-0.5, -0.5, -0.2],
        tol=1e-12,
    )
    eig_match(
        numkit.eigenvalues(limit_matrix_inf(make_scheme(3, 7.0 / 12.0, 0.5))),
        [0.0, -1.0, -1.0],
        tol=1e-12,
    )


def test_limit_inf_trailing_eigenvalue_is_exact():
    params = make_scheme(3, 1.1, 0.8)
    Ainf = limit_matrix_inf(params)
    eta1 = 1.0 - 1.0 / params.gamma1
    assert np.min(np.abs(numkit.eigenvalues(Ainf) - eta1)) <= 1e-13
    # third column is (0, 0, eta1): the exact-eigenvalue structure
    assert Ainf[0, 2] == 0.0 and Ainf[1, 2] == 0.0 and Ainf[2, 2] == eta1


def test_limit_inf_requires_equal_gamma():
    with pytest.raises(VariantUnsupported):
        limit_matrix_inf(make_scheme(3, 0.9, 0.6, Variant.REMARK_ONE))


def test_limit_matrices_p3_only():
    params = make_scheme(4, 0.9, 0.6)
    with pytest.raises(VariantUnsupported):
        limit_matrix_zero(params)
    with pytest.raises(VariantUnsupported):
        limit_matrix_inf(params)


def test_limit_matrices_degenerate_params():
    with pytest.raises(DegenerateParams):
        limit_matrix_zero(make_scheme(3, 0.0, 0.6))
    with pytest.raises(DegenerateParams):
        limit_matrix_inf(make_scheme(3, 0.5, 0.0))
    # gamma_1 = 0 exactly: alpha_f = C(3) + alpha_m
    from galpha.schemes import c_of_p

    af = float(c_of_p(3)) + 0.5
    with pytest.raises(DegenerateParams):
        limit_matrix_inf(make_scheme(3, 0.5, af))


# --- characteristic recurrence ------------------------------------------------


def test_recurrence_annihilates_powers_of_g():
    params = make_scheme(3, 0.9, 0.6)
    t = 0.8
    G = amplification_matrix(params, t)
    u0 = np.array([1.0, -t, t * t], dtype=complex)
    seq = []
    v = u0
    for _ in range(12):
        seq.append(v[0])
        v = G @ v
    assert characteristic_recurrence_residual(params, t, seq) <= 1e-12


def test_recurrence_detects_foreign_sequence():
    params = make_scheme(3, 0.9, 0.6)
    residual = characteristic_recurrence_residual(params, 0.8, np.ones(8))
    assert residual > 1e-3


def test_recurrence_needs_p_plus_one_values():
    params = make_scheme(3, 0.9, 0.6)
    with pytest.raises(TooShort):
        characteristic_recurrence_residual(params, 0.8, [1.0, 0.9, 0.8])


# --- local truncation error ----------------------------------------------------


def test_bracket_vanishes_for_remark_one():
    b0, b1 = truncation_bracket(make_scheme(3, 0.9, 0.6, Variant.REMARK_ONE))
    assert abs(b0) <= 1e-12
    assert abs(b1) <= 1e-12


def test_bracket_equal_gamma_leading_term_zero():
    am, af = params_from_rho(0.5)
    b0, b1 = truncation_bracket(make_scheme(3, am, af))
    assert abs(b0) <= 1e-12
    assert b1 == pytest.approx(-1.0 / 9.0, abs=1e-12)


def test_truncation_residual_scales_like_t_cubed():
    params = make_scheme(3, 0.9, 0.55)
    r1 = truncation_residual(params, 1e-3)
    r2 = truncation_residual(params, 2e-3)
    # b0 = 0 for equal-gamma, so the leading behaviour here is T^4
    assert abs(r2 / r1) == pytest.approx(16.0, rel=0.01)


def test_truncation_residual_pole():
    params = make_scheme(3, 0.9, 0.55)
    t_pole = -params.alpha_m / (params.gamma1 * params.alpha_f)
    with pytest.raises(SingularAtT):
        truncation_residual(params, t_pole)
