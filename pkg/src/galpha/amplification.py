"""One-step update matrices and their spectral limits.

For the scalar test equation u' + lambda*u = 0 a p-th order scheme advances
the scaled state

    U_n = (U_n, tau*U_n', tau^2/1! ... tau^(p-1)*U_n^(p-1))    (length p)

through a linear one-step system  L(T) U_{n+1} = R(T) U_n  with T = lambda*tau.
The amplification matrix is G(T) = L(T)^{-1} R(T); its spectral radius over T
decides stability and its principal eigenvalue carries the accuracy of the
scheme.

Matrix layout (row i = update of the i-th scaled derivative, last row = the
weighted collocation of the ODE between steps n and n+1):

    L[i, i]    = 1                       for i = 0 .. p-2
    L[i, p-1]  = -gamma_{p-1-i} / (p-1-i)!
    L[p-1, p-2] = alpha_f * T / (p-2)!,   L[p-1, p-1] = alpha_m / (p-2)!

    R[i, j]    = 1 / (j-i)!              for i <= j <= p-2
    R[i, p-1]  = (1 - gamma_{p-1-i}) / (p-1-i)!
    R[p-1, 0]  = -T
    R[p-1, j]  = -1/(j-1)! - T/j!        for 1 <= j <= p-3
    R[p-1, p-2] = -1/(p-3)! + (alpha_f - 1) T / (p-2)!
    R[p-1, p-1] = (alpha_m - 1) / (p-2)!

(for p = 2 the two last-row rules collapse to R[1, 0] = (alpha_f - 1) T and
R[1, 1] = alpha_m - 1).  These rows follow directly from Taylor updates of
each derivative plus the alpha-weighted collocation; the p = 3 case reduces to

    L = [[1, 0, -g2/2], [0, 1, -g1], [0, af*T, am]]
    R = [[1, 1, (1-g2)/2], [0, 1, 1-g1], [-T, (af-1)*T - 1, am-1]]
"""

from __future__ import annotations

from math import factorial

import numpy as np

from . import numkit
from .errors import DegenerateParams, SingularAtT, SingularMatrix, TooShort, VariantUnsupported
from .schemes import SchemeParams, Variant

__all__ = [
    "build_lr",
    "build_lr_from_gammas",
    "amplification_matrix",
    "limit_matrix_zero",
    "limit_matrix_inf",
    "characteristic_recurrence_residual",
    "truncation_bracket",
    "truncation_residual",
]


def build_lr_from_gammas(p, alpha_m, alpha_f, gammas, t):
    """(L, R) for explicit gamma weights; ``t`` is lambda*tau (may be complex).

    This is the raw builder used both by :func:`build_lr` and by callers that
    scan over non-standard gamma choices.
    """
    if p < 2:
        raise ValueError(f"order p must be >= 2, got {p}")
    if len(gammas) != p - 1:
        raise ValueError(f"expected {p - 1} gammas, got {len(gammas)}")
    t = complex(t)
    L = np.zeros((p, p), dtype=complex)
    R = np.zeros((p, p), dtype=complex)
    for i in range(p - 1):
        g = gammas[p - 2 - i]  # gamma_{p-1-i}
        f = factorial(p - 1 - i)
        L[i, i] = 1.0
        L[i, p - 1] = -g / f
        for j in range(i, p - 1):
            R[i, j] = 1.0 / factorial(j - i)
        R[i, p - 1] = (1.0 - g) / f
    fk = factorial(p - 2)
    L[p - 1, p - 2] = alpha_f * t / fk
    L[p - 1, p - 1] = alpha_m / fk
    if p == 2:
        R[p - 1, 0] = (alpha_f - 1.0) * t
    else:
        R[p - 1, 0] = -t
        for j in range(1, p - 2):
            R[p - 1, j] = -1.0 / factorial(j - 1) - t / factorial(j)
        R[p - 1, p - 2] = -1.0 / factorial(p - 3) + (alpha_f - 1.0) * t / fk
    R[p - 1, p - 1] = (alpha_m - 1.0) / fk
    return L, R


def build_lr(params: SchemeParams, t):
    """(L, R) of the one-step system for a validated scheme at T = lambda*tau."""
    return build_lr_from_gammas(
        params.p, params.alpha_m, params.alpha_f, params.gammas, t
    )


def amplification_matrix(params: SchemeParams, t) -> np.ndarray:
    """G(T) = L^{-1} R, formed by linear solve (never by explicit inverse).

    Raises
    ------
    SingularAtT
        If L(T) is singular; for p = 3 this happens on the pole
        alpha_m + gamma_1 * alpha_f * T = 0.
    """
    L, R = build_lr(params, t)
    try:
        return numkit.solve(L, R)
    except SingularMatrix as exc:
        raise SingularAtT(f"one-step matrix is singular at T={t!r}: {exc}") from exc


def limit_matrix_zero(params: SchemeParams) -> np.ndarray:
    """Limit of G(T) as T -> 0 for the third-order family (any closure).

    A0 = [[1, 1 - g2/(2 am), 1/2 - g2/(2 am)],
          [0, 1 - g1/am,     1 - g1/am],
          [0, -1/am,         1 - 1/am]]

    Its eigenvalues are 1 (the consistency mode) and the roots of the
    trailing 2x2 block.  Requires alpha_m != 0.
    """
    if params.p != 3:
        raise VariantUnsupported("closed-form T->0 limit is available for p=3 only")
    am = params.alpha_m
    if am == 0.0:
        raise DegenerateParams("T->0 limit undefined for alpha_m = 0")
    g1, g2 = params.gammas
    return np.array(
        [
            [1.0, 1.0 - g2 / (2.0 * am), 0.5 - g2 / (2.0 * am)],
            [0.0, 1.0 - g1 / am, 1.0 - g1 / am],
            [0.0, -1.0 / am, 1.0 - 1.0 / am],
        ],
        dtype=complex,
    )


def limit_matrix_inf(params: SchemeParams) -> np.ndarray:
    """Limit of G(T) as T -> infinity, equal-gamma third-order closure only.

    Ainf = [[1 - 1/(2 af), 1 - 1/(2 af), 0],
            [-1/af,        1 - 1/af,     0],
            [-1/(g1 af),   -1/(g1 af),   1 - 1/g1]]

    Requires alpha_f != 0 and gamma_1 != 0.  Note the trailing entry
    1 - 1/g1 is an exact eigenvalue (the third column is otherwise zero),
    and the leading 2x2 block depends on alpha_f alone.
    """
    if params.p != 3:
        raise VariantUnsupported("closed-form T->inf limit is available for p=3 only")
    if params.variant is not Variant.EQUAL_GAMMA:
        raise VariantUnsupported(
            "T->inf limit has closed form only for the equal-gamma closure; "
            "sample G at large T instead"
        )
    af = params.alpha_f
    g1 = params.gamma1
    if af == 0.0 or g1 == 0.0:
        raise DegenerateParams("T->inf limit undefined for alpha_f = 0 or gamma_1 = 0")
    return np.array(
        [
            [1.0 - 0.5 / af, 1.0 - 0.5 / af, 0.0],
            [-1.0 / af, 1.0 - 1.0 / af, 0.0],
            [-1.0 / (g1 * af), -1.0 / (g1 * af), 1.0 - 1.0 / g1],
        ],
        dtype=complex,
    )


def characteristic_recurrence_residual(params: SchemeParams, t, sequence) -> float:
    """Largest defect of the solution sequence in the scalar p+1-term recurrence.

    Any trajectory produced by the one-step map satisfies

        sum_{j=0}^{p} (-1)^j G_j u_{n+1-j} = 0,      G_0 = 1,

    where G_j is the sum of the j-by-j principal minors of G(T) (G_1 the
    trace, G_p the determinant).  Returns max_n |residual| over all windows.

    Raises
    ------
    TooShort
        If fewer than p + 1 values are supplied.
    """
    u = np.asarray(sequence, dtype=complex)
    p = params.p
    if u.ndim != 1 or u.size < p + 1:
        raise TooShort(f"need at least {p + 1} sequence values, got {u.size}")
    minors = numkit.principal_minor_sums(amplification_matrix(params, t))
    coeffs = np.concatenate(([1.0 + 0.0j], [(-1.0) ** j * minors[j - 1] for j in range(1, p + 1)]))
    residual = 0.0
    for n in range(p, u.size):
        window = u[n::-1][: p + 1]  # u_{n+1-j} for j = 0 .. p with n+1 -> n shift
        residual = max(residual, abs(np.dot(coeffs, window)))
    return float(residual)


def truncation_bracket(params: SchemeParams, t=None) -> tuple[float, float]:
    """Coefficients (b0, b1) of the local-error bracket of the p = 3 family.

    The residual of the exact solution in the one-step recurrence expands as

        tau^3 lambda^3 / (12 (alpha_m + gamma_1 alpha_f T)) * [b0 + T b1] + O(tau^5)

    with b0 and b1 exactly the two order-condition residuals.  ``t`` is unused
    for the coefficient pair itself and accepted only for signature symmetry
    with :func:`truncation_residual`.
    """
    if params.p != 3:
        raise VariantUnsupported("truncation bracket is defined for p=3")
    g1, g2 = params.gammas
    am, af = params.alpha_m, params.alpha_f
    b0 = -5.0 + 6.0 * g1 + 6.0 * g2 + 12.0 * af - 12.0 * am
    b1 = -5.0 - 2.0 * g1 + 6.0 * g2 + 12.0 * af - 12.0 * g1 * af
    return b0, b1


def truncation_residual(params: SchemeParams, t) -> complex:
    """Leading local-error term (b0 + T*b1) * T^3 / (12 (alpha_m + g1 af T))."""
    b0, b1 = truncation_bracket(params)
    t = complex(t)
    denom = 12.0 * (params.alpha_m + params.gamma1 * params.alpha_f * t)
    scale = 12.0 * (abs(params.alpha_m) + abs(params.gamma1 * params.alpha_f * t))
    if abs(denom) <= 1e-12 * scale:
        raise SingularAtT(f"truncation residual has a pole at T={t!r}")
    return (b0 + t * b1) * t**3 / denom
