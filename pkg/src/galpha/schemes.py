"""Scheme parameter families for generalized-alpha integration of u' + lambda*u = 0.

A scheme of order p advances the solution together with its first p - 1 scaled
derivatives.  It is fixed by the pair (alpha_m, alpha_f) and by p - 1 update
weights gamma_1 .. gamma_{p-1}.  Two closures of the order conditions are
supported:

* ``Variant.EQUAL_GAMMA``:  every gamma_j equals C(p) + alpha_m - alpha_f,
  where C(p) is a tabulated rational constant per order (1/2 for p = 2,
  5/12 for p = 3, ...).  Defined for p = 2 .. 11.
* ``Variant.REMARK_ONE``:  third order only; gamma_1 and gamma_2 are distinct
  rational functions of (alpha_m, alpha_f) that solve the same two order
  conditions.  This closure trades the clean stiff-limit form for a larger
  unconditional-stability region.

The module also carries the closed-form descriptions of the third-order
family: the unconditional stability region in the (alpha_m, alpha_f) plane and
the four solution branches that pin the parameters to a requested
high-frequency amplification target rho_inf.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import OutOfTable, PoleAtRho, VariantUnsupported

__all__ = [
    "Variant",
    "RhoBranch",
    "SchemeParams",
    "c_of_p",
    "make_scheme",
    "remark_one_gammas",
    "order_condition_residuals",
    "params_from_rho",
    "in_stability_region",
]


class Variant(enum.Enum):
    """Closure rule used to pick the gamma weights."""

    EQUAL_GAMMA = "equal-gamma"
    REMARK_ONE = "remark-one"


class RhoBranch(enum.Enum):
    """Solution branches expressing (alpha_m, alpha_f) through rho_inf."""

    MAIN = "main"
    ALT1 = "alt1"
    ALT2 = "alt2"
    ALT3 = "alt3"


# Scheme constant per order, exact.  Index = p.
_C_TABLE: dict[int, Fraction] = {
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


def c_of_p(p: int) -> Fraction:
    """Tabulated scheme constant C(p) as an exact rational, p = 2 .. 11."""
    try:
        return _C_TABLE[p]
    except KeyError:
        raise OutOfTable(f"no tabulated constant for order p={p}") from None


@dataclass(frozen=True)
class SchemeParams:
    """Fully resolved parameters of one scheme instance.

    ``gammas[j - 1]`` holds gamma_j for j = 1 .. p - 1.  Construction
    validates the variant-specific closure so that an instance can always be
    trusted downstream:  equal-gamma instances satisfy
    gamma_j = C(p) + alpha_m - alpha_f, and remark-one instances satisfy both
    third-order conditions to round-off.
    """

    p: int
    alpha_m: float
    alpha_f: float
    gammas: tuple[float, ...]
    variant: Variant

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError(f"order p must be >= 2, got {self.p}")
        if len(self.gammas) != self.p - 1:
            raise ValueError(
                f"expected {self.p - 1} gamma weights for p={self.p}, "
                f"got {len(self.gammas)}"
            )
        values = (self.alpha_m, self.alpha_f, *self.gammas)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("scheme parameters must be finite")
        if self.variant is Variant.EQUAL_GAMMA:
            target = float(c_of_p(self.p)) + self.alpha_m - self.alpha_f
            tol = 1e-14 * max(1.0, abs(target))
            if any(abs(g - target) > tol for g in self.gammas):
                raise ValueError(
                    "equal-gamma closure violated: gammas "
                    f"{self.gammas} != C(p) + alpha_m - alpha_f = {target!r}"
                )
        elif self.variant is Variant.REMARK_ONE:
            if self.p != 3:
                raise VariantUnsupported("remark-one closure is third order only")
            r1, r2 = order_condition_residuals(self)
            if max(abs(r1), abs(r2)) > 1e-12:
                raise ValueError(
                    f"remark-one closure violated: residuals ({r1:.3e}, {r2:.3e})"
                )

    @property
    def gamma1(self) -> float:
        return self.gammas[0]


def remark_one_gammas(alpha_m: float, alpha_f: float) -> tuple[float, float]:
    """Distinct (gamma_1, gamma_2) solving both third-order conditions.

    gamma_1 = 3*alpha_m / (2 + 3*alpha_f)
    gamma_2 = (10 - 9*alpha_f - 36*alpha_f^2 + 6*alpha_m + 36*alpha_m*alpha_f)
              / (12 + 18*alpha_f)
    """
    g1 = 3.0 * alpha_m / (2.0 + 3.0 * alpha_f)
    g2 = (
        10.0 - 9.0 * alpha_f - 36.0 * alpha_f**2 + 6.0 * alpha_m
        + 36.0 * alpha_m * alpha_f
    ) / (12.0 + 18.0 * alpha_f)
    return g1, g2


def make_scheme(
    p: int,
    alpha_m: float,
    alpha_f: float,
    variant: Variant = Variant.EQUAL_GAMMA,
) -> SchemeParams:
    """Build a validated :class:`SchemeParams` for the requested closure."""
    if p < 2:
        raise ValueError(f"order p must be >= 2, got {p}")
    if variant is Variant.EQUAL_GAMMA:
        gamma = float(c_of_p(p)) + alpha_m - alpha_f
        gammas = (gamma,) * (p - 1)
    elif variant is Variant.REMARK_ONE:
        if p != 3:
            raise VariantUnsupported("remark-one closure is third order only")
        gammas = remark_one_gammas(alpha_m, alpha_f)
    else:  # pragma: no cover - enum is closed
        raise VariantUnsupported(f"unknown variant {variant!r}")
    return SchemeParams(p, float(alpha_m), float(alpha_f), tuple(gammas), variant)


def order_condition_residuals(params: SchemeParams) -> tuple[float, float]:
    """Residuals (r1, r2) of the two order conditions of the p = 3 family.

    r1 = -5 + 6*gamma_1 + 6*gamma_2 + 12*alpha_f - 12*alpha_m
    r2 = -5 - 2*gamma_1 + 6*gamma_2 + 12*alpha_f - 12*gamma_1*alpha_f

    r1 = 0 is the third-order condition proper and holds for both closures
    (it fixes the equal-gamma constant at 5/12).  r2 = 0 is the auxiliary
    condition that distinguishes the remark-one closure: its gammas zero the
    entire bracket of the leading local-error term, at the price of a
    different stability region.  Equal-gamma instances generically have
    r2 != 0.  Third order only.
    """
    if params.p != 3:
        raise VariantUnsupported("order-condition residuals are defined for p=3")
    g1, g2 = params.gammas
    am, af = params.alpha_m, params.alpha_f
    r1 = -5.0 + 6.0 * g1 + 6.0 * g2 + 12.0 * af - 12.0 * am
    r2 = -5.0 - 2.0 * g1 + 6.0 * g2 + 12.0 * af - 12.0 * g1 * af
    return r1, r2


def params_from_rho(rho_inf: float, branch: RhoBranch = RhoBranch.MAIN) -> tuple[float, float]:
    """(alpha_m, alpha_f) on one solution branch of the rho_inf design system.

    ``rho_inf`` must lie in [0, 1].  The MAIN branch is defined on the whole
    interval; the three alternate branches have a pole at rho_inf = 1
    (denominators rho - 1 and 1 - rho^2) and raise :class:`PoleAtRho` there.
    """
    rho = float(rho_inf)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho_inf must be in [0, 1], got {rho}")
    if branch is not RhoBranch.MAIN and rho == 1.0:
        raise PoleAtRho(f"branch {branch.value} has a pole at rho_inf = 1")

    one_plus_sq = (rho + 1.0) ** 2
    if branch is RhoBranch.MAIN:
        am = (13.0 + 20.0 * rho - 5.0 * rho**2) / (12.0 * one_plus_sq)
        af = (1.0 + 3.0 * rho) / (2.0 * one_plus_sq)
    elif branch is RhoBranch.ALT1:
        am = (-13.0 - 31.0 * rho + rho**2 - 5.0 * rho**3) / (
            12.0 * one_plus_sq * (rho - 1.0)
        )
        af = (1.0 + 3.0 * rho) / (2.0 * one_plus_sq)
    elif branch is RhoBranch.ALT2:
        root = math.sqrt(7.0 + 18.0 * rho**2)
        am = (22.0 - 12.0 * rho + 5.0 * rho**2 + 3.0 * root) / (12.0 * (1.0 - rho**2))
        af = (5.0 + root) / (4.0 * (1.0 - rho**2))
    else:  # ALT3
        root = math.sqrt(7.0 + 18.0 * rho**2)
        am = (22.0 + 12.0 * rho + 5.0 * rho**2 - 3.0 * root) / (12.0 * (1.0 - rho**2))
        af = (5.0 - root) / (4.0 * (1.0 - rho**2))
    return am, af


def in_stability_region(alpha_m: float, alpha_f: float) -> bool:
    """Closed-form unconditional-stability predicate for the p = 3 family.

    True iff alpha_m >= 7/12 and 1/2 <= alpha_f <= alpha_m - 1/12, with all
    inequalities closed (the boundary counts as stable).
    """
    return alpha_m >= 7.0 / 12.0 and 0.5 <= alpha_f <= alpha_m - 1.0 / 12.0
