"""Spectral-radius scanning of the third-order two-parameter family.

The stability question for u' + lambda*u = 0 is decided by the spectral
radius of G(T) over the relevant range of T = lambda*tau.  The closed-form
analysis of this family is a real-axis statement: the region

    alpha_m >= 7/12,   1/2 <= alpha_f <= alpha_m - 1/12

guarantees radius <= 1 for every real T >= 0 including both limits.  The
default sample set used for the scan therefore walks the real axis (log-spaced
over twelve decades) and appends the two closed-form limit matrices.

Off-axis behaviour is genuinely different and can be probed with
:func:`ray_t_samples`: measured radii exceed 1 along rays close to the
imaginary axis even at parameter points well inside the region above (e.g.
radius ~= 1.04 at (alpha_m, alpha_f) = (1, 0.6) for arg T = 0.98*pi/2,
|T| = 1).  Such samples are deliberately not part of the stability decision,
which mirrors the real-axis theory; pass them explicitly when you want a
sector diagnosis.

A cell is declared stable when its worst sampled radius is at most 1 + 1e-9
and no sample produced a (numerically) repeated root on the unit circle;
repeated unit roots grow polynomially in exact arithmetic, so they are deemed
unstable even at radius exactly 1.  The repeated-root window (1e-7 both for
the pair gap and for the distance of each modulus from 1) is applied to every
eigenvalue pair, real or complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .amplification import amplification_matrix, limit_matrix_inf, limit_matrix_zero
from .errors import PoleAtRho, SingularAtT
from .schemes import (
    RhoBranch,
    SchemeParams,
    Variant,
    in_stability_region,
    make_scheme,
    params_from_rho,
    remark_one_gammas,
)

__all__ = [
    "RADIUS_TOL",
    "REPEAT_WINDOW",
    "default_t_samples",
    "ray_t_samples",
    "RadiusReport",
    "worst_case_radius",
    "GridSpec",
    "StabilityMap",
    "scan_region",
    "verify_rho_control",
    "RhoPoint",
    "rho_curve",
    "write_stability_csv",
]

#: Stable means worst radius <= 1 + RADIUS_TOL (and no repeated unit root).
RADIUS_TOL = 1e-9

#: Window for flagging repeated roots on the unit circle.
REPEAT_WINDOW = 1e-7

# Pole guard for the one-step solve: cells whose L-determinant is this small
# (relative to 1 + |T|) are marked unstable outright instead of dividing by ~0.
_DET_FLOOR = 1e-8


def default_t_samples(n: int = 48, lo: float = 1e-4, hi: float = 1e8) -> np.ndarray:
    """Real, positive, log-spaced T samples used for stability decisions."""
    return np.logspace(np.log10(lo), np.log10(hi), n)


def ray_t_samples(angle: float, n: int = 16, lo: float = 1e-4, hi: float = 1e8) -> np.ndarray:
    """Log-spaced samples along the ray arg(T) = angle (off-axis diagnostics)."""
    return default_t_samples(n, lo, hi) * complex(np.cos(angle), np.sin(angle))


@dataclass(frozen=True)
class RadiusReport:
    """Worst sampled spectral radius plus the repeated-unit-root flag."""

    radius: float
    repeated_unit_root: bool

    @property
    def stable(self) -> bool:
        return self.radius <= 1.0 + RADIUS_TOL and not self.repeated_unit_root


def _pair_repeat_flags(eigs: np.ndarray) -> np.ndarray:
    """Repeated-unit-root flag per stacked eigenvalue triple (..., d)."""
    d = eigs.shape[-1]
    near_one = np.abs(np.abs(eigs) - 1.0) <= REPEAT_WINDOW
    flag = np.zeros(eigs.shape[:-1], dtype=bool)
    for i in range(d):
        for j in range(i + 1, d):
            close = np.abs(eigs[..., i] - eigs[..., j]) <= REPEAT_WINDOW
            flag |= close & near_one[..., i] & near_one[..., j]
    return flag


def _stacked_lr3(am, af, g1, g2, t):
    """Stacked (n, 3, 3) L and R for 1-D cell arrays at one scalar T."""
    n = am.shape[0]
    L = np.zeros((n, 3, 3), dtype=complex)
    R = np.zeros((n, 3, 3), dtype=complex)
    L[:, 0, 0] = 1.0
    L[:, 0, 2] = -g2 / 2.0
    L[:, 1, 1] = 1.0
    L[:, 1, 2] = -g1
    L[:, 2, 1] = af * t
    L[:, 2, 2] = am
    R[:, 0, 0] = 1.0
    R[:, 0, 1] = 1.0
    R[:, 0, 2] = (1.0 - g2) / 2.0
    R[:, 1, 1] = 1.0
    R[:, 1, 2] = 1.0 - g1
    R[:, 2, 0] = -t
    R[:, 2, 1] = (af - 1.0) * t - 1.0
    R[:, 2, 2] = am - 1.0
    return L, R


def _accumulate_eigs(eigs, radius, repeated, valid=None):
    r = np.abs(eigs).max(axis=-1)
    f = _pair_repeat_flags(eigs)
    if valid is not None:
        r = np.where(valid, r, np.inf)
        f &= valid
    np.maximum(radius, r, out=radius)
    repeated |= f
    return radius, repeated


def _scan_cells_p3(am, af, g1, g2, t_samples, with_limit_inf):
    """Vectorized worst-radius kernel for third-order cells.

    All of ``am, af, g1, g2`` are flat arrays of equal length.  Returns
    (radius, repeated) arrays.  The T->0 limit matrix is always included
    (cells with alpha_m = 0 have no finite limit and are marked unstable);
    the T->inf closed form is included only when ``with_limit_inf``.
    """
    ncell = am.shape[0]
    radius = np.zeros(ncell)
    repeated = np.zeros(ncell, dtype=bool)

    for t in np.asarray(t_samples):
        L, R = _stacked_lr3(am, af, g1, g2, t)
        det = am + g1 * af * t
        valid = np.abs(det) > _DET_FLOOR * (1.0 + abs(t))
        L[~valid] = np.eye(3)
        eigs = np.linalg.eigvals(np.linalg.solve(L, R))
        _accumulate_eigs(eigs, radius, repeated, valid)

    # T -> 0 limit.
    valid = am != 0.0
    ams = np.where(valid, am, 1.0)
    A0 = np.zeros((ncell, 3, 3), dtype=complex)
    A0[:, 0, 0] = 1.0
    A0[:, 0, 1] = 1.0 - g2 / ams
    A0[:, 0, 2] = 0.5 - g2 / ams
    A0[:, 1, 1] = 1.0 - g1 / ams
    A0[:, 1, 2] = 1.0 - g1 / ams
    A0[:, 2, 1] = -1.0 / ams
    A0[:, 2, 2] = 1.0 - 1.0 / ams
    _accumulate_eigs(np.linalg.eigvals(A0), radius, repeated, valid)

    if with_limit_inf:
        valid = (af != 0.0) & (g1 != 0.0)
        afs = np.where(valid, af, 1.0)
        g1s = np.where(valid, g1, 1.0)
        Ainf = np.zeros((ncell, 3, 3), dtype=complex)
        Ainf[:, 0, 0] = 1.0 - 0.5 / afs
        Ainf[:, 0, 1] = 1.0 - 0.5 / afs
        Ainf[:, 1, 0] = -1.0 / afs
        Ainf[:, 1, 1] = 1.0 - 1.0 / afs
        Ainf[:, 2, 0] = -1.0 / (g1s * afs)
        Ainf[:, 2, 1] = -1.0 / (g1s * afs)
        Ainf[:, 2, 2] = 1.0 - 1.0 / g1s
        _accumulate_eigs(np.linalg.eigvals(Ainf), radius, repeated, valid)

    return radius, repeated


def worst_case_radius(params: SchemeParams, t_samples=None) -> RadiusReport:
    """Worst spectral radius of G over the sample set, plus limit matrices.

    For p = 3 the T->0 limit matrix is appended for both closures and the
    T->inf closed form for the equal-gamma closure (its role for the
    remark-one closure is covered by the largest real samples).  A singular
    one-step system at some sample marks the parameters unstable
    (radius = inf) instead of aborting the scan.
    """
    samples = default_t_samples() if t_samples is None else np.asarray(t_samples)
    if params.p == 3:
        one = np.array([0.0])
        g1, g2 = params.gammas
        radius, repeated = _scan_cells_p3(
            one + params.alpha_m,
            one + params.alpha_f,
            one + g1,
            one + g2,
            samples,
            with_limit_inf=params.variant is Variant.EQUAL_GAMMA,
        )
        return RadiusReport(float(radius[0]), bool(repeated[0]))

    # Generic path for other orders: per-sample dense eigenvalues, no limits.
    radius = 0.0
    repeated = False
    for t in samples:
        try:
            eigs = numkit.eigenvalues(amplification_matrix(params, t))
        except SingularAtT:
            return RadiusReport(np.inf, repeated)
        radius = max(radius, float(np.abs(eigs).max()))
        repeated = repeated or bool(_pair_repeat_flags(eigs[None, :])[0])
    return RadiusReport(radius, repeated)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (alpha_m, alpha_f) grid, inclusive of endpoints."""

    alpha_m_min: float = 0.0
    alpha_m_max: float = 1.5
    n_alpha_m: int = 200
    alpha_f_min: float = 0.0
    alpha_f_max: float = 1.5
    n_alpha_f: int = 200

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.alpha_m_min, self.alpha_m_max, self.n_alpha_m),
            np.linspace(self.alpha_f_min, self.alpha_f_max, self.n_alpha_f),
        )


@dataclass
class StabilityMap:
    """Scan result on a parameter grid (row index = alpha_m, column = alpha_f)."""

    alpha_m: np.ndarray
    alpha_f: np.ndarray
    radius: np.ndarray
    repeated_root: np.ndarray
    variant: Variant
    t_samples: np.ndarray = field(repr=False)

    @property
    def stable(self) -> np.ndarray:
        return (self.radius <= 1.0 + RADIUS_TOL) & ~self.repeated_root


def scan_region(
    variant: Variant = Variant.EQUAL_GAMMA,
    grid: GridSpec | None = None,
    t_samples=None,
) -> StabilityMap:
    """Scan the grid and classify every cell, identically to per-cell calls.

    Cells are independent; this implementation evaluates them as one stacked
    array per T sample, which is deterministic by construction.  The gamma
    weights per cell follow the requested closure.
    """
    grid = grid or GridSpec()
    samples = default_t_samples() if t_samples is None else np.asarray(t_samples)
    am_axis, af_axis = grid.axes()
    AM, AF = np.meshgrid(am_axis, af_axis, indexing="ij")
    am, af = AM.ravel(), AF.ravel()
    if variant is Variant.EQUAL_GAMMA:
        g1 = 5.0 / 12.0 + am - af
        g2 = g1
    else:
        g1, g2 = remark_one_gammas(am, af)
    radius, repeated = _scan_cells_p3(
        am, af, g1, g2, samples, with_limit_inf=variant is Variant.EQUAL_GAMMA
    )
    shape = (grid.n_alpha_m, grid.n_alpha_f)
    return StabilityMap(
        alpha_m=am_axis,
        alpha_f=af_axis,
        radius=radius.reshape(shape),
        repeated_root=repeated.reshape(shape),
        variant=variant,
        t_samples=samples,
    )


def verify_rho_control(rho_inf: float, branch: RhoBranch = RhoBranch.MAIN) -> float:
    """max |eig(Ainf)| - rho_inf at the branch parameters (equal-gamma closure).

    The branch formulas place a *double* eigenvalue of modulus rho_inf in the
    stiff limit; the remaining eigenvalue equals (rho-1)/(1+3*rho) on the MAIN
    and ALT1 branches, so the returned defect is zero only where that third
    mode is dominated, i.e. for rho_inf >= 1/3.  Below that the defect equals
    (1-rho)/(1+3*rho) - rho.  The ALT2/ALT3 branches leave a complex pair of
    larger modulus at every rho_inf < 1.  This is the measured behaviour of
    the closed-form limit matrix itself; see the stability notes in README.
    """
    am, af = params_from_rho(rho_inf, branch)
    params = make_scheme(3, am, af, Variant.EQUAL_GAMMA)
    eigs = numkit.eigenvalues(limit_matrix_inf(params))
    return float(np.abs(eigs).max() - rho_inf)


@dataclass(frozen=True)
class RhoPoint:
    """One sample of a rho-parameterized branch; ``pole`` marks undefined rows."""

    rho: float
    alpha_m: float | None
    alpha_f: float | None
    inside_region: bool | None
    pole: bool


def rho_curve(branch: RhoBranch, n_points: int = 101) -> list[RhoPoint]:
    """Uniform samples of one branch over rho_inf in [0, 1], poles marked."""
    if n_points < 2:
        raise ValueError("need at least two samples")
    points = []
    for k in range(n_points):
        rho = k / (n_points - 1)
        try:
            am, af = params_from_rho(rho, branch)
        except PoleAtRho:
            points.append(RhoPoint(rho, None, None, None, True))
            continue
        points.append(RhoPoint(rho, am, af, in_stability_region(am, af), False))
    return points


def write_stability_csv(smap: StabilityMap, path) -> None:
    """Write the map row-major as ``alpha_m,alpha_f,radius,stable`` (17 digits)."""
    stable = smap.stable
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("alpha_m,alpha_f,radius,stable\n")
        for i, am in enumerate(smap.alpha_m):
            for j, af in enumerate(smap.alpha_f):
                fh.write(
                    f"{am:.17g},{af:.17g},{smap.radius[i, j]:.17g},"
                    f"{1 if stable[i, j] else 0}\n"
                )
