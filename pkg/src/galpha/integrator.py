"""Time marching for linear systems u' + A u = 0.

The state carried between steps stacks the solution together with its scaled
derivatives, block j holding tau^j * u^(j).  One step solves a single shifted
system

    (alpha_m * I + gamma_1 * alpha_f * tau * A) x = b

for the highest derivative block and then updates every lower block
explicitly, so the per-step cost is one implicit solve plus a handful of
matrix-vector products -- regardless of the order p.  For a scalar problem the
step operator is exactly multiplication by the amplification matrix G(lambda *
tau), which is the main correctness oracle used in the tests.

Problems are described by a :class:`LinearProblem`: an ``apply`` callback for
v -> A v and a ``shifted_solve`` callback for (c1 * I + sigma * A) x = b.
Factories are provided for scalar equations, dense matrices, and the standard
second-difference discretization of the heat equation on the unit interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from . import numkit
from .errors import GalphaError, SingularMatrix, SolveFailed, StepSingular
from .schemes import SchemeParams

__all__ = [
    "StateVector",
    "LinearProblem",
    "scalar_problem",
    "dense_problem",
    "heat_problem",
    "init_state",
    "step",
    "integrate",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class StateVector:
    """Stacked scheme state: row j holds tau^j * u^(j), shape (p, m).

    The scaling ties the stack to the step size it was built with; use
    :meth:`rescale` before stepping with a different tau.
    """

    stack: np.ndarray
    tau: float

    def __post_init__(self):
        stack = np.asarray(self.stack, dtype=complex)
        if stack.ndim != 2:
            raise ValueError(f"state stack must be 2-d (p, m), got shape {stack.shape}")
        if not (self.tau > 0.0 and np.isfinite(self.tau)):
            raise ValueError(f"tau must be positive and finite, got {self.tau}")
        object.__setattr__(self, "stack", stack)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def order(self) -> int:
        return self.stack.shape[0]

    @property
    def dim(self) -> int:
        return self.stack.shape[1]

    @property
    def value(self) -> np.ndarray:
        """The physical solution u (block 0)."""
        return self.stack[0]

    def derivative(self, j: int) -> np.ndarray:
        """The unscaled j-th derivative u^(j) = stack[j] / tau^j."""
        return self.stack[j] / self.tau**j

    def rescale(self, new_tau: float) -> "StateVector":
        """Same state expressed for a different step size."""
        ratio = new_tau / self.tau
        factors = ratio ** np.arange(self.order)
        return StateVector(self.stack * factors[:, None], new_tau)

    @property
    def norm(self) -> float:
        """Infinity norm over all blocks."""
        return float(np.abs(self.stack).max())


@dataclass(frozen=True)
class LinearProblem:
    """A linear constant-coefficient problem u' + A u = 0.

    ``apply(v)`` returns A v.  ``shifted_solve(c1, sigma, b)`` returns the
    solution of (c1 * I + sigma * A) x = b and raises :class:`StepSingular`
    when the shifted operator is singular.  Both callbacks must be safe for
    concurrent read-only use.
    """

    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    shifted_solve: Callable[[complex, complex, np.ndarray], np.ndarray]
    description: str = ""


def scalar_problem(lam) -> LinearProblem:
    """The test equation u' + lambda u = 0 (lambda may be complex)."""
    lam = complex(lam)

    def apply(v):
        return lam * v

    def shifted_solve(c1, sigma, b):
        den = c1 + sigma * lam
        if abs(den) <= 1e-14 * (abs(c1) + abs(sigma * lam) + 1.0):
            raise StepSingular(f"stage denominator vanishes: c1 + sigma*lambda = {den!r}")
        return b / den

    return LinearProblem(1, apply, shifted_solve, f"scalar lambda={lam}")


def dense_problem(a, description: str = "") -> LinearProblem:
    """Wrap a dense square matrix A as a :class:`LinearProblem`."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    m = a.shape[0]
    eye = np.eye(m)

    def apply(v):
        return a @ np.asarray(v, dtype=complex)

    def shifted_solve(c1, sigma, b):
        try:
            return numkit.solve(c1 * eye + sigma * a, b)
        except SingularMatrix as exc:
            raise StepSingular(f"shifted system singular: {exc}") from exc

    return LinearProblem(m, apply, shifted_solve, description or f"dense {m}x{m} system")


def heat_problem(n_interior: int, diffusivity: float = 1.0) -> LinearProblem:
    """Method-of-lines heat equation on (0, 1) with zero boundary values.

    A = (kappa / h^2) * tridiag(-1, 2, -1) on ``n_interior`` nodes,
    h = 1/(n+1).  The shifted solve runs the Thomas algorithm on the
    constant-coefficient tridiagonal system, O(n) per call.
    """
    n = int(n_interior)
    if n < 2:
        raise ValueError(f"need at least 2 interior nodes, got {n}")
    if not diffusivity > 0.0:
        raise ValueError(f"diffusivity must be positive, got {diffusivity}")
    h = 1.0 / (n + 1)
    s = diffusivity / h**2

    def apply(v):
        v = np.asarray(v, dtype=complex)
        out = 2.0 * v
        out[:-1] -= v[1:]
        out[1:] -= v[:-1]
        return s * out

    def shifted_solve(c1, sigma, b):
        return _thomas_constant(c1 + 2.0 * sigma * s, -sigma * s, b)

    return LinearProblem(
        n, apply, shifted_solve, f"heat rod, {n} interior nodes, kappa={diffusivity}"
    )


def _thomas_constant(diag, off, b) -> np.ndarray:
    """Solve the symmetric tridiagonal system with constant coefficients.

    Matrix rows are (off, diag, off); forward elimination aborts with
    :class:`StepSingular` on a vanishing pivot.
    """
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    floor = 1e-14 * (abs(diag) + 2.0 * abs(off) + 1.0)
    upper = np.empty(n, dtype=complex)
    x = np.empty(n, dtype=complex)
    piv = diag
    if abs(piv) <= floor:
        raise StepSingular(f"tridiagonal pivot {piv!r} below floor")
    upper[0] = off / piv
    x[0] = b[0] / piv
    for i in range(1, n):
        piv = diag - off * upper[i - 1]
        if abs(piv) <= floor:
            raise StepSingular(f"tridiagonal pivot {piv!r} below floor at row {i}")
        upper[i] = off / piv
        x[i] = (b[i] - off * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= upper[i] * x[i + 1]
    return x


def init_state(problem: LinearProblem, u0, p: int, tau: float) -> StateVector:
    """Exact-derivative initial state: block j = tau^j * (-A)^j u0."""
    if p < 2:
        raise ValueError(f"order p must be >= 2, got {p}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    u0 = np.atleast_1d(np.asarray(u0, dtype=complex))
    stack = np.empty((p, u0.shape[0]), dtype=complex)
    stack[0] = u0
    for j in range(1, p):
        stack[j] = -tau * problem.apply(stack[j - 1])
    return StateVector(stack, tau)


def step(params: SchemeParams, problem: LinearProblem, state: StateVector) -> StateVector:
    """Advance one step of size ``state.tau``.

    One call to ``problem.shifted_solve`` (shift sigma = gamma_1 * alpha_f *
    tau) produces the new highest block; the rest of the stack follows from
    explicit Taylor-ladder updates.  Exceptions from the solve are re-raised
    as :class:`SolveFailed` unless they already carry a package error type.
    """
    p = params.p
    if state.order != p:
        raise ValueError(f"state carries {state.order} blocks, scheme needs {p}")
    tau = state.tau
    U = state.stack
    am, af = params.alpha_m, params.alpha_f
    gam = params.gammas

    def t_apply(v):
        return tau * problem.apply(v)

    # Explicit share of each updated block; entry i still lacks its
    # gamma-weighted multiple of the implicit unknown.
    ladder = []
    for i in range(p - 1):
        g = gam[p - 2 - i]
        f = factorial(p - 1 - i)
        r = ((1.0 - g) / f) * U[p - 1]
        for j in range(i, p - 1):
            r = r + U[j] / factorial(j - i)
        ladder.append(r)

    # Right-hand side of the collocation row (mirrors the one-step matrices).
    fk = factorial(p - 2)
    if p == 2:
        rhs = (af - 1.0) * t_apply(U[0]) + (am - 1.0) * U[1]
    else:
        rhs = -t_apply(U[0]) + ((am - 1.0) / fk) * U[p - 1]
        for j in range(1, p - 2):
            rhs = rhs - U[j] / factorial(j - 1) - t_apply(U[j]) / factorial(j)
        rhs = rhs - U[p - 2] / factorial(p - 3) + ((af - 1.0) / fk) * t_apply(U[p - 2])

    b = fk * rhs - af * t_apply(ladder[-1])
    try:
        x = problem.shifted_solve(am, gam[0] * af * tau, b)
    except GalphaError:
        raise
    except Exception as exc:
        raise SolveFailed(f"shifted solve raised {type(exc).__name__}: {exc}") from exc

    new = np.empty_like(U)
    new[p - 1] = x
    for i in range(p - 1):
        g = gam[p - 2 - i]
        f = factorial(p - 1 - i)
        new[i] = ladder[i] + (g / f) * x
    return StateVector(new, tau)


def integrate(
    params: SchemeParams,
    problem: LinearProblem,
    u0,
    tau: float,
    t_end: float,
) -> list[tuple[float, np.ndarray]]:
    """Uniform march to t_end; returns [(t, u(t)), ...] including t = 0.

    The number of steps is round(t_end / tau).  Step failures are re-raised
    with the failing step index attached.
    """
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if t_end < tau:
        raise ValueError(f"t_end={t_end} does not cover one step of tau={tau}")
    n_steps = int(round(t_end / tau))
    state = init_state(problem, u0, params.p, tau)
    trajectory = [(0.0, state.value.copy())]
    for k in range(1, n_steps + 1):
        try:
            state = step(params, problem, state)
        except GalphaError as exc:
            raise type(exc)(f"step {k} of {n_steps}: {exc}") from exc
        trajectory.append((k * tau, state.value.copy()))
    return trajectory


def write_trajectory_csv(trajectory, path) -> None:
    """Write ``t,re_u_1,im_u_1,...`` rows with 17 significant digits."""
    first = np.atleast_1d(trajectory[0][1])
    header = "t," + ",".join(f"re_u_{k},im_u_{k}" for k in range(1, first.shape[0] + 1))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for t, u in trajectory:
            u = np.atleast_1d(u)
            cells = ",".join(f"{v.real:.17g},{v.imag:.17g}" for v in u)
            fh.write(f"{t:.17g},{cells}\n")
