"""Small dense complex linear-algebra kernel.

Everything here targets the tiny matrices this package works with (one-step
matrices of dimension p <= 12).  ``solve`` is a hand-rolled LU factorization
with partial pivoting so that near-singularity is reported through an explicit
pivot threshold; ``eigenvalues`` defers to LAPACK, which is the right tool for
dense nonsymmetric spectra; ``principal_minor_sums`` enumerates index subsets
directly, which is affordable up to dimension 12 and is used to cross-check
characteristic polynomials against independently computed eigenvalues.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import NoConvergence, SingularMatrix

__all__ = ["solve", "eigenvalues", "principal_minor_sums"]

#: Relative pivot threshold below which a solve is reported as singular.
PIVOT_RTOL = 1e-14

#: Largest dimension accepted by the spectral helpers.
MAX_DIM = 12


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix entries must be finite")
    return a


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    Arguments
    ---------
    a : (n, n) array_like, complex
    b : (n,) or (n, k) array_like, complex

    Returns
    -------
    x : ndarray with the same trailing shape as ``b``.

    Raises
    ------
    SingularMatrix
        If any pivot magnitude falls below ``PIVOT_RTOL * max|a|``.
    """
    a = _as_square(a)
    b = np.asarray(b, dtype=complex)
    n = a.shape[0]
    squeeze = b.ndim == 1
    rhs = b.reshape(n, -1).copy()
    lu = a.copy()

    scale = np.abs(a).max() if n else 0.0
    threshold = PIVOT_RTOL * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if np.abs(lu[p, k]) <= threshold:
            raise SingularMatrix(f"pivot {np.abs(lu[p, k]):.3e} at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        factors = lu[k + 1:, k] / lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(factors, lu[k, k + 1:])
        rhs[k + 1:] -= np.outer(factors, rhs[k])

    x = np.empty_like(rhs)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x[:, 0] if squeeze else x


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a small dense complex matrix, with multiplicity.

    Backed by LAPACK's QR iteration (``numpy.linalg.eigvals``); the iteration
    cap is LAPACK's own (roughly 30 sweeps per eigenvalue), surfaced here as
    ``NoConvergence``.  Dimension is capped at ``MAX_DIM``.
    """
    a = _as_square(a)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds cap {MAX_DIM}")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def principal_minor_sums(a) -> np.ndarray:
    """Sums of j-by-j principal minors of ``a`` for j = 1 .. n.

    Computed exactly by enumeration over index subsets, so the result is
    independent of any eigenvalue computation.  Entry ``j - 1`` of the
    returned array equals the sum over all principal j-by-j submatrix
    determinants; the characteristic polynomial of ``a`` is then

        det(a - mu*I) = (-mu)^n + sum_j (-mu)^(n-j) * minors[j-1].
    """
    a = _as_square(a)
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds cap {MAX_DIM}")
    sums = np.zeros(n, dtype=complex)
    for j in range(1, n + 1):
        total = 0.0 + 0.0j
        for idx in combinations(range(n), j):
            sub = a[np.ix_(idx, idx)]
            total += np.linalg.det(sub)
        sums[j - 1] = total
    return sums
