"""Shared helpers for the galpha test suite."""

import numpy as np
import pytest

# One line per acceptance criterion, echoed at the end of the run so the
# verdicts are visible without digging through captured stdout.
ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def assert_spectrum(got, expected, tol=1e-8):
    """Order-insensitive multiset comparison of eigenvalue arrays.

    Greedily matches each expected eigenvalue to the nearest remaining
    computed one, so degenerate spectra are handled without relying on any
    particular ordering from the eigensolver.
    """
    got = list(np.atleast_1d(np.asarray(got, dtype=complex)))
    expected = list(np.atleast_1d(np.asarray(expected, dtype=complex)))
    assert len(got) == len(expected), (
        f"got {len(got)} eigenvalues, expected {len(expected)}"
    )
    for want in expected:
        k = min(range(len(got)), key=lambda i: abs(got[i] - want))
        assert abs(got[k] - want) <= tol, (
            f"no eigenvalue within {tol:g} of {want}; closest was {got[k]} "
            f"(distance {abs(got[k] - want):.3e})"
        )
        del got[k]


@pytest.fixture
def eig_match():
    return assert_spectrum


def closed_form_g3(alpha_m, alpha_f, gamma_1, gamma_2, t):
    """Entrywise third-order amplification matrix, written out by hand.

    No linear solve is involved, so this is an oracle that is independent of
    both the matrix builder and the stepping code.
    """
    am, af, g1, g2 = alpha_m, alpha_f, gamma_1, gamma_2
    d = am + g1 * af * t
    return np.array(
        [
            [
                (2 * am - (g2 - 2 * g1 * af) * t) / (2 * d),
                (2 * am + 2 * g1 * af * t - g2 * (1 + t)) / (2 * d),
                (am + g1 * af * t - g2 * (1 + af * t)) / (2 * d),
            ],
            [
                -g1 * t / d,
                (am - g1 + g1 * (af - 1) * t) / d,
                (am - g1) / d,
            ],
            [
                -t / d,
                -(1 + t) / d,
                (am - 1 + (g1 - 1) * af * t) / d,
            ],
        ],
        dtype=complex,
    )


def region_draws(rng, n, margin=0.01):
    """Random (alpha_m, alpha_f) pairs inside the unconditional-stability region."""
    alpha_m = rng.uniform(7.0 / 12.0 + margin, 1.4, size=n)
    alpha_f = rng.uniform(0.5, alpha_m - 1.0 / 12.0, size=n)
    return np.column_stack([alpha_m, alpha_f])
