"""Exception types shared across the package."""


class GalphaError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(GalphaError):
    """A linear solve hit a pivot too small to trust."""


class NoConvergence(GalphaError):
    """An iterative eigenvalue computation did not converge."""


class OutOfTable(GalphaError):
    """Requested order has no tabulated scheme constant."""


class VariantUnsupported(GalphaError):
    """The requested operation is not defined for this scheme variant/order."""


class PoleAtRho(GalphaError):
    """The parameter formulas for this branch have a pole at the requested rho."""


class SingularAtT(GalphaError):
    """The one-step system matrix is singular at this value of lambda*tau."""


class DegenerateParams(GalphaError):
    """A limit matrix is undefined for these scheme parameters."""


class TooShort(GalphaError):
    """A sequence has too few entries for the requested check."""


class SolveFailed(GalphaError):
    """The implicit stage solve failed during time stepping."""


class StepSingular(GalphaError):
    """The implicit-stage shift makes the stage system singular."""


class AllAtRoundoff(GalphaError):
    """Every measured error sits below the round-off floor."""


class NoRoot(GalphaError):
    """The error functional does not change sign on the search interval."""
