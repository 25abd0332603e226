"""Exception types shared across the package."""


class FixdelayError(Exception):
    """Base class for all package-specific errors."""


class NoConvergence(FixdelayError):
    """A root-finding iteration exhausted its iteration budget."""


class DerivativeVanished(FixdelayError):
    """The lag derivative 1 - tau'(t) was non-positive at an iterate.

    Signals a violated slope assumption (tau'(t) < 1 is required).
    """


class OutOfDomain(FixdelayError):
    """An argument fell outside the domain of the requested function."""


class QuadratureFailure(FixdelayError):
    """Adaptive quadrature could not meet the requested tolerance."""


class CoefficientOverflow(FixdelayError):
    """Rationalising polynomial coefficients exceeded the precision budget."""


class Unsupported(FixdelayError):
    """The operation is not available for this representation."""


class DelayBeyondHistory(FixdelayError):
    """A delayed read fell before the start of the initial history."""


class DomainMismatch(FixdelayError):
    """Trajectories do not cover the interval needed for comparison."""


class NoAdmissiblePoint(FixdelayError):
    """Every point evaluated by the seed search violated monotonicity."""


class ConfigError(FixdelayError):
    """Configuration file is malformed or fails validation."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
