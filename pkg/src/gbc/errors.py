"""Exception hierarchy for invalid inputs and numerical failures."""


class GbcError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(GbcError, ValueError):
    """Malformed array input: non-finite entries, wrong shape or type."""


class DimensionMismatchError(GbcError, ValueError):
    """Operands whose shapes cannot be combined."""


class NotPositiveDefiniteError(GbcError, ValueError):
    """A matrix required to be positive definite is not."""


class InvalidInstanceError(GbcError, ValueError):
    """A problem instance violating its invariants (weights, definiteness)."""


class DegenerateInstanceError(GbcError, ValueError):
    """A covariance constraint that is numerically zero."""


class NumericalBreakdownError(GbcError, RuntimeError):
    """A linear-algebra primitive failed on an iterate."""


class UnsupportedDimensionError(GbcError, ValueError):
    """A brute-force oracle asked to run outside its supported dimension."""


class InvalidSweepError(GbcError, ValueError):
    """A parameter sweep with no feasible grid point."""
