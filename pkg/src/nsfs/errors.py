"""Exception types raised by the library."""


class NSFSError(Exception):
    """Base class for all library errors."""


class ParameterError(NSFSError, ValueError):
    """Invalid or inconsistent input parameters."""


class NumericalError(NSFSError, ArithmeticError):
    """A computation could not reach its stated tolerance."""


class NormalizationError(NumericalError):
    """A state norm underflowed below the representable threshold."""


class TruncationError(NumericalError):
    """Probability mass leaked beyond the retained photon-number cutoff."""
