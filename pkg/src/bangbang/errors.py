"""Exception hierarchy shared by all modules."""


class BangBangError(Exception):
    """Base class for library errors."""


class DomainError(BangBangError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(BangBangError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    Attributes
    ----------
    error_estimate : float
        Achieved absolute error estimate when the budget ran out.
    """

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class ResourceError(BangBangError, MemoryError):
    """A configured size budget would be exceeded."""


class TruncationError(ResourceError):
    """Fock truncation leaves too much thermal weight above ``n_max``."""


class ConfigError(BangBangError, ValueError):
    """Malformed run configuration. Message carries ``source:line``."""
