"""Exception types raised by the library."""


class RefTokenError(Exception):
    """Base class for all library errors."""


class InvalidParameter(RefTokenError, ValueError):
    """A physical or numerical parameter is out of its allowed range."""


class InvalidState(RefTokenError, ValueError):
    """A state container violates its construction invariants."""


class BasisMismatch(RefTokenError, ValueError):
    """An operation received a state expressed in the wrong basis or grid."""


class SupportEscape(RefTokenError, ValueError):
    """A state carries non-negligible weight at the edge of its grid."""


class QuadratureGuard(RefTokenError, RuntimeError):
    """A quadrature rule cannot meet its accuracy contract as configured."""


class OptimizationError(RefTokenError, RuntimeError):
    """A numerical search failed to bracket or converge on an optimum."""
