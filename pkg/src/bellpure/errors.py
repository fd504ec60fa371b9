"""Exception types shared across the package."""


class BellPureError(Exception):
    """Base class for all errors raised by bellpure."""


class DomainError(BellPureError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateInput(BellPureError, ValueError):
    """The requested map is undefined because the surviving pair never occurs."""


class ResourceLimit(BellPureError, RuntimeError):
    """The request exceeds a hard size limit (e.g. exhaustive enumeration)."""
