"""Exception hierarchy shared by all modules."""


class TropexError(Exception):
    """Base class for errors raised by this package."""


class DomainError(TropexError, ValueError):
    """An argument lies outside the domain of an operation."""


class OutsideConeError(DomainError):
    """A direction lies outside the cone on which a support function is defined."""


class NotConcaveError(DomainError):
    """A negative defect was met, so the support data is not of a convex domain."""


class PrecisionError(TropexError, ArithmeticError):
    """Working precision is insufficient for the requested result.

    ``last_trusted`` holds the index of the last term that is still certified.
    """

    def __init__(self, message, last_trusted=None):
        super().__init__(message)
        self.last_trusted = last_trusted
