"""Exception types shared across the package."""


class CyclicDDEError(Exception):
    """Base class for all package errors."""


class InputError(CyclicDDEError):
    """Malformed user input (bad JSON, schema violation, bad parameters)."""


class DomainError(CyclicDDEError):
    """Evaluation requested outside the domain of an object."""


class ValidationError(CyclicDDEError):
    """A structural invariant of a system definition is violated."""


class ZeroStateError(CyclicDDEError):
    """The sign-change functional is undefined at the zero state."""


class DivergenceError(CyclicDDEError):
    """A trajectory blew up numerically."""

    def __init__(self, message, blowup_time=None):
        super().__init__(message)
        self.blowup_time = blowup_time


class MultipleEigenvalueError(CyclicDDEError):
    """A simple leading root was required but a multiple root was found."""


class UnsupportedSystemError(CyclicDDEError):
    """The operation is not defined for this system (e.g. unbounded feedback)."""


class InsufficientDataError(CyclicDDEError):
    """Not enough data to carry out the requested analysis."""
