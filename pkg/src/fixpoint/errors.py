"""Exception hierarchy shared by every fixpoint module."""

from __future__ import annotations


class FixpointError(Exception):
    """Base class for all errors raised by the package."""


class InvalidInputError(FixpointError, ValueError):
    """An argument is out of range, malformed, or has the wrong dimension."""


class DomainError(FixpointError):
    """A point lies outside the domain of the mapping it was fed to."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class EvaluationError(FixpointError):
    """Evaluation failed (division by zero, no piecewise branch matched)."""


class ParseError(FixpointError):
    def __init__(self, message: str, position: int, token: str = ""):
        super().__init__(f"{message} at position {position}" + (f" (token {token!r})" if token else ""))
        self.position = position
        self.token = token


class UnknownIdentifierError(ParseError):
    pass


class PreconditionError(FixpointError):
    """A documented precondition (self-map, feasible certificate) does not hold."""


class ConvergenceError(FixpointError):
    """Iteration did not meet its stop rule; carries the partial trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
