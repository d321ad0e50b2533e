"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument is out of its documented range."""


class PreconditionError(ValueError):
    """Inputs are well formed but violate an operation's precondition."""


class FormatError(ValueError):
    """A serialized object could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotFound(Exception):
    """An exhaustive search completed without finding an object.

    This is a definitive negative.  ``explored`` counts search states.
    """

    def __init__(self, message: str, explored: int | None = None, stats: dict | None = None):
        self.explored = explored
        self.stats = stats or {}
        super().__init__(message)


class BudgetExceeded(Exception):
    """A search ran out of its node budget; the answer is unknown."""

    def __init__(self, message: str, explored: int):
        self.explored = explored
        super().__init__(message)


class Infeasible(Exception):
    """A heuristic construction could not meet its target.

    Unlike NotFound this is not a proof of non-existence.
    """

    def __init__(self, message: str, bottleneck=None):
        self.bottleneck = bottleneck
        super().__init__(message)


class NoAbsorber(Exception):
    def __init__(self, vertex: int, coverage: dict | None = None):
        self.vertex = vertex
        self.coverage = coverage or {}
        super().__init__(f"no usable absorber for vertex {vertex}")


class LiftFailure(Exception):
    def __init__(self, position: int, message: str = ""):
        self.position = position
        super().__init__(message or f"no admissible extender at position {position}")


class InvariantError(AssertionError):
    """An internal postcondition failed; indicates a bug or a bad input object."""
