"""Exception types shared across the package."""

from __future__ import annotations


class BalsubError(Exception):
    """Base class for all library errors."""


class GraphFormatError(BalsubError, ValueError):
    """Malformed edge-list or certificate text."""


class NoPath(BalsubError):
    """The two vertex sets are disconnected once the avoid set is deleted."""


class TooLong(BalsubError):
    """A path exists, but the shortest one exceeds the length cap."""

    def __init__(self, message: str, length: int):
        super().__init__(message)
        self.length = length


class Insufficient(BalsubError):
    """Not enough vertices (expansion members, far-apart cores, ...) were found."""

    def __init__(self, message: str, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class NoCycle(BalsubError):
    """The (remaining) graph is a forest."""


class InsufficientExpansion(BalsubError):
    """Expansions of the requested size could not be grown disjointly."""


class ParityMismatch(BalsubError):
    """Requested path length has the wrong parity for the endpoints."""


class Unsatisfiable(BalsubError):
    """A search exhausted its resources; ``stage`` names where it stopped."""

    def __init__(self, message: str, stage: str = "", best=None):
        super().__init__(message)
        self.stage = stage
        self.best = best


class PreconditionUnmet(BalsubError):
    def __init__(self, message: str, supply: int | None = None):
        super().__init__(message)
        self.supply = supply


class BudgetExceeded(BalsubError):
    """Exhaustive search ran out of budget; ``best`` is a valid lower bound."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ExtractionFailed(BalsubError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ChainError(BalsubError):
    """Adjuster chaining stopped at ``stage``; ``partial`` is the largest adjuster built."""

    def __init__(self, message: str, stage: int, partial=None, cause: Exception | None = None):
        super().__init__(message)
        self.stage = stage
        self.partial = partial
        self.cause = cause
