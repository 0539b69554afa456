"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class StochOrderError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StochOrderError, ValueError):
    """An argument lies outside the domain of a function or family."""


class SupportError(StochOrderError, ValueError):
    """Supports are incompatible with the requested operation."""


class SpecError(StochOrderError, ValueError):
    """A distribution spec or expression could not be parsed.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif column is not None:
            where = f" (column {column})"
        super().__init__(message + where)


class ConvergenceError(StochOrderError, ArithmeticError):
    """A numerical procedure exhausted its budget; ``estimate`` is the best value reached."""

    def __init__(self, message: str, estimate: float | None = None):
        self.estimate = estimate
        super().__init__(message)


class DiagnosticError(StochOrderError, RuntimeError):
    """An internal consistency check failed (a theorem was numerically contradicted).

    Such failures point at tolerance misconfiguration or a bug rather than bad input.
    ``details`` carries whatever object helps debugging (a survival table, verdict list, ...).
    """

    def __init__(self, message: str, details: object = None):
        self.details = details
        super().__init__(message)


class CorpusError(StochOrderError):
    """A built-in scenario failed its load-time validation."""
