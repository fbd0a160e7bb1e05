"""Exception types shared across the package."""

from __future__ import annotations


class ForethoughtError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ForethoughtError, ValueError):
    """An operation was called with input violating its precondition."""


class TraceSchemaError(ForethoughtError, ValueError):
    """A trace file record violates the trace schema."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class PatternInapplicableError(ForethoughtError, ValueError):
    """The requested self-correction pattern has no eligible site."""

    def __init__(self, pattern: str, message: str | None = None):
        self.pattern = pattern
        super().__init__(message or f"no eligible site for pattern {pattern!r}")


class CannotBalanceError(ForethoughtError, ValueError):
    """A dataset cannot be balanced 1:1."""

    def __init__(self, positives: int, negatives: int):
        self.positives = positives
        self.negatives = negatives
        super().__init__(
            f"cannot balance dataset: {positives} positives, {negatives} negatives"
        )


class ScorerUnavailableError(ForethoughtError, RuntimeError):
    """The remote trigger scorer could not be reached or answered non-200."""


class BackendError(ForethoughtError, RuntimeError):
    """A generation backend failed (transport or HTTP status)."""

    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class ConfigError(ForethoughtError, ValueError):
    """A benchmark configuration is invalid."""
