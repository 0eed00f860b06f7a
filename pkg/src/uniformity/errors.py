"""Shared exception types."""


class ValidationError(ValueError):
    """Raised when inputs fail a precondition (bad prime, malformed text, ...)."""


class CostError(RuntimeError):
    """Raised when a requested computation exceeds the configured cost budget."""
