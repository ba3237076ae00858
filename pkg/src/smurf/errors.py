"""Exception types shared across the package."""


class SmurfError(Exception):
    """Base class for package-specific failures."""


class ConfigError(SmurfError):
    """Invalid or inconsistent run configuration."""


class SolverError(SmurfError):
    """The threshold solver failed (non-convergence or bad matrix)."""


class CoefficientFileError(SmurfError):
    """A coefficient file is missing fields, malformed, or violates invariants."""


class ExpressionError(SmurfError):
    """An expression failed to parse or bind. Carries the offending position."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
