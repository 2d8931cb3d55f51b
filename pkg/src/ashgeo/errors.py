"""Exception types shared across the package.

Two broad families matter for the CLI exit codes: ConfigError (malformed or
inconsistent input, exit 2) and ComputationError (a numerically meaningful
failure such as a degenerate metric or an out-of-domain evaluation, exit 1).
"""

from __future__ import annotations


class AshgeoError(Exception):
    """Base class for everything raised deliberately by this package."""


class ComputationError(AshgeoError):
    """A computation failed for a numerical or geometric reason."""


class ConfigError(AshgeoError):
    """User-supplied configuration is invalid.

    field_path points at the offending entry, e.g. "model.slice.metric".
    """

    def __init__(self, message: str, field_path: str | None = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class ExprParseError(ConfigError):
    """Syntax error in an expression string; position is a 0-based offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class UnknownIdentifierError(ExprParseError):
    """Expression refers to a name that is neither a variable nor a function."""


class EvalDomainError(ComputationError):
    """Evaluation left the real domain (division by zero, sqrt of a negative...)."""


class UnboundVariableError(ComputationError):
    """Evaluation binding misses one or more free variables."""


class DegenerateMetricError(ComputationError):
    """Metric failed a positivity or invertibility requirement at a point."""


class NonOrthonormalFrameError(ComputationError):
    """A frame that must be q-orthonormal is not, beyond tolerance."""


class OutOfDomainError(ComputationError):
    """A point or path leaves the declared chart domain."""
