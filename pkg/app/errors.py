"""app.errors

Central error types to keep error handling consistent.

The CLI maps these onto exit codes (see scripts/verify.py).
"""

from __future__ import annotations

from typing import Any


class AppError(Exception):
    """Base application error."""


class ConfigError(AppError):
    """Raised when runtime settings or a suite config document are missing or invalid."""


class ValidationError(AppError):
    """Raised when a structural condition is violated (builtin parameters, algebra data, config values)."""


class DimensionError(AppError):
    """Raised on matrix or field shape mismatch."""


class SingularMatrixError(AppError):
    """Raised when a matrix that must be inverted is singular."""


class EvaluationError(AppError):
    """Raised when a field or slot evaluation produces non-finite or ill-conditioned values."""

    def __init__(self, message: str, point: Any = None):
        super().__init__(message if point is None else f"{message} (at x={point})")
        self.point = point


class PreconditionError(AppError):
    """Raised when a symmetry or invariance precondition fails; carries the measured defect."""

    def __init__(self, message: str, defect: float | None = None):
        super().__init__(message if defect is None else f"{message} (measured defect {defect:.3e})")
        self.defect = defect


class UsageError(AppError):
    """Raised for unknown suites and malformed command line arguments."""
