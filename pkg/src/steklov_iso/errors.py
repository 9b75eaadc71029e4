"""Exception types raised across the package."""

from __future__ import annotations


class SteklovError(Exception):
    """Base class for all package errors."""


class AlphaOutOfRange(SteklovError, ValueError):
    pass


class DimTooSmall(SteklovError, ValueError):
    pass


class SingularEvaluation(SteklovError, ValueError):
    pass


class WeightInvalid(SteklovError, ValueError):
    pass


class NoRootInBracket(SteklovError, ValueError):
    pass


class EllOutOfRange(SteklovError, ValueError):
    pass


class IntegrationFailure(SteklovError, RuntimeError):
    pass


class DegenerateDomain(SteklovError, ValueError):
    pass


class OriginOnBoundary(SteklovError, ValueError):
    pass


class IntegrabilityViolation(SteklovError, ValueError):
    pass


class QuadratureError(SteklovError, RuntimeError):
    pass


class RootFindFailure(SteklovError, RuntimeError):
    pass


class MonotoneCondViolated(SteklovError, ValueError):
    pass


class MeshFailure(SteklovError, RuntimeError):
    pass


class FactorizationFailure(SteklovError, RuntimeError):
    pass


class ZeroModeMismatch(SteklovError, RuntimeError):
    """The smallest discrete eigenpair is not the constant mode."""


class ConfigError(SteklovError, ValueError):
    """Invalid suite configuration; ``line`` points into the source text when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
