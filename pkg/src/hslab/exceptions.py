"""Exceptions raised by hslab."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .scaling import ScalingReport


class HSLabError(Exception):
    """Base exception for all hslab errors."""

    pass


class ParameterError(HSLabError):
    """Raised when an exponent, dilation factor or grid is invalid."""

    pass


class MissingExponentError(ParameterError):
    """Raised when an inequality kind needs an exponent that is not set."""

    def __init__(self, exponent: str, kind: str):
        self.exponent = exponent
        self.kind = kind
        super().__init__(f"{kind} inequality requires exponent '{exponent}'")


class DimensionError(ParameterError):
    """Raised when a point or function has the wrong dimension."""

    pass


class DomainError(HSLabError):
    """Raised when a domain is malformed or unsupported for an operation."""

    pass


class DivergentIntegralError(HSLabError):
    """Raised when an integral is known to diverge."""

    def __init__(self, message: str, abscissa: float | None = None):
        self.abscissa = abscissa
        super().__init__(message)


class QuadratureError(HSLabError):
    """Raised when a quadrature cannot produce any usable value."""

    pass


class ZeroDenominatorError(QuadratureError):
    """Raised when a quotient has a vanishing right-hand side."""

    pass


class ScalingAbortedError(HSLabError):
    """Raised when a dilation experiment fails part way through the grid."""

    def __init__(self, message: str, partial: ScalingReport | Any):
        self.partial = partial
        super().__init__(message)


class ConfigError(HSLabError):
    """Raised when a run or sampler configuration is invalid."""

    pass
