"""Exponent parameters, weights and domains of the Hardy–Sobolev inequalities.

Conventions used throughout the package:

* target weight ``|x|^{-mu}``,
* pair weight ``W_alpha(x, y) = |x|^{alpha1} |y|^{alpha2}``,
* kernel ``|x - y|^{-beta}``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import DomainError, MissingExponentError, ParameterError


class InequalityKind(str, Enum):
    """The four inequality families."""

    ORDINARY = "ordinary"
    MIXED = "mixed"
    DERIVATIVE = "derivative"
    SURFACE = "surface"


class ValidationMode(str, Enum):
    """Parameter validation modes."""

    STRICT = "strict"
    PERMISSIVE = "permissive"


REQUIRED_EXPONENTS: dict[InequalityKind, tuple[str, ...]] = {
    InequalityKind.ORDINARY: ("p", "q"),
    InequalityKind.MIXED: ("p", "q", "r"),
    InequalityKind.DERIVATIVE: ("p", "s"),
    InequalityKind.SURFACE: ("p", "q"),
}


class InequalityParams(BaseModel):
    """Exponent and weight tuple of one inequality instance."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    d: int = Field(ge=1, description="Space dimension")
    p: float | None = Field(default=None, description="Seminorm exponent")
    q: float | None = Field(default=None, description="Target exponent")
    r: float | None = Field(default=None, description="Mixed-kind target exponent")
    s: float | None = Field(default=None, description="Gradient exponent")
    alpha1: float = Field(default=0.0, description="Pair weight exponent on x")
    alpha2: float = Field(default=0.0, description="Pair weight exponent on y")
    beta: float = Field(default=0.0, description="Kernel exponent")
    mu: float = Field(default=0.0, description="Target weight exponent")
    lam: float | None = Field(default=None, alias="lambda", description="λ")

    @field_validator("p", "q", "r", "s")
    @classmethod
    def validate_exponent(cls, v: float | None) -> float | None:
        """Integrability exponents are finite and at least 1."""
        if v is not None and (not math.isfinite(v) or v < 1.0):
            raise ValueError("Exponents must be finite and at least 1")
        return v

    @field_validator("alpha1", "alpha2", "beta", "mu")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """Weight exponents must be finite."""
        if not math.isfinite(v):
            raise ValueError("Weight exponents must be finite")
        return v

    @field_validator("lam")
    @classmethod
    def validate_lambda(cls, v: float | None) -> float | None:
        """λ lies in (0, 1)."""
        if v is not None and not 0.0 < v < 1.0:
            raise ValueError("lambda must lie in (0, 1)")
        return v

    @property
    def alpha(self) -> float:
        """Total pair weight exponent."""
        return self.alpha1 + self.alpha2

    def require(self, kind: InequalityKind | str) -> None:
        """Raise ``MissingExponentError`` for the first absent exponent of ``kind``."""
        kind = InequalityKind(kind)
        for name in REQUIRED_EXPONENTS[kind]:
            if getattr(self, name) is None:
                raise MissingExponentError(name, kind.value)

    def exponent(self, name: str) -> float:
        """Return a required exponent, raising if it is unset."""
        value = getattr(self, name)
        if value is None:
            raise MissingExponentError(name, "this functional")
        return float(value)


def mu_from_q(lam: float, d: int, q: float) -> float:
    """μ = λ·d·q (convention stated after the ordinary inequality)."""
    return lam * d * q


def mu_from_p(lam: float, d: int, p: float) -> float:
    """μ = λ·d·p (convention used by the blow-up theorems)."""
    return lam * d * p


def validate_params(
    params: InequalityParams,
    mode: ValidationMode | str = ValidationMode.STRICT,
    kind: InequalityKind | str | None = None,
) -> list[str]:
    """Return the violated admissibility constraints, in a fixed order.

    Args:
        params: Parameters to check (never mutated)
        mode: ``strict`` checks (Ca)/(Cb) literally; ``permissive`` checks only
            the integrability the quadrature engine needs
        kind: When given, exponents required by this kind must be present

    Returns:
        Violated constraints; empty when the tuple is admissible

    Raises:
        MissingExponentError: If ``kind`` needs an exponent that is unset
    """
    if kind is not None:
        params.require(kind)

    d = params.d
    violations: list[str] = []
    if ValidationMode(mode) is ValidationMode.STRICT:
        if not params.mu < d:
            violations.append("mu < d")
        if not params.alpha1 > -d:
            violations.append("alpha1 > -d")
        if not params.alpha2 > -d:
            violations.append("alpha2 > -d")
        if not params.beta < 1:
            violations.append("beta < 1")
        if not params.alpha1 + params.alpha2 - params.beta > -d:
            violations.append("alpha1 + alpha2 - beta > -d")
        if params.lam is not None and not params.lam < 1.0 / (2 * d - 1):
            violations.append("lambda < 1/(2d - 1)")
    else:
        if not 2 * d + params.alpha1 + params.alpha2 - params.beta > 0:
            violations.append("2d + alpha1 + alpha2 - beta > 0")
        if not params.mu < d:
            violations.append("mu < d")
    return violations


def _exact(value: float | int) -> Fraction:
    return Fraction(value)


def exact_predicted_exponents(
    params: InequalityParams, kind: InequalityKind | str, m: int | None = None
) -> tuple[Fraction, Fraction]:
    """Exact dilation exponents of the left and right sides of ``kind``."""
    kind = InequalityKind(kind)
    params.require(kind)
    d = _exact(params.d)
    mu = _exact(params.mu)
    a1, a2, beta = _exact(params.alpha1), _exact(params.alpha2), _exact(params.beta)
    p = _exact(params.exponent("p"))

    if kind is InequalityKind.ORDINARY:
        q = _exact(params.exponent("q"))
        return (d - mu) / q, (2 * d + a1 + a2 - beta) / p
    if kind is InequalityKind.MIXED:
        q, r = _exact(params.exponent("q")), _exact(params.exponent("r"))
        return (d - mu) / r, (d + a2 - beta) / p + (d + a1) / q
    if kind is InequalityKind.DERIVATIVE:
        s = _exact(params.exponent("s"))
        return (d - mu) / s - 1, (2 * d + a1 + a2 - beta) / p
    if m is None or not 1 <= m <= params.d - 1:
        raise DomainError(f"surface dimension m must lie in [1, {params.d - 1}]")
    q = _exact(params.exponent("q"))
    return (_exact(m) - mu) / q, (2 * d + a1 + a2 - beta) / p


def balance_condition(
    params: InequalityParams, kind: InequalityKind | str, m: int | None = None
) -> float:
    """Left side minus right side of the balance identity of ``kind``.

    The difference is formed exactly on the binary values of the exponents,
    so the residual is zero if and only if the identity holds exactly.

    Raises:
        MissingExponentError: If a kind-specific exponent is unset
        DomainError: For the surface kind with ``m`` outside ``[1, d-1]``
    """
    lhs, rhs = exact_predicted_exponents(params, kind, m)
    return float(lhs - rhs)


class WeightKind(str, Enum):
    """Weight specification kinds."""

    POWER = "power"
    TABLE = "table"


@dataclass(frozen=True)
class WeightSpec:
    """A positive radial weight.

    ``power`` weights evaluate to ``|z|^(-exponent)``; ``table`` weights wrap a
    vectorised callable of ``|z|``.
    """

    kind: WeightKind
    exponent: float | None = None
    table: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.kind is WeightKind.POWER:
            if self.exponent is None or not math.isfinite(self.exponent):
                raise ParameterError("power weight needs a finite exponent")
        elif self.table is None:
            raise ParameterError("table weight needs a callable")

    @classmethod
    def power(cls, exponent: float) -> WeightSpec:
        return cls(WeightKind.POWER, exponent=float(exponent))

    @classmethod
    def tabulated(cls, fn: Callable[[np.ndarray], np.ndarray]) -> WeightSpec:
        return cls(WeightKind.TABLE, table=fn)

    def __call__(self, radius: np.ndarray) -> np.ndarray:
        """Evaluate at radii ``|z|``."""
        radius = np.asarray(radius, dtype=float)
        if self.kind is WeightKind.POWER:
            assert self.exponent is not None
            if self.exponent == 0.0:
                return np.ones_like(radius)
            with np.errstate(divide="ignore"):
                return np.power(radius, -self.exponent)
        assert self.table is not None
        return np.asarray(self.table(radius), dtype=float)


@dataclass(frozen=True)
class PairWeight:
    """Two-argument weight ``W(x, y)``, a product of radial factors or a callable."""

    x_factor: WeightSpec | None = None
    y_factor: WeightSpec | None = None
    function: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Evaluate on paired point arrays of shape ``(n, d)``."""
        if self.function is not None:
            return np.asarray(self.function(x, y), dtype=float)
        out = np.ones(x.shape[0])
        if self.x_factor is not None:
            out = out * self.x_factor(np.linalg.norm(x, axis=1))
        if self.y_factor is not None:
            out = out * self.y_factor(np.linalg.norm(y, axis=1))
        return out


@dataclass(frozen=True)
class WeightTriple:
    """Weights of one inequality: target, pair and kernel."""

    target: WeightSpec
    pair: PairWeight
    kernel: WeightSpec

    @classmethod
    def from_params(cls, params: InequalityParams) -> WeightTriple:
        """Power weights ``|x|^{-mu}``, ``|x|^{alpha1}|y|^{alpha2}``, ``r^{-beta}``."""
        return cls(
            target=WeightSpec.power(params.mu),
            pair=PairWeight(
                WeightSpec.power(-params.alpha1), WeightSpec.power(-params.alpha2)
            ),
            kernel=WeightSpec.power(params.beta),
        )

    @property
    def is_power(self) -> bool:
        return (
            self.target.kind is WeightKind.POWER
            and self.kernel.kind is WeightKind.POWER
            and self.pair.function is None
        )


class DomainKind(str, Enum):
    """Integration domain kinds."""

    WHOLE_SPACE = "whole_space"
    BALL = "ball"
    BOX = "box"
    SURFACE = "surface"


@dataclass(frozen=True)
class Region:
    """Bounded region used by samplers: enclosing radius, diameter, membership."""

    enclosing_radius: float
    diameter: float
    contains: Callable[[np.ndarray], np.ndarray]


class Domain(BaseModel):
    """Integration domain in R^d.

    ``ball`` is centred at the origin; ``box`` is the cube ``[lo, hi]^d``;
    ``surface`` is the coordinate plane ``x_{m+1} = ... = x_d = 0``, optionally
    cut to the trace of the ball of radius ``radius``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: DomainKind = DomainKind.WHOLE_SPACE
    d: int = Field(ge=1)
    radius: float | None = None
    lo: float | None = None
    hi: float | None = None
    m: int | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> Domain:
        if self.kind is DomainKind.BALL and (self.radius is None or not self.radius > 0):
            raise ValueError("ball radius must be positive")
        if self.kind is DomainKind.BOX and (
            self.lo is None or self.hi is None or not self.lo < self.hi
        ):
            raise ValueError("box needs lo < hi")
        if self.kind is DomainKind.SURFACE:
            if self.m is None or not 1 <= self.m <= self.d - 1:
                raise ValueError(f"surface dimension m must lie in [1, {self.d - 1}]")
            if self.radius is not None and not self.radius > 0:
                raise ValueError("surface trace radius must be positive")
        return self

    @classmethod
    def _build(cls, **kwargs: Any) -> Domain:
        try:
            return cls(**kwargs)
        except ValueError as e:
            raise DomainError(str(e)) from e

    @classmethod
    def whole_space(cls, d: int) -> Domain:
        return cls._build(kind=DomainKind.WHOLE_SPACE, d=d)

    @classmethod
    def ball(cls, d: int, radius: float) -> Domain:
        return cls._build(kind=DomainKind.BALL, d=d, radius=radius)

    @classmethod
    def box(cls, d: int, lo: float, hi: float) -> Domain:
        return cls._build(kind=DomainKind.BOX, d=d, lo=lo, hi=hi)

    @classmethod
    def surface(cls, d: int, m: int, radius: float | None = None) -> Domain:
        return cls._build(kind=DomainKind.SURFACE, d=d, m=m, radius=radius)

    @property
    def is_whole_space(self) -> bool:
        return self.kind is DomainKind.WHOLE_SPACE

    def trace(self) -> Domain:
        """The m-dimensional domain carried by a surface."""
        if self.kind is not DomainKind.SURFACE or self.m is None:
            raise DomainError("trace is defined for surface domains only")
        if self.radius is None:
            return Domain.whole_space(self.m)
        return Domain.ball(self.m, self.radius)

    def region(self, window: float | None = None) -> Region:
        """Bounded region for sampling; whole space is cut to the ball ``B(window)``."""
        if self.kind is DomainKind.SURFACE:
            return self.trace().region(window)
        if self.kind is DomainKind.WHOLE_SPACE or self.kind is DomainKind.BALL:
            radius = self.radius if self.kind is DomainKind.BALL else window
            if radius is None or not radius > 0:
                raise DomainError("whole-space integrals need a positive window")
            r = float(radius)

            def in_ball(x: np.ndarray) -> np.ndarray:
                return np.einsum("ij,ij->i", x, x) <= r * r

            return Region(r, 2.0 * r, in_ball)

        assert self.lo is not None and self.hi is not None
        lo, hi = float(self.lo), float(self.hi)

        def in_box(x: np.ndarray) -> np.ndarray:
            return np.all((x >= lo) & (x <= hi), axis=1)

        corner = max(abs(lo), abs(hi))
        return Region(
            corner * math.sqrt(self.d), (hi - lo) * math.sqrt(self.d), in_box
        )

    def interval(self, window: float | None = None) -> tuple[float, float]:
        """One-dimensional extent of a d=1 domain."""
        if self.d != 1 and self.kind is not DomainKind.SURFACE:
            raise DomainError("interval is defined for one-dimensional domains")
        if self.kind is DomainKind.BOX:
            assert self.lo is not None and self.hi is not None
            return float(self.lo), float(self.hi)
        region = self.region(window)
        return -region.enclosing_radius, region.enclosing_radius
