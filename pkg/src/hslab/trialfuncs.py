"""Trial-function families used as extremizer candidates and test inputs."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import special

from .exceptions import DimensionError, DivergentIntegralError, ParameterError

FD_STEP = 1e-6


class Family(str, Enum):
    """Family tags as they appear in run configs."""

    LOG_CUSP = "log_cusp"
    SMOOTH_BUMP = "smooth_bump"
    RADIAL_POWER = "radial_power"
    LINEAR_RAMP = "linear_ramp"
    CONSTANT = "constant"
    PRODUCT = "product"
    TRACE = "trace"


class Profile(ABC):
    """Undilated shape of a family, vectorised over ``(n, d)`` point arrays."""

    family: Family
    d: int

    @property
    @abstractmethod
    def support_radius(self) -> float:
        """Radius outside of which the profile vanishes (nominal for constants)."""

    @property
    def vanishes_outside_support(self) -> bool:
        return True

    @abstractmethod
    def values(self, x: np.ndarray) -> np.ndarray:
        """Profile values at the rows of ``x``."""

    def gradient(self, x: np.ndarray) -> np.ndarray | None:
        """Analytic gradient rows, or None when only differences are available."""
        return None

    def radial(self, rho: np.ndarray) -> np.ndarray | None:
        """Radial profile ``g(|x|)`` for radial families."""
        return None

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray | None:
        return None

    def breakpoints(self) -> tuple[float, ...]:
        """Points of d=1 non-smoothness, for quadrature grading."""
        return ()

    @property
    def is_radial(self) -> bool:
        return self.radial(np.array([0.5])) is not None


def _norms(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->i", x, x))


def _radial_gradient(x: np.ndarray, dg: np.ndarray) -> np.ndarray:
    rho = _norms(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(rho[:, None] > 0, x / rho[:, None], 0.0)
    return unit * dg[:, None]


@dataclass(frozen=True)
class LogCusp(Profile):
    """``|log|x|| · 1(|x| <= 1)``, +inf at the origin."""

    d: int
    family: Family = field(default=Family.LOG_CUSP, init=False)

    @property
    def support_radius(self) -> float:
        return 1.0

    def radial(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(rho <= 1.0, -np.log(np.where(rho > 0, rho, 0.0)), 0.0)
        return out

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(rho < 1.0, -1.0 / rho, 0.0)

    def values(self, x: np.ndarray) -> np.ndarray:
        return self.radial(_norms(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return _radial_gradient(x, self.radial_derivative(_norms(x)))

    def breakpoints(self) -> tuple[float, ...]:
        return (-1.0, 0.0, 1.0)


@dataclass(frozen=True)
class SmoothBump(Profile):
    """Mollifier ``exp(-order / (1 - |(x - c)/R|^2))`` inside the ball ``B(c, R)``."""

    d: int
    center: tuple[float, ...]
    radius: float = 1.0
    order: float = 1.0
    family: Family = field(default=Family.SMOOTH_BUMP, init=False)

    def __post_init__(self) -> None:
        if len(self.center) != self.d:
            raise DimensionError("bump centre must have d coordinates")
        if not self.radius > 0 or not self.order > 0:
            raise ParameterError("bump radius and order must be positive")

    @property
    def support_radius(self) -> float:
        return math.sqrt(sum(c * c for c in self.center)) + self.radius

    @property
    def _centered(self) -> bool:
        return all(c == 0.0 for c in self.center)

    def _shape(self, s2: np.ndarray) -> np.ndarray:
        inside = s2 < 1.0
        safe = np.where(inside, 1.0 - s2, 1.0)
        return np.where(inside, np.exp(-self.order / safe), 0.0)

    def _shape_derivative_s2(self, s2: np.ndarray) -> np.ndarray:
        # d/d(s2) of exp(-k/(1 - s2))
        inside = s2 < 1.0
        safe = np.where(inside, 1.0 - s2, 1.0)
        return np.where(
            inside, -self.order * np.exp(-self.order / safe) / (safe * safe), 0.0
        )

    def values(self, x: np.ndarray) -> np.ndarray:
        z = (x - np.asarray(self.center)) / self.radius
        return self._shape(np.einsum("ij,ij->i", z, z))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        z = (x - np.asarray(self.center)) / self.radius
        ds2 = self._shape_derivative_s2(np.einsum("ij,ij->i", z, z))
        return (2.0 / self.radius) * z * ds2[:, None]

    def radial(self, rho: np.ndarray) -> np.ndarray | None:
        if not self._centered:
            return None
        s = np.asarray(rho, dtype=float) / self.radius
        return self._shape(s * s)

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray | None:
        if not self._centered:
            return None
        s = np.asarray(rho, dtype=float) / self.radius
        return self._shape_derivative_s2(s * s) * 2.0 * s / self.radius

    def breakpoints(self) -> tuple[float, ...]:
        if self.d != 1:
            return ()
        c = self.center[0]
        return (c - self.radius, c + self.radius)


@dataclass(frozen=True)
class RadialPower(Profile):
    """``|x|^a · 1(|x| <= cutoff)``."""

    d: int
    exponent: float
    cutoff: float = 1.0
    family: Family = field(default=Family.RADIAL_POWER, init=False)

    def __post_init__(self) -> None:
        if not self.cutoff > 0:
            raise ParameterError("radial_power cutoff must be positive")

    @property
    def support_radius(self) -> float:
        return self.cutoff

    def radial(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rho <= self.cutoff, np.power(rho, self.exponent), 0.0)

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(
                rho < self.cutoff,
                self.exponent * np.power(rho, self.exponent - 1.0),
                0.0,
            )

    def values(self, x: np.ndarray) -> np.ndarray:
        return self.radial(_norms(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return _radial_gradient(x, self.radial_derivative(_norms(x)))

    def breakpoints(self) -> tuple[float, ...]:
        return (-self.cutoff, 0.0, self.cutoff)


@dataclass(frozen=True)
class LinearRamp(Profile):
    """``x_1`` on the cube ``[0, L]^d``, zero elsewhere."""

    d: int
    length: float = 1.0
    family: Family = field(default=Family.LINEAR_RAMP, init=False)

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ParameterError("linear_ramp length must be positive")

    @property
    def support_radius(self) -> float:
        return self.length * math.sqrt(self.d)

    def _inside(self, x: np.ndarray) -> np.ndarray:
        return np.all((x >= 0.0) & (x <= self.length), axis=1)

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.where(self._inside(x), x[:, 0], 0.0)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=float)
        out[:, 0] = np.where(self._inside(x), 1.0, 0.0)
        return out

    def breakpoints(self) -> tuple[float, ...]:
        return (0.0, self.length)


@dataclass(frozen=True)
class Constant(Profile):
    """Constant ``c`` everywhere; the support radius only sets window scales."""

    d: int
    value: float
    family: Family = field(default=Family.CONSTANT, init=False)

    @property
    def support_radius(self) -> float:
        return 1.0

    @property
    def vanishes_outside_support(self) -> bool:
        return self.value == 0.0

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[0], self.value)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x, dtype=float)

    def radial(self, rho: np.ndarray) -> np.ndarray:
        return np.full(np.shape(rho), self.value)

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(rho))


@dataclass(frozen=True)
class Product(Profile):
    """``f1(x_1) · f2(x_2)`` on ``R^{d1} × R^{d2}``."""

    first: TrialFunction
    second: TrialFunction
    family: Family = field(default=Family.PRODUCT, init=False)

    @property
    def d(self) -> int:  # type: ignore[override]
        return self.first.d + self.second.d

    @property
    def support_radius(self) -> float:
        return math.hypot(self.first.support_radius, self.second.support_radius)

    @property
    def vanishes_outside_support(self) -> bool:
        return self.first.vanishes_at_infinity and self.second.vanishes_at_infinity

    def values(self, x: np.ndarray) -> np.ndarray:
        d1 = self.first.d
        return self.first.values(x[:, :d1]) * self.second.values(x[:, d1:])

    def gradient(self, x: np.ndarray) -> np.ndarray | None:
        d1 = self.first.d
        g1, g2 = self.first.gradient(x[:, :d1]), self.second.gradient(x[:, d1:])
        v1, v2 = self.first.values(x[:, :d1]), self.second.values(x[:, d1:])
        return np.hstack([g1 * v2[:, None], g2 * v1[:, None]])


@dataclass(frozen=True)
class Trace(Profile):
    """Restriction of a function on R^d to the coordinate plane ``R^m × {0}``."""

    base: TrialFunction
    m: int
    family: Family = field(default=Family.TRACE, init=False)

    @property
    def d(self) -> int:  # type: ignore[override]
        return self.m

    @property
    def support_radius(self) -> float:
        return self.base.support_radius

    @property
    def vanishes_outside_support(self) -> bool:
        return self.base.vanishes_at_infinity

    def _lift(self, x: np.ndarray) -> np.ndarray:
        return np.hstack([x, np.zeros((x.shape[0], self.base.d - self.m))])

    def values(self, x: np.ndarray) -> np.ndarray:
        return self.base.values(self._lift(x))

    def radial(self, rho: np.ndarray) -> np.ndarray | None:
        return self.base.radial_values(rho)

    def breakpoints(self) -> tuple[float, ...]:
        if self.m != 1:
            return ()
        return self.base.breakpoints_1d()


@dataclass(frozen=True)
class TrialFunction:
    """``amplitude · profile(x / theta) + shift``."""

    profile: Profile
    theta: float = 1.0
    amplitude: float = 1.0
    shift: float = 0.0

    @property
    def family(self) -> Family:
        return self.profile.family

    @property
    def d(self) -> int:
        return self.profile.d

    @property
    def support_radius(self) -> float:
        return self.profile.support_radius * self.theta

    @property
    def vanishes_at_infinity(self) -> bool:
        return self.shift == 0.0 and (
            self.amplitude == 0.0 or self.profile.vanishes_outside_support
        )

    @property
    def is_radial(self) -> bool:
        return self.profile.is_radial

    def _points(self, x: np.ndarray) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 1 and self.d == 1 and pts.shape[0] != 1:
            pts = pts[:, None]
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.d:
            raise DimensionError(
                f"point dimension {pts.shape[1]} does not match function dimension {self.d}"
            )
        return pts

    def values(self, x: np.ndarray) -> np.ndarray:
        """Values at the rows of an ``(n, d)`` array."""
        pts = self._points(x)
        base = self.profile.values(pts / self.theta)
        if self.amplitude != 1.0:
            base = self.amplitude * base
        return base + self.shift if self.shift != 0.0 else base

    def gradient(self, x: np.ndarray) -> np.ndarray | None:
        pts = self._points(x)
        g = self.profile.gradient(pts / self.theta)
        if g is None:
            return None
        return (self.amplitude / self.theta) * g

    def gradient_or_fd(self, x: np.ndarray) -> np.ndarray:
        """Analytic gradient, else central differences with step ``FD_STEP``."""
        pts = self._points(x)
        g = self.gradient(pts)
        if g is not None:
            return g
        out = np.empty_like(pts)
        for k in range(self.d):
            step = np.zeros(self.d)
            step[k] = FD_STEP
            out[:, k] = (self.values(pts + step) - self.values(pts - step)) / (
                2.0 * FD_STEP
            )
        if not np.all(np.isfinite(out)):
            raise ParameterError(
                f"{self.family.value} has no derivative information at some points"
            )
        return out

    def radial_values(self, rho: np.ndarray) -> np.ndarray | None:
        g = self.profile.radial(np.asarray(rho, dtype=float) / self.theta)
        if g is None:
            return None
        return self.amplitude * g + self.shift

    def radial_derivative(self, rho: np.ndarray) -> np.ndarray | None:
        g = self.profile.radial_derivative(np.asarray(rho, dtype=float) / self.theta)
        if g is None:
            return None
        return (self.amplitude / self.theta) * g

    def breakpoints_1d(self) -> tuple[float, ...]:
        return tuple(self.theta * b for b in self.profile.breakpoints())

    def value_at_origin(self) -> float:
        return float(self.values(np.zeros((1, self.d)))[0])

    def scaled(self, c: float) -> TrialFunction:
        return replace(self, amplitude=self.amplitude * c, shift=self.shift * c)

    def shifted(self, c: float) -> TrialFunction:
        return replace(self, shift=self.shift + c)

    def dilate(self, theta: float) -> TrialFunction:
        return dilate(self, theta)


def evaluate(f: TrialFunction, x: np.ndarray | float) -> float | np.ndarray:
    """Evaluate ``f`` at one point (returns a float) or at the rows of an array.

    Raises:
        DimensionError: If the point dimension differs from ``f.d``
    """
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0 or (pts.ndim == 1 and pts.shape[0] == f.d):
        return float(f.values(pts.reshape(1, -1))[0])
    return f.values(pts)


def dilate(f: TrialFunction, theta: float) -> TrialFunction:
    """Return ``x -> f(x / theta)``.

    Factors multiply into ``f.theta``. ``dilate(dilate(f, a), b)`` equals
    ``dilate(f, a * b)`` bit for bit when ``f.theta`` is 1 or the factors are
    powers of two; otherwise the two agree up to one rounding of theta.

    Raises:
        ParameterError: If ``theta`` is not a positive finite number
    """
    if not (math.isfinite(theta) and theta > 0):
        raise ParameterError(f"dilation factor must be positive, got {theta}")
    return replace(f, theta=f.theta * theta)


def log_cusp(d: int = 1) -> TrialFunction:
    return TrialFunction(LogCusp(d))


def smooth_bump(
    d: int = 1,
    center: tuple[float, ...] | None = None,
    radius: float = 1.0,
    order: float = 1.0,
) -> TrialFunction:
    return TrialFunction(
        SmoothBump(d, tuple(center) if center else (0.0,) * d, radius, order)
    )


def radial_power(d: int, exponent: float, cutoff: float = 1.0) -> TrialFunction:
    return TrialFunction(RadialPower(d, exponent, cutoff))


def linear_ramp(d: int = 1, length: float = 1.0) -> TrialFunction:
    return TrialFunction(LinearRamp(d, length))


def constant(c: float, d: int = 1) -> TrialFunction:
    return TrialFunction(Constant(d, float(c)))


def product(first: TrialFunction, second: TrialFunction) -> TrialFunction:
    return TrialFunction(Product(first, second))


def trace(u: TrialFunction, m: int) -> TrialFunction:
    """Restriction of ``u`` to ``R^m × {0}``."""
    if not 1 <= m <= u.d - 1:
        raise DimensionError(f"trace dimension must lie in [1, {u.d - 1}]")
    return TrialFunction(Trace(u, m))


def closed_form_weighted_power_integral(lam: float, p: float, d: int = 1) -> float:
    """``∫₀¹ x^{-λp} |log x|^p dx = Γ(p+1) / (1 - λp)^{p+1}``.

    For ``d > 1`` the radial version ``∫₀¹ ρ^{d-1-λdp}|log ρ|^p dρ`` is returned,
    which equals ``Γ(p+1) / (d(1 - λp))^{p+1}``. The two-sided d=1 factor 2 is
    left to the caller.

    Raises:
        DivergentIntegralError: If ``λp >= 1``
    """
    if p < 1:
        raise ParameterError("p must be at least 1")
    if lam * p >= 1:
        raise DivergentIntegralError(
            f"integral diverges for lambda*p = {lam * p} >= 1", abscissa=p
        )
    return log_power_moment(lam * d * p, p, d)


def log_power_moment(c: float, p: float, d: int = 1) -> float:
    """``∫₀¹ ρ^{d-1-c} |log ρ|^p dρ = Γ(p+1) / (d - c)^{p+1}`` for ``c < d``."""
    if c >= d:
        raise DivergentIntegralError(f"moment diverges for c = {c} >= d = {d}")
    return float(special.gamma(p + 1.0) / (d - c) ** (p + 1.0))


def log_power_tail(c: float, p: float, d: int, eps: float) -> float:
    """``∫₀^ε ρ^{d-1-c} |log ρ|^p dρ`` for ``0 < ε < 1``, via the incomplete gamma."""
    if c >= d:
        raise DivergentIntegralError(f"moment diverges for c = {c} >= d = {d}")
    k = d - c
    upper = k * -math.log(eps)
    return float(
        special.gammaincc(p + 1.0, upper) * special.gamma(p + 1.0) / k ** (p + 1.0)
    )
