"""Dilation experiments, balance conditions and weight envelopes."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
from scipy import optimize

from .exceptions import DomainError, HSLabError, ParameterError, ScalingAbortedError
from .model import (
    Domain,
    DomainKind,
    InequalityKind,
    InequalityParams,
    WeightSpec,
    balance_condition,
    exact_predicted_exponents,
)
from .norms import (
    NormKind,
    NormSpec,
    gagliardo_seminorm,
    gradient_norm,
    mixed_seminorm,
    surface_norm,
    target_norm,
)
from .quad.result import QuadratureResult
from .trialfuncs import TrialFunction, dilate

logger = logging.getLogger(__name__)

HOLDS_TOLERANCE = 1e-12
MIN_GRID_SPAN = 8.0
ENVELOPE_XATOL = 1e-8


class FunctionalKind(str, Enum):
    """Functionals whose dilation exponent is known in closed form."""

    TARGET = "target"
    GAGLIARDO = "gagliardo"
    MIXED = "mixed"
    MIXED_TARGET = "mixed_target"
    GRADIENT = "gradient"
    SURFACE = "surface"


def predicted_exponent_exact(
    kind: FunctionalKind | str, params: InequalityParams, m: int | None = None
) -> Fraction:
    """Homogeneity exponent of ``kind`` under ``u -> u(·/θ)``, exactly."""
    kind = FunctionalKind(kind)
    d = Fraction(params.d)
    mu = Fraction(params.mu)
    a1, a2, beta = Fraction(params.alpha1), Fraction(params.alpha2), Fraction(params.beta)

    if kind is FunctionalKind.TARGET:
        return (d - mu) / Fraction(params.exponent("q"))
    if kind is FunctionalKind.MIXED_TARGET:
        return (d - mu) / Fraction(params.exponent("r"))
    if kind is FunctionalKind.GAGLIARDO:
        return (2 * d + a1 + a2 - beta) / Fraction(params.exponent("p"))
    if kind is FunctionalKind.MIXED:
        p, q = Fraction(params.exponent("p")), Fraction(params.exponent("q"))
        return (d + a2 - beta) / p + (d + a1) / q
    if kind is FunctionalKind.GRADIENT:
        return (d - mu) / Fraction(params.exponent("s")) - 1
    if kind is FunctionalKind.SURFACE:
        if m is None or not 1 <= m <= params.d - 1:
            raise DomainError(f"surface dimension m must lie in [1, {params.d - 1}]")
        return (Fraction(m) - mu) / Fraction(params.exponent("q"))
    raise ParameterError(f"unknown functional kind {kind}")


def predicted_exponent(
    kind: FunctionalKind | str, params: InequalityParams, m: int | None = None
) -> float:
    """Homogeneity exponent of ``kind``.

    Raises:
        MissingExponentError: If an exponent the functional needs is unset
        ParameterError: For an unknown kind
    """
    try:
        kind = FunctionalKind(kind)
    except ValueError:
        raise ParameterError(f"unknown functional kind {kind!r}") from None
    return float(predicted_exponent_exact(kind, params, m))


def default_theta_grid(points: int = 9, lo: float = 0.125, hi: float = 8.0) -> list[float]:
    """Geometric grid; homogeneity is exact in log-space."""
    return [float(t) for t in np.geomspace(lo, hi, points)]


def _check_grid(theta_grid: Sequence[float]) -> list[float]:
    grid = [float(t) for t in theta_grid]
    if len(grid) < 3:
        raise ParameterError("theta grid needs at least 3 points")
    if any(not (math.isfinite(t) and t > 0) for t in grid):
        raise ParameterError("theta grid values must be positive and finite")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("theta grid must be strictly increasing")
    if grid[-1] / grid[0] < MIN_GRID_SPAN:
        raise ParameterError(
            f"theta grid must span a factor of at least {MIN_GRID_SPAN:g}"
        )
    return grid


@dataclass
class ScalingReport:
    """Outcome of a dilation experiment."""

    functional: str
    theta_grid: list[float]
    values: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    log_values: list[float] = field(default_factory=list)
    fitted_slope: float = math.nan
    predicted_slope: float = math.nan
    residual: float = math.nan
    r_squared: float = math.nan
    residual_bound: float = math.nan
    flags: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return "degenerate_data" not in self.flags and math.isfinite(self.fitted_slope)

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional,
            "theta_grid": self.theta_grid,
            "values": self.values,
            "errors": self.errors,
            "log_values": self.log_values,
            "fitted_slope": self.fitted_slope,
            "predicted_slope": self.predicted_slope,
            "residual": self.residual,
            "r_squared": self.r_squared,
            "residual_bound": self.residual_bound,
            "flags": self.flags,
        }


Functional = Callable[[TrialFunction], QuadratureResult]


def bind_functional(
    kind: FunctionalKind | str, spec: NormSpec, domain: Domain
) -> Functional:
    """Close ``kind`` over its spec and domain."""
    kind = FunctionalKind(kind)
    if kind is FunctionalKind.TARGET:
        target = spec.with_kind(NormKind.TARGET, target_exponent="q")
        return lambda u: target_norm(u, target, domain)
    if kind is FunctionalKind.MIXED_TARGET:
        target = spec.with_kind(NormKind.TARGET, target_exponent="r")
        return lambda u: target_norm(u, target, domain)
    if kind is FunctionalKind.GAGLIARDO:
        gagliardo = spec.with_kind(NormKind.GAGLIARDO)
        return lambda u: gagliardo_seminorm(u, gagliardo, domain)
    if kind is FunctionalKind.MIXED:
        mixed = spec.with_kind(NormKind.MIXED)
        return lambda u: mixed_seminorm(u, mixed, domain)
    if kind is FunctionalKind.GRADIENT:
        gradient = spec.with_kind(NormKind.GRADIENT)
        return lambda u: gradient_norm(u, gradient, domain)
    surface = spec.with_kind(NormKind.SURFACE)
    return lambda u: surface_norm(u, surface, domain)


def _is_unbounded(domain: Domain) -> bool:
    if domain.kind is DomainKind.SURFACE:
        return domain.radius is None
    return domain.is_whole_space


def fit_scaling(
    kind: FunctionalKind | str,
    u: TrialFunction,
    spec: NormSpec,
    domain: Domain,
    theta_grid: Sequence[float] | None = None,
) -> ScalingReport:
    """Fit the slope of ``log N(u(·/θ))`` against ``log θ``.

    Args:
        kind: Functional to dilate
        u: Undilated trial function
        spec: Exponents, weights and quadrature settings
        domain: Whole space, or an uncut coordinate plane for surface norms
        theta_grid: Increasing dilations spanning a factor of at least 8;
            defaults to 9 geometric points over ``[1/8, 8]``

    Returns:
        Report with the fitted and predicted slopes; constant data yields a
        report flagged ``degenerate_data`` instead of a fit

    Raises:
        DomainError: If the domain is bounded
        ParameterError: For an invalid grid
        ScalingAbortedError: If a functional evaluation fails; carries the
            values computed so far
    """
    kind = FunctionalKind(kind)
    if not _is_unbounded(domain):
        raise DomainError("dilation experiments need an unbounded domain")
    grid = _check_grid(theta_grid if theta_grid is not None else default_theta_grid())
    m = domain.m if domain.kind is DomainKind.SURFACE else None
    functional = bind_functional(kind, spec, domain)

    report = ScalingReport(functional=kind.value, theta_grid=grid)
    report.predicted_slope = predicted_exponent(kind, spec.params, m)
    for theta in grid:
        try:
            result = functional(dilate(u, theta))
        except HSLabError as e:
            logger.error(
                "Dilation experiment aborted",
                extra={"functional": kind.value, "theta": theta, "error": str(e)},
            )
            raise ScalingAbortedError(
                f"{kind.value} failed at theta = {theta}: {e}", partial=report
            ) from e
        report.values.append(result.value)
        report.errors.append(result.error_estimate)
        report.flags.extend(f for f in result.flags if f not in report.flags)

    values = np.asarray(report.values)
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        report.flags.append("degenerate_data")
        logger.warning(
            "Dilation data cannot be fitted",
            extra={"functional": kind.value, "values": report.values},
        )
        return report

    x, y = np.log(grid), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    relative = np.asarray(report.errors) / values

    report.log_values = [float(v) for v in y]
    report.fitted_slope = float(slope)
    report.residual = report.fitted_slope - report.predicted_slope
    report.r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    report.residual_bound = 3.0 * float(relative.max()) / math.log(grid[-1] / grid[0])
    logger.info(
        "Fitted dilation exponent",
        extra={
            "functional": kind.value,
            "fitted": report.fitted_slope,
            "predicted": report.predicted_slope,
            "residual": report.residual,
        },
    )
    return report


@dataclass(frozen=True)
class NecessaryCondition:
    """Balance check of one inequality kind."""

    kind: str
    holds: bool
    residual: float
    lhs_exponent: float
    rhs_exponent: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "holds": self.holds,
            "residual": self.residual,
            "lhs_exponent": self.lhs_exponent,
            "rhs_exponent": self.rhs_exponent,
        }


def check_necessary_condition(
    kind: InequalityKind | str, params: InequalityParams, m: int | None = None
) -> NecessaryCondition:
    """Whether the balance identity of ``kind`` holds (``|residual| < 1e-12``)."""
    kind = InequalityKind(kind)
    residual = balance_condition(params, kind, m)
    lhs, rhs = exact_predicted_exponents(params, kind, m)
    return NecessaryCondition(
        kind=kind.value,
        holds=abs(residual) < HOLDS_TOLERANCE,
        residual=residual,
        lhs_exponent=float(lhs),
        rhs_exponent=float(rhs),
    )


class Regime(str, Enum):
    """Range of the dilation factor in an envelope."""

    NEAR_ZERO = "near_zero"
    NEAR_INFINITY = "near_infinity"


class Direction(str, Enum):
    INF = "inf"
    SUP = "sup"


class EnvelopeRole(str, Enum):
    """Which weight of the inequality the envelope describes.

    Target and kernel weights decay like ``|z|^{-e}`` and are normalised by
    ``θ^{-e}``; pair weight factors grow like ``|z|^{e}`` and are normalised
    by ``θ^{e}``.
    """

    TARGET = "target"
    KERNEL = "kernel"
    PAIR = "pair"


_REGIME_BOUNDS = {Regime.NEAR_ZERO: (1e-3, 1.0), Regime.NEAR_INFINITY: (1.0, 1e3)}


@dataclass(frozen=True)
class EnvelopeSpec:
    """Envelope ``inf`` or ``sup`` over θ of ``W(θz) / θ^{±e}``."""

    weight: WeightSpec
    trial_exponent: float
    regime: Regime = Regime.NEAR_ZERO
    role: EnvelopeRole = EnvelopeRole.TARGET
    direction: Direction | None = None
    theta_grid: tuple[float, ...] | None = None
    d: int = 1

    def __post_init__(self) -> None:
        grid = self.theta_grid
        if grid is None:
            return
        if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("envelope grid must be strictly increasing")
        if self.regime is Regime.NEAR_ZERO:
            inside = grid[0] > 0 and grid[-1] <= 1.0
        else:
            inside = grid[0] >= 1.0
        if not inside:
            raise ParameterError(f"envelope grid leaves the {self.regime.value} range")

    @property
    def resolved_direction(self) -> Direction:
        if self.direction is not None:
            return self.direction
        return Direction.SUP if self.role is EnvelopeRole.PAIR else Direction.INF

    @property
    def grid(self) -> np.ndarray:
        if self.theta_grid is not None:
            return np.asarray(self.theta_grid, dtype=float)
        lo, hi = _REGIME_BOUNDS[self.regime]
        return np.geomspace(lo, hi, 61)

    def ratio(self, theta: np.ndarray, z: float) -> np.ndarray:
        sign = 1.0 if self.role is EnvelopeRole.PAIR else -1.0
        theta = np.asarray(theta, dtype=float)
        return self.weight(theta * z) / theta ** (sign * self.trial_exponent)


@dataclass
class EnvelopeTable:
    """Tabulated envelope ``z -> value``."""

    z: list[float]
    values: list[float]
    argbest_theta: list[float]
    flags: list[str] = field(default_factory=list)

    def rows(self) -> list[dict[str, float]]:
        return [{"z": z, "value": v} for z, v in zip(self.z, self.values)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "table": self.rows(),
            "argbest_theta": self.argbest_theta,
            "flags": self.flags,
        }


def _refine(
    spec: EnvelopeSpec, z: float, grid: np.ndarray, best: int, sign: float
) -> tuple[float, float]:
    """Bounded scalar search in ``log θ`` around grid cell ``best``."""
    lo = math.log(grid[max(best - 1, 0)])
    hi = math.log(grid[min(best + 1, grid.size - 1)])
    if not hi > lo:
        theta = float(grid[best])
        return theta, float(spec.ratio(np.array([theta]), z)[0])

    def objective(t: float) -> float:
        value = float(spec.ratio(np.array([math.exp(t)]), z)[0])
        return sign * value if math.isfinite(value) else math.inf

    found = optimize.minimize_scalar(
        objective, bounds=(lo, hi), method="bounded", options={"xatol": ENVELOPE_XATOL}
    )
    theta = math.exp(float(found.x))
    return theta, float(spec.ratio(np.array([theta]), z)[0])


def weight_envelope(spec: EnvelopeSpec, z_grid: Sequence[float]) -> EnvelopeTable:
    """Per-z ``inf`` (or ``sup``) over the θ grid with local refinement.

    Flags ``identically_zero`` when the envelope vanishes on the whole grid and
    ``non_integrable`` when it is infinite somewhere or decays no faster than
    ``|z|^{-d}`` towards the origin.
    """
    sign = 1.0 if spec.resolved_direction is Direction.INF else -1.0
    grid = spec.grid
    zs = [float(z) for z in z_grid]
    if any(not z > 0 for z in zs):
        raise ParameterError("envelope points must be positive radii")

    values: list[float] = []
    thetas: list[float] = []
    for z in zs:
        ratios = spec.ratio(grid, z)
        scored = np.where(np.isnan(ratios), math.inf, sign * ratios)
        best = int(np.argmin(scored))
        grid_value = float(ratios[best])
        theta, refined = _refine(spec, z, grid, best, sign)
        if math.isfinite(refined) and sign * refined < sign * grid_value:
            values.append(refined)
            thetas.append(theta)
        else:
            values.append(grid_value)
            thetas.append(float(grid[best]))

    table = EnvelopeTable(z=zs, values=values, argbest_theta=thetas)
    arr = np.asarray(values)
    if np.all(arr == 0.0):
        table.flags.append("identically_zero")
    if not np.all(np.isfinite(arr)):
        table.flags.append("non_integrable")
    elif len(zs) >= 2:
        order = np.argsort(zs)
        z0, z1 = zs[order[0]], zs[order[1]]
        v0, v1 = arr[order[0]], arr[order[1]]
        if v0 > 0 and v1 > 0 and z1 > z0:
            slope = math.log(v1 / v0) / math.log(z1 / z0)
            if slope <= -spec.d:
                table.flags.append("non_integrable")
    if table.flags:
        logger.warning(
            "Envelope violates the nonzero integrable presumption",
            extra={"flags": table.flags, "regime": spec.regime.value},
        )
    return table


@dataclass(frozen=True)
class WeightedConditions:
    """Sufficient-condition check for general weights."""

    cond_a: bool
    cond_b: bool
    residual_a: float
    residual_b: float
    equality_case: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "cond_a": self.cond_a,
            "cond_b": self.cond_b,
            "residual_a": self.residual_a,
            "residual_b": self.residual_b,
            "equality_case": self.equality_case,
        }


def check_weighted_conditions(
    mu0: float,
    mu_inf: float,
    alpha0: float,
    alpha_inf: float,
    beta0: float,
    beta_inf: float,
    params: InequalityParams,
    use_infinity_rhs: bool = False,
) -> WeightedConditions:
    """Evaluate ``(d-μ₀)/q >= (d+α₀-β₀)/p`` and ``(d-μ_∞)/q <= (d+α-β)/p``.

    The second right side uses ``α₀, β₀`` unless ``use_infinity_rhs`` selects
    ``α_∞, β_∞``. Residuals are left minus right, formed exactly.
    """
    p, q = Fraction(params.exponent("p")), Fraction(params.exponent("q"))
    d = Fraction(params.d)
    rhs_a = (d + Fraction(alpha0) - Fraction(beta0)) / p
    alpha_b, beta_b = (alpha_inf, beta_inf) if use_infinity_rhs else (alpha0, beta0)
    rhs_b = (d + Fraction(alpha_b) - Fraction(beta_b)) / p
    residual_a = (d - Fraction(mu0)) / q - rhs_a
    residual_b = (d - Fraction(mu_inf)) / q - rhs_b
    matched = mu0 == mu_inf and alpha0 == alpha_inf and beta0 == beta_inf
    return WeightedConditions(
        cond_a=residual_a >= 0,
        cond_b=residual_b <= 0,
        residual_a=float(residual_a),
        residual_b=float(residual_b),
        equality_case=matched and residual_a == 0 and residual_b == 0,
    )
