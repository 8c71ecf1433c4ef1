"""Norm and seminorm functionals of the four inequality families.

Every functional takes a trial function, a ``NormSpec`` and a domain and
returns a ``QuadratureResult`` holding the norm itself (after the outer
``1/q``, ``1/p`` or ``1/s`` power) with a propagated error estimate.

Whole-space double integrals run on the window ball ``B(κ · support)``; the
window dilates together with the function.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import replace
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import DivergentIntegralError, DomainError, ParameterError
from .model import Domain, DomainKind, InequalityParams, WeightTriple
from .observability import MetricsLogger
from .oracles import gagliardo_oracle_applies, log_cusp_gagliardo, log_cusp_target_power
from .quad.adaptive import integrate_1d_singular, integrate_radial
from .quad.montecarlo import mc_double_integral, mc_nested_integral, mc_single_integral
from .quad.result import QuadMethod, QuadratureResult
from .quad.settings import MethodChoice, QuadSettings
from .trialfuncs import Family, TrialFunction, trace

logger = logging.getLogger(__name__)
metrics = MetricsLogger(logger)


class NormKind(str, Enum):
    """Functional kinds addressable from run configs."""

    TARGET = "target_lebesgue"
    GAGLIARDO = "gagliardo"
    MIXED = "mixed"
    GRADIENT = "gradient"
    SURFACE = "surface"
    BGLS = "bgls_pass_through"


_WEIGHTED_KINDS = {NormKind.TARGET, NormKind.GAGLIARDO, NormKind.MIXED, NormKind.BGLS}


class NormSpec(BaseModel):
    """Which functional to evaluate, with its exponents, weights and tolerances."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: NormKind
    params: InequalityParams
    weights: WeightTriple | None = Field(
        default=None, description="General weights replacing the power weights"
    )
    settings: QuadSettings = Field(default_factory=QuadSettings)
    target_exponent: Literal["q", "r"] = Field(
        default="q", description="Exponent of the target norm"
    )
    subtract_value_at_origin: bool = Field(
        default=False, description="Integrate |u(x) - u(0)|^q instead of |u(x)|^q"
    )

    @model_validator(mode="after")
    def _check_weights(self) -> NormSpec:
        if self.weights is not None and self.kind not in _WEIGHTED_KINDS:
            raise ValueError(f"general weights are not defined for {self.kind.value}")
        return self

    @property
    def triple(self) -> WeightTriple:
        return self.weights if self.weights is not None else WeightTriple.from_params(
            self.params
        )

    @property
    def power_weights(self) -> bool:
        return self.weights is None or self.weights.is_power

    def with_kind(self, kind: NormKind, **updates: object) -> NormSpec:
        return self.model_copy(update={"kind": kind, **updates})


def _zero(method: QuadMethod = QuadMethod.CLOSED_FORM) -> QuadratureResult:
    return QuadratureResult(value=0.0, error_estimate=0.0, method=method, evaluations=1)


def _has_no_differences(u: TrialFunction) -> bool:
    return u.amplitude == 0.0 or u.family is Family.CONSTANT


def _unshifted(u: TrialFunction) -> TrialFunction:
    return u if u.shift == 0.0 else replace(u, shift=0.0)


def _finish(label: str, result: QuadratureResult, exponent: float) -> QuadratureResult:
    metrics.log_quadrature(label, result)
    return result.power(1.0 / exponent)


def _radial_marks(u: TrialFunction) -> list[float]:
    return sorted({b for b in u.breakpoints_1d() if b > 0.0})


def _line_marks(u: TrialFunction, *extra: float) -> list[float]:
    return sorted({0.0, *u.breakpoints_1d(), *extra})


def _extent(domain: Domain, u: TrialFunction, window: float) -> tuple[float, float]:
    """Integration interval of a one-dimensional domain."""
    if domain.kind is DomainKind.WHOLE_SPACE:
        return -window, window
    return domain.interval()


def _ball_radius(domain: Domain, support: float) -> float | None:
    """Radius for polar integration, or None when the domain is not a ball."""
    if domain.kind is DomainKind.WHOLE_SPACE:
        return support
    if domain.kind is DomainKind.BALL:
        assert domain.radius is not None
        return min(domain.radius, support)
    return None


def _single_integral(
    label: str,
    u: TrialFunction,
    integrand_radial: Callable[[np.ndarray], np.ndarray] | None,
    integrand: Callable[[np.ndarray], np.ndarray],
    domain: Domain,
    settings: QuadSettings,
    singular_order: float,
    origin_singular: bool = False,
) -> QuadratureResult:
    """``∫_D F(x) dx`` for an integrand vanishing outside ``B(u.support_radius)``.

    When ``origin_singular`` is set the polar rule leaves out the ball of radius
    ``origin_exclusion · radius``.
    """
    support = u.support_radius if u.vanishes_at_infinity else math.inf
    radius = _ball_radius(domain, support)

    if integrand_radial is not None and radius is not None:
        eps0 = settings.origin_exclusion * radius if origin_singular else 0.0
        return integrate_radial(
            integrand_radial,
            domain.d,
            radius,
            settings.tol,
            singular_points=[b for b in _radial_marks(u) if b < radius],
            origin_exclusion=eps0,
        )

    if domain.d == 1:
        lo, hi = _extent(domain, u, support)
        lo, hi = max(lo, -support), min(hi, support)
        if not lo < hi:
            return _zero(QuadMethod.ADAPTIVE_1D)

        def line(x: np.ndarray) -> np.ndarray:
            return integrand(np.asarray(x, dtype=float)[:, None])

        return integrate_1d_singular(line, lo, hi, _line_marks(u), settings.tol)

    window = support if domain.kind is DomainKind.WHOLE_SPACE else None
    return mc_single_integral(
        integrand, domain, settings.mc, window=window, singular_order=singular_order
    )


def target_norm(u: TrialFunction, spec: NormSpec, domain: Domain) -> QuadratureResult:
    """``[∫_D |u(x)|^q w(|x|) dx]^{1/q}`` with ``w = |x|^{-mu}`` by default.

    With ``subtract_value_at_origin`` the integrand is ``|u(x) - u(0)|^q``.

    Raises:
        ParameterError: If ``mu >= d`` for a power weight, or ``u(0)`` is infinite
            while subtracting it
        DivergentIntegralError: On the whole space when ``u`` does not vanish
            at infinity
    """
    params = spec.params
    q = params.exponent(spec.target_exponent)
    weight = spec.triple.target
    if domain.kind is DomainKind.SURFACE:
        return surface_norm(u, spec, domain)
    if domain.d != u.d:
        raise DomainError(f"domain dimension {domain.d} differs from function {u.d}")
    if spec.power_weights and not params.mu < domain.d:
        raise ParameterError(f"target norm needs mu < d, got mu = {params.mu}")

    v = u
    if spec.subtract_value_at_origin:
        origin = u.value_at_origin()
        if not math.isfinite(origin):
            raise ParameterError(f"{u.family.value} has no finite value at the origin")
        v = u.shifted(-origin)
    if u.amplitude == 0.0 and v.shift == 0.0:
        return _zero()
    if domain.is_whole_space and not v.vanishes_at_infinity:
        raise DivergentIntegralError("target integral diverges: u does not vanish at infinity")

    if (
        v.family is Family.LOG_CUSP
        and v.shift == 0.0
        and spec.power_weights
        and (domain.is_whole_space or (domain.radius or 0.0) >= v.theta)
    ):
        base = log_cusp_target_power(q, params.mu, v.d)
        scale = abs(v.amplitude) ** q * v.theta ** (v.d - params.mu)
        return _finish("target", base.scaled(scale), q)

    radial: Callable[[np.ndarray], np.ndarray] | None = None
    if v.is_radial:

        def radial(rho: np.ndarray) -> np.ndarray:
            values = v.radial_values(rho)
            assert values is not None
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.abs(values) ** q * weight(rho)

    def integrand(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(v.values(x)) ** q * weight(np.linalg.norm(x, axis=1))

    origin_singular = not math.isfinite(v.value_at_origin())
    result = _single_integral(
        "target", v, radial, integrand, domain, spec.settings, params.mu,
        origin_singular,
    )
    return _finish("target", result, q)


def _nested_line(
    inner: Callable[[np.ndarray, float], np.ndarray],
    outer_weight: Callable[[np.ndarray], np.ndarray],
    power: float,
    lo: float,
    hi: float,
    marks: Sequence[float],
    tol: float,
) -> QuadratureResult:
    """``∫ w(y) [∫ inner(x, y) dx]^power dy`` over ``(lo, hi)²`` by nested 1-D rules."""
    evaluations = 0
    worst = 0.0
    flags: set[str] = set()

    def outer(ys: np.ndarray) -> np.ndarray:
        nonlocal evaluations, worst
        out = np.empty(ys.shape[0])
        for k, y in enumerate(ys):
            y = float(y)
            res = integrate_1d_singular(
                lambda x, y=y: inner(x, y), lo, hi, sorted({*marks, y}), tol
            )
            evaluations += res.evaluations
            flags.update(res.flags)
            if res.value != 0.0:
                worst = max(worst, res.relative_error)
            out[k] = max(res.value, 0.0) ** power
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(outer_weight(ys), dtype=float) * out

    marks_in = [m for m in marks if lo <= m <= hi]
    result = integrate_1d_singular(outer, lo, hi, marks_in, tol)
    return QuadratureResult(
        value=result.value,
        error_estimate=result.error_estimate + abs(power) * worst * abs(result.value),
        method=QuadMethod.NESTED_ADAPTIVE,
        evaluations=result.evaluations + evaluations,
        flags=tuple(sorted(flags | set(result.flags))),
    )


def _use_nested(spec: NormSpec, d: int) -> bool:
    if d != 1:
        return False
    method = spec.settings.method
    if method is MethodChoice.NESTED:
        return True
    return method is MethodChoice.AUTO and spec.params.beta < 1.0


def _window(u: TrialFunction, domain: Domain, settings: QuadSettings) -> float | None:
    if domain.is_whole_space:
        return settings.window_factor * u.support_radius
    return None


def _check_double_integrability(params: InequalityParams) -> None:
    if not 2 * params.d + params.alpha1 + params.alpha2 - params.beta > 0:
        raise ParameterError(
            "double integral diverges: 2d + alpha1 + alpha2 - beta <= 0"
        )


def gagliardo_seminorm(
    u: TrialFunction, spec: NormSpec, domain: Domain
) -> QuadratureResult:
    """``[∫∫_{D×D} |u(x) - u(y)|^p W(x, y) K(|x - y|) dx dy]^{1/p}``.

    Uses the log-cusp reduction when it applies, nested 1-D quadrature in d=1
    for ``beta < 1`` and importance-sampled Monte Carlo otherwise.
    """
    params = spec.params
    p = params.exponent("p")
    _check_double_integrability(params)
    if domain.d != u.d:
        raise DomainError(f"domain dimension {domain.d} differs from function {u.d}")
    if _has_no_differences(u):
        return _zero()

    if (
        spec.power_weights
        and spec.settings.method is MethodChoice.AUTO
        and gagliardo_oracle_applies(u, domain)
        and (
            not domain.is_whole_space
            or params.beta - max(params.alpha1, params.alpha2) > 1.0
        )
    ):
        result = log_cusp_gagliardo(
            u, p, params.beta, params.alpha1, params.alpha2, domain, spec.settings.tol
        )
        return _finish("gagliardo", result, p)

    v = _unshifted(u)
    triple = spec.triple
    window = _window(u, domain, spec.settings)

    if _use_nested(spec, domain.d):
        lo, hi = _extent(domain, u, window or 0.0)

        def inner(x: np.ndarray, y: float) -> np.ndarray:
            xs = np.asarray(x, dtype=float)[:, None]
            ys = np.full_like(xs, y)
            with np.errstate(divide="ignore", invalid="ignore"):
                diff = np.abs(v.values(xs) - v.values(ys)) ** p
                return diff * triple.pair(xs, ys) * triple.kernel(np.abs(xs[:, 0] - y))

        result = _nested_line(
            inner, np.ones_like, 1.0, lo, hi, _line_marks(v), spec.settings.tol
        )
        return _finish("gagliardo", result, p)

    def kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = np.abs(v.values(x) - v.values(y)) ** p
        return diff * triple.pair(x, y) * triple.kernel(np.linalg.norm(x - y, axis=1))

    result = mc_double_integral(kernel, params, domain, spec.settings.mc, window=window)
    return _finish("gagliardo", result, p)


def mixed_seminorm(u: TrialFunction, spec: NormSpec, domain: Domain) -> QuadratureResult:
    """``{∫_D W₁(y) [∫_D |u(x) - u(y)|^p W₂(x) K(|x - y|) dx]^{q/p} dy}^{1/q}``.

    ``W₁`` is the first factor of the pair weight (``|y|^{alpha1}``) and sits
    on the outer variable; ``W₂`` (``|x|^{alpha2}``) sits on the inner one.

    Raises:
        ParameterError: For a non-separable pair weight
        ConfigError: If the inner Monte Carlo budget is below 16
    """
    params = spec.params
    p, q = params.exponent("p"), params.exponent("q")
    _check_double_integrability(params)
    if domain.d != u.d:
        raise DomainError(f"domain dimension {domain.d} differs from function {u.d}")
    triple = spec.triple
    if triple.pair.function is not None:
        raise ParameterError("mixed seminorm needs a separable pair weight")
    if _has_no_differences(u):
        return _zero()

    v = _unshifted(u)
    outer_factor, inner_factor = triple.pair.x_factor, triple.pair.y_factor
    window = _window(u, domain, spec.settings)

    def outer_weight(y: np.ndarray) -> np.ndarray:
        radii = np.linalg.norm(np.atleast_2d(y).reshape(len(y), -1), axis=1)
        return outer_factor(radii) if outer_factor is not None else np.ones(len(y))

    def inner_weight(x: np.ndarray) -> np.ndarray:
        radii = np.linalg.norm(x, axis=1)
        return inner_factor(radii) if inner_factor is not None else np.ones(len(x))

    if _use_nested(spec, domain.d):
        lo, hi = _extent(domain, u, window or 0.0)

        def inner(x: np.ndarray, y: float) -> np.ndarray:
            xs = np.asarray(x, dtype=float)[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                diff = np.abs(v.values(xs) - v.values(np.full_like(xs, y))) ** p
                return diff * inner_weight(xs) * triple.kernel(np.abs(xs[:, 0] - y))

        result = _nested_line(
            inner, outer_weight, q / p, lo, hi, _line_marks(v), spec.settings.tol
        )
        return _finish("mixed", result, q)

    def kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = np.abs(v.values(x) - v.values(y)) ** p
        return diff * inner_weight(x) * triple.kernel(np.linalg.norm(x - y, axis=1))

    result = mc_nested_integral(
        kernel,
        outer_weight,
        q / p,
        domain,
        spec.settings.mc,
        inner_samples=spec.settings.inner_samples,
        window=window,
        outer_singular_order=max(0.0, -params.alpha1),
        kernel_order=params.beta,
    )
    return _finish("mixed", result, q)


def gradient_norm(u: TrialFunction, spec: NormSpec, domain: Domain) -> QuadratureResult:
    """``[∫_D |∇u(x)|^s |x|^{-mu} dx]^{1/s}``.

    Raises:
        ParameterError: If the family has no derivative information where needed
    """
    params = spec.params
    s = params.exponent("s")
    if domain.d != u.d:
        raise DomainError(f"domain dimension {domain.d} differs from function {u.d}")
    if not params.mu < domain.d:
        raise ParameterError(f"gradient norm needs mu < d, got mu = {params.mu}")
    if _has_no_differences(u):
        return _zero()
    weight = spec.triple.target
    u = _unshifted(u)

    radial: Callable[[np.ndarray], np.ndarray] | None = None
    if u.is_radial:

        def radial(rho: np.ndarray) -> np.ndarray:
            slope = u.radial_derivative(rho)
            assert slope is not None
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.abs(slope) ** s * weight(rho)

    def integrand(x: np.ndarray) -> np.ndarray:
        grad = u.gradient_or_fd(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.linalg.norm(grad, axis=1) ** s * weight(np.linalg.norm(x, axis=1))

    slope0 = u.radial_derivative(np.array([0.0])) if u.is_radial else None
    origin_singular = slope0 is not None and not np.all(np.isfinite(slope0))
    result = _single_integral(
        "gradient", u, radial, integrand, domain, spec.settings, params.mu,
        origin_singular,
    )
    return _finish("gradient", result, s)


def surface_norm(u: TrialFunction, spec: NormSpec, surface: Domain) -> QuadratureResult:
    """``[∫_S |u|^q |x|^{-mu} dσ]^{1/q}`` over the coordinate plane ``R^m × {0}``.

    Raises:
        DomainError: If ``surface`` is not a surface domain of ``u``'s dimension
        ParameterError: If ``mu >= m``
    """
    if surface.kind is not DomainKind.SURFACE or surface.m is None:
        raise DomainError("surface norm needs a surface domain")
    if surface.d != u.d:
        raise DomainError(f"surface lives in R^{surface.d}, function in R^{u.d}")
    if not spec.params.mu < surface.m:
        raise ParameterError(f"surface norm needs mu < m, got mu = {spec.params.mu}")
    restricted = trace(u, surface.m)
    return target_norm(restricted, spec.with_kind(NormKind.TARGET), surface.trace())


FUNCTIONALS: dict[
    NormKind, Callable[[TrialFunction, NormSpec, Domain], QuadratureResult]
] = {
    NormKind.TARGET: target_norm,
    NormKind.GAGLIARDO: gagliardo_seminorm,
    NormKind.MIXED: mixed_seminorm,
    NormKind.GRADIENT: gradient_norm,
    NormKind.SURFACE: surface_norm,
}


def evaluate_norm(u: TrialFunction, spec: NormSpec, domain: Domain) -> QuadratureResult:
    """Dispatch on ``spec.kind``."""
    try:
        functional = FUNCTIONALS[spec.kind]
    except KeyError:
        raise ParameterError(f"{spec.kind.value} is evaluated by the gls module") from None
    return functional(u, spec, domain)
