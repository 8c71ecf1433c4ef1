"""Semi-analytic reductions for the one-dimensional log cusp ``|log|x|| · 1(|x| <= 1)``.

The Gagliardo double integral of the log cusp splits into a square part,
both points inside the unit interval, and a tail part, one point outside.
Writing ``|y| = t|x|`` in the square part separates the radial factor
``I₁ = 1/(2 + alpha - beta)`` from an angular integral over ``t``; the tail
part reduces to a single integral against ``Φ_a(x) = ∫_{|y|>1} |y|^a |x-y|^{-beta} dy``.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import special

from .cache import ResultCache
from .exceptions import DivergentIntegralError
from .model import Domain, DomainKind
from .quad.adaptive import Integrand, integrate_1d_singular
from .quad.result import QuadMethod, QuadratureResult, combine_sum
from .quad.rng import sphere_area
from .trialfuncs import Family, TrialFunction, log_power_moment

logger = logging.getLogger(__name__)

_cache = ResultCache(max_size=256, prefix="log_cusp")


def oracle_cache() -> ResultCache:
    """Cache shared by the log-cusp integrals."""
    return _cache


def configure_oracle_cache(max_size: int) -> None:
    """Resize the shared cache; a new size drops the cached entries."""
    global _cache
    if max_size != _cache.max_size:
        _cache = ResultCache(max_size=max_size, prefix="log_cusp")


def _halves(f_low: Integrand, f_high: Integrand, tol: float) -> QuadratureResult:
    """``∫₀¹`` as ``∫₀^{1/2} f_low(t) dt + ∫₀^{1/2} f_high(s) ds`` with ``t = 1 - s``."""
    low = integrate_1d_singular(f_low, 0.0, 0.5, (0.0,), tol)
    high = integrate_1d_singular(f_high, 0.0, 0.5, (0.0,), tol)
    return combine_sum([low, high], QuadMethod.ADAPTIVE_1D)


def angular_integral(p: float, beta: float, a: float, tol: float = 1e-10) -> QuadratureResult:
    """``J(a) = ∫₀¹ |log t|^p t^a [(1-t)^{-beta} + (1+t)^{-beta}] dt``."""
    if not a > -1.0:
        raise DivergentIntegralError(f"angular integral diverges at t = 0 for a = {a}")
    if not p - beta > -1.0:
        raise DivergentIntegralError(
            f"angular integral diverges at t = 1 for p - beta = {p - beta}"
        )

    def low(t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.abs(np.log(t)) ** p * t**a * ((1 - t) ** -beta + (1 + t) ** -beta)

    def high(s: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return (
                np.abs(np.log1p(-s)) ** p
                * (1 - s) ** a
                * (s**-beta + (2 - s) ** -beta)
            )

    return _halves(low, high, tol)


def exterior_potential(a: float, beta: float, s: np.ndarray) -> np.ndarray:
    """``Φ_a`` at ``x = 1 - s`` for ``0 < s <= 1``.

    Requires ``beta - a > 1`` for convergence at infinity.
    """
    s = np.asarray(s, dtype=float)
    if a == 0.0:
        return (s ** (1.0 - beta) + (2.0 - s) ** (1.0 - beta)) / (beta - 1.0)
    # ∫₁^∞ y^a (y ∓ x)^{-beta} dy = 2F1(beta, beta-a-1; beta-a; ±x) / (beta-a-1)
    x = 1.0 - s
    c = beta - a
    return (
        special.hyp2f1(beta, c - 1.0, c, x) + special.hyp2f1(beta, c - 1.0, c, -x)
    ) / (c - 1.0)


def tail_integral(
    p: float, beta: float, alpha1: float, alpha2: float, tol: float = 1e-10
) -> QuadratureResult:
    """``T = 2 ∫₀¹ |log x|^p [x^{alpha1} Φ_{alpha2}(x) + x^{alpha2} Φ_{alpha1}(x)] dx``."""
    for a in (alpha1, alpha2):
        if not beta - a > 1.0:
            raise DivergentIntegralError(
                f"exterior integral diverges: beta - alpha = {beta - a} <= 1"
            )

    def bracket(x: np.ndarray, s: np.ndarray) -> np.ndarray:
        return x**alpha1 * exterior_potential(
            alpha2, beta, s
        ) + x**alpha2 * exterior_potential(alpha1, beta, s)

    def low(x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.abs(np.log(x)) ** p * bracket(x, 1.0 - x)

    def high(s: np.ndarray) -> np.ndarray:
        return np.abs(np.log1p(-s)) ** p * bracket(1.0 - s, s)

    return _halves(low, high, tol).scaled(2.0)


def log_cusp_gagliardo_power(
    p: float,
    beta: float,
    alpha1: float = 0.0,
    alpha2: float = 0.0,
    *,
    include_tail: bool = True,
    tol: float = 1e-10,
) -> QuadratureResult:
    """Double integral ``∫∫ |u(x) - u(y)|^p |x|^{alpha1}|y|^{alpha2}|x-y|^{-beta}``.

    Over the unit interval squared when ``include_tail`` is false, over the
    whole line otherwise. Cached per exponent tuple.

    Raises:
        DivergentIntegralError: If the double integral is infinite
    """
    alpha = alpha1 + alpha2
    if not 2.0 + alpha - beta > 0.0:
        raise DivergentIntegralError(
            f"radial factor diverges: 2 + alpha - beta = {2.0 + alpha - beta}"
        )
    key = _cache.keys.generate_key(p, beta, alpha1, alpha2, include_tail, tol)

    def compute() -> QuadratureResult:
        radial = 1.0 / (2.0 + alpha - beta)
        parts = [
            angular_integral(p, beta, alpha2, tol).scaled(2.0 * radial),
            angular_integral(p, beta, alpha1, tol).scaled(2.0 * radial),
        ]
        if include_tail:
            parts.append(tail_integral(p, beta, alpha1, alpha2, tol))
        result = combine_sum(parts, QuadMethod.ADAPTIVE_1D)
        logger.debug(
            "Computed log-cusp difference integral",
            extra={"p": p, "beta": beta, "value": result.value, "tail": include_tail},
        )
        return result

    return _cache.get_or_compute(key, compute)


def log_cusp_target_power(q: float, mu: float, d: int = 1) -> QuadratureResult:
    """``∫_{|x|<1} |log|x||^q |x|^{-mu} dx = ω_{d-1} Γ(q+1) / (d - mu)^{q+1}``."""
    value = sphere_area(d) * log_power_moment(mu, q, d)
    return QuadratureResult(
        value=value, error_estimate=0.0, method=QuadMethod.CLOSED_FORM, evaluations=1
    )


def gagliardo_oracle_applies(u: TrialFunction, domain: Domain) -> bool:
    """Whether the reduction covers ``u`` on ``domain``.

    It covers the dilated, rescaled and shifted d=1 log cusp on the whole line,
    and on the ball whose radius equals the dilation.
    """
    if u.family is not Family.LOG_CUSP or u.d != 1:
        return False
    if domain.kind is DomainKind.WHOLE_SPACE:
        return True
    return domain.kind is DomainKind.BALL and domain.radius == u.theta


def log_cusp_gagliardo(
    u: TrialFunction,
    p: float,
    beta: float,
    alpha1: float,
    alpha2: float,
    domain: Domain,
    tol: float = 1e-10,
) -> QuadratureResult:
    """Gagliardo double integral of a covered log cusp, before the ``1/p`` power."""
    base = log_cusp_gagliardo_power(
        p,
        beta,
        alpha1,
        alpha2,
        include_tail=domain.kind is DomainKind.WHOLE_SPACE,
        tol=tol,
    )
    factor = abs(u.amplitude) ** p * u.theta ** (2.0 + alpha1 + alpha2 - beta)
    return base.scaled(factor) if factor != 1.0 else base


def blowup_radial_factor(lam: float, p: float, d: int = 1) -> float:
    """``I₁`` at ``beta = d(1 + λp)`` with no pair weight: ``1 / (d(1 - λp))``."""
    gap = d * (1.0 - lam * p)
    if gap <= 0.0:
        raise DivergentIntegralError(f"radial factor diverges at p = {p}", abscissa=p)
    return 1.0 / gap

