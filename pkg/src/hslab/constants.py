"""Rayleigh quotients and lower-bound scans for the best constants.

Every quotient of an admissible trial function is a lower bound for the best
constant of its inequality. Scans follow an exponent towards the threshold at
which the constant blows up and fit the rate ``γ`` in
``quotient ≍ (p / |p - threshold|)^γ``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .exceptions import HSLabError, ParameterError, ZeroDenominatorError
from .model import Domain, DomainKind, InequalityKind, InequalityParams
from .norms import (
    NormKind,
    NormSpec,
    gagliardo_seminorm,
    gradient_norm,
    mixed_seminorm,
    surface_norm,
    target_norm,
)
from .observability import MetricsLogger
from .quad.result import QuadratureResult
from .quad.settings import QuadSettings
from .scaling import check_necessary_condition
from .trialfuncs import TrialFunction, log_cusp, smooth_bump

logger = logging.getLogger(__name__)
metrics = MetricsLogger(logger)

RATE_TOLERANCE = 0.15
CERTIFICATION_FACTOR = 3.0


@dataclass(frozen=True)
class QuotientSample:
    """One Rayleigh quotient ``lhs / rhs`` at scan abscissa ``abscissa``."""

    abscissa: float
    quotient: float
    lhs: QuadratureResult
    rhs: QuadratureResult
    certified_lower: float
    flags: tuple[str, ...] = ()

    @property
    def relative_error(self) -> float:
        return self.lhs.relative_error + self.rhs.relative_error

    def row(self) -> dict[str, float]:
        return {
            "p": self.abscissa,
            "quotient": self.quotient,
            "lhs_err": self.lhs.error_estimate,
            "rhs_err": self.rhs.error_estimate,
            "certified_lower": self.certified_lower,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.row(),
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "flags": list(self.flags),
        }


def _surface_of(domain: Domain, m: int | None) -> Domain:
    if m is None:
        raise ParameterError("surface quotients need the surface dimension m")
    radius = domain.radius if domain.kind is DomainKind.BALL else None
    return Domain.surface(domain.d, m, radius)


def _sides(
    kind: InequalityKind, spec: NormSpec, domain: Domain, m: int | None
) -> tuple[
    Callable[[TrialFunction], QuadratureResult], Callable[[TrialFunction], QuadratureResult]
]:
    if kind is InequalityKind.ORDINARY:
        target = spec.with_kind(NormKind.TARGET, target_exponent="q")
        gagliardo = spec.with_kind(NormKind.GAGLIARDO)
        return (
            lambda u: target_norm(u, target, domain),
            lambda u: gagliardo_seminorm(u, gagliardo, domain),
        )
    if kind is InequalityKind.MIXED:
        target = spec.with_kind(NormKind.TARGET, target_exponent="r")
        mixed = spec.with_kind(NormKind.MIXED)
        return (
            lambda u: target_norm(u, target, domain),
            lambda u: mixed_seminorm(u, mixed, domain),
        )
    if kind is InequalityKind.SURFACE:
        surface = _surface_of(domain, m)
        trace_spec = spec.with_kind(NormKind.SURFACE)
        gagliardo = spec.with_kind(NormKind.GAGLIARDO)
        return (
            lambda u: surface_norm(u, trace_spec, surface),
            lambda u: gagliardo_seminorm(u, gagliardo, domain),
        )
    gagliardo = spec.with_kind(NormKind.GAGLIARDO)
    gradient = spec.with_kind(NormKind.GRADIENT)
    return (
        lambda u: gagliardo_seminorm(u, gagliardo, domain),
        lambda u: gradient_norm(u, gradient, domain),
    )


def rayleigh_quotient(
    u: TrialFunction,
    kind: InequalityKind | str,
    params: InequalityParams,
    domain: Domain,
    settings: QuadSettings | None = None,
    m: int | None = None,
    abscissa: float | None = None,
) -> QuotientSample:
    """Left functional over right functional of ``kind`` at ``u``.

    Ordinary: target / Gagliardo. Mixed: target with ``r`` / mixed seminorm.
    Surface: trace norm on ``R^m × {0}`` / Gagliardo. Derivative:
    Gagliardo / gradient norm.

    Raises:
        MissingExponentError: If ``kind`` needs an exponent that is unset
        ZeroDenominatorError: If the right side vanishes, e.g. for constant ``u``
    """
    kind = InequalityKind(kind)
    params.require(kind)
    spec = NormSpec(
        kind=NormKind.TARGET, params=params, settings=settings or QuadSettings()
    )
    left, right = _sides(kind, spec, domain, m)
    rhs = right(u)
    if rhs.value == 0.0:
        raise ZeroDenominatorError(
            f"{kind.value} right side vanishes for {u.family.value}"
        )
    lhs = left(u)
    quotient = lhs.value / rhs.value
    combined = lhs.relative_error + rhs.relative_error
    sample = QuotientSample(
        abscissa=float(abscissa if abscissa is not None else params.exponent("p")),
        quotient=quotient,
        lhs=lhs,
        rhs=rhs,
        certified_lower=quotient - CERTIFICATION_FACTOR * quotient * combined,
        flags=tuple(dict.fromkeys((*lhs.flags, *rhs.flags))),
    )
    metrics.log_scan_point(kind.value, sample.abscissa, quotient, sample.certified_lower)
    return sample


@dataclass
class BlowupFit:
    """Quotients along a scan towards ``threshold`` and the fitted rate."""

    kind: str
    threshold: float
    scan: list[QuotientSample] = field(default_factory=list)
    fitted_rate: float = math.nan
    window: tuple[float, float] = (math.nan, math.nan)
    within_window: bool = False
    monotone: bool = False
    truncated: bool = False
    flags: list[str] = field(default_factory=list)

    def rows(self) -> list[dict[str, float]]:
        return [s.row() for s in self.scan]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "fitted_rate": self.fitted_rate,
            "window": list(self.window),
            "within_window": self.within_window,
            "monotone": self.monotone,
            "truncated": self.truncated,
            "flags": self.flags,
            "table": self.rows(),
            "scan": [s.to_dict() for s in self.scan],
        }


def _check_scan_grid(grid: Sequence[float], threshold: float) -> list[float]:
    values = [float(p) for p in grid]
    if len(values) < 2:
        raise ParameterError("a scan needs at least two abscissas")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParameterError("scan grid must increase towards the threshold")
    if values[0] < 1.0 or values[-1] >= threshold:
        raise ParameterError(f"scan grid must lie in [1, {threshold:g})")
    return values


def _evaluate_points(
    points: Sequence[float],
    evaluate: Callable[[float], QuotientSample],
    workers: int,
) -> list[QuotientSample | HSLabError]:
    def guarded(p: float) -> QuotientSample | HSLabError:
        try:
            return evaluate(p)
        except HSLabError as e:
            return e

    if workers == 1:
        return [guarded(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(guarded, points))


def _fit(
    kind: str,
    threshold: float,
    outcomes: Sequence[QuotientSample | HSLabError],
    window: tuple[float, float],
) -> BlowupFit:
    fit = BlowupFit(kind=kind, threshold=threshold, window=window)
    for outcome in outcomes:
        if isinstance(outcome, HSLabError) or not (
            math.isfinite(outcome.quotient) and outcome.quotient > 0
        ):
            fit.truncated = True
            fit.flags.append("truncated")
            logger.warning(
                "Scan truncated at a failed or non-finite quotient",
                extra={"kind": kind, "completed": len(fit.scan), "reason": str(outcome)},
            )
            break
        fit.scan.append(outcome)
        fit.flags.extend(f for f in outcome.flags if f not in fit.flags)

    quotients = [s.quotient for s in fit.scan]
    fit.monotone = len(quotients) >= 2 and all(
        b > a for a, b in zip(quotients, quotients[1:])
    )
    if len(fit.scan) >= 2:
        p = np.array([s.abscissa for s in fit.scan])
        x = np.log(p / np.abs(p - threshold))
        y = np.log(np.asarray(quotients))
        fit.fitted_rate = float(np.polyfit(x, y, 1)[0])
        fit.within_window = window[0] <= fit.fitted_rate <= window[1]
    logger.info(
        "Fitted blow-up rate",
        extra={
            "kind": kind,
            "threshold": threshold,
            "rate": fit.fitted_rate,
            "points": len(fit.scan),
        },
    )
    return fit


def blowup_params(
    kind: InequalityKind | str,
    lam: float,
    d: int,
    p: float,
    m: int | None = None,
    rhs_p: float = 2.0,
) -> InequalityParams:
    """Exponents of the blow-up family at scan abscissa ``p``.

    Ordinary and mixed scans use ``beta = d(1 + λp)``, ``mu = λdp`` and equal
    exponents. Surface scans move ``q`` with ``mu = λq``, keep the seminorm
    exponent at ``rhs_p`` and take ``beta`` from the surface balance identity.
    """
    kind = InequalityKind(kind)
    if kind is InequalityKind.ORDINARY:
        return InequalityParams(d=d, p=p, q=p, beta=d * (1 + lam * p), mu=lam * d * p)
    if kind is InequalityKind.MIXED:
        return InequalityParams(
            d=d, p=p, q=p, r=p, beta=d * (1 + lam * p), mu=lam * d * p
        )
    if kind is InequalityKind.SURFACE:
        if m is None or not 1 <= m <= d - 1:
            raise ParameterError(f"surface scans need m in [1, {d - 1}]")
        mu = lam * p
        beta = 2 * d - rhs_p * (m - mu) / p
        return InequalityParams(d=d, p=rhs_p, q=p, beta=beta, mu=mu)
    raise ParameterError("derivative constants are probed by dd_constant_probe")


def lower_bound_scan(
    kind: InequalityKind | str,
    lam: float,
    d: int,
    p_grid: Sequence[float],
    threshold: float | None = None,
    *,
    family: Callable[[int], TrialFunction] = log_cusp,
    m: int | None = None,
    rhs_p: float = 2.0,
    settings: QuadSettings | None = None,
) -> BlowupFit:
    """Quotients of ``family`` along ``p_grid`` and the fitted blow-up rate.

    Args:
        kind: ``ordinary``, ``mixed`` or ``surface``
        lam: λ in (0, 1)
        d: Space dimension
        p_grid: Increasing abscissas below the threshold
        threshold: Divergence point; ``1/λ`` by default and ``m/λ`` for surfaces
        family: Trial-function factory taking the dimension
        m: Surface dimension for the surface kind
        rhs_p: Fixed seminorm exponent of surface scans
        settings: Quadrature settings

    Returns:
        Fit whose window is ``[λ - 0.15, 1 + 0.15]``; the scan stops at the
        first failed or non-finite quotient and is then marked truncated
    """
    kind = InequalityKind(kind)
    if threshold is None:
        threshold = (m / lam) if kind is InequalityKind.SURFACE and m else 1.0 / lam
    grid = _check_scan_grid(p_grid, threshold)
    settings = settings or QuadSettings()
    domain = Domain.whole_space(d)
    u = family(d)

    def evaluate(p: float) -> QuotientSample:
        params = blowup_params(kind, lam, d, p, m, rhs_p)
        return rayleigh_quotient(u, kind, params, domain, settings, m=m, abscissa=p)

    outcomes = _evaluate_points(grid, evaluate, settings.mc.workers)
    window = (lam - RATE_TOLERANCE, 1.0 + RATE_TOLERANCE)
    return _fit(kind.value, threshold, outcomes, window)


def remark_threshold(alpha1: float, alpha2: float, lam: float, d: int) -> float:
    """``p₀ = 1/λ + α/(λd)`` with ``α = alpha1 + alpha2``."""
    return 1.0 / lam + (alpha1 + alpha2) / (lam * d)


def remark_params(
    alpha1: float, alpha2: float, lam: float, d: int, p: float
) -> InequalityParams:
    """Exponents of the shifted-threshold scan at abscissa ``p``."""
    return InequalityParams(
        d=d,
        p=p,
        q=p,
        alpha1=alpha1,
        alpha2=alpha2,
        beta=d * (1 + lam * p),
        mu=lam * d * p - (alpha1 + alpha2),
    )


def remark_scan_general_alpha(
    alpha1: float,
    alpha2: float,
    lam: float,
    d: int,
    p_grid: Sequence[float],
    settings: QuadSettings | None = None,
) -> BlowupFit:
    """Log-cusp scan with nonzero pair weights towards ``p₀ = 1/λ + α/(λd)``.

    Uses ``mu = λdp - α`` so that the target integral diverges exactly at
    ``p₀``, and ``beta = d(1 + λp)``. The rate window is
    ``[1/p₀ - 0.15, 1 + 0.15]``.
    """
    if alpha1 < 0 or alpha2 < 0:
        raise ParameterError("pair weight exponents must be non-negative")
    threshold = remark_threshold(alpha1, alpha2, lam, d)
    grid = _check_scan_grid(p_grid, threshold)
    settings = settings or QuadSettings()
    domain = Domain.whole_space(d)
    u = log_cusp(d)

    def evaluate(p: float) -> QuotientSample:
        params = remark_params(alpha1, alpha2, lam, d, p)
        return rayleigh_quotient(u, InequalityKind.ORDINARY, params, domain, settings)

    outcomes = _evaluate_points(grid, evaluate, settings.mc.workers)
    window = (1.0 / threshold - RATE_TOLERANCE, 1.0 + RATE_TOLERANCE)
    return _fit("remark", threshold, outcomes, window)


@dataclass
class DerivativeScan:
    """Quotients of the derivative inequality over a ``(p, s)`` grid."""

    samples: list[tuple[float, float, QuotientSample]] = field(default_factory=list)
    skipped: list[dict[str, Any]] = field(default_factory=list)
    ratio_bound: float = 50.0
    max_min_ratio: float = math.nan
    bounded: bool = False
    flags: list[str] = field(default_factory=list)

    def rows(self) -> list[dict[str, float]]:
        return [{**sample.row(), "s": s} for _, s, sample in self.samples]

    def to_dict(self) -> dict[str, Any]:
        return {
            "table": self.rows(),
            "skipped": self.skipped,
            "ratio_bound": self.ratio_bound,
            "max_min_ratio": self.max_min_ratio,
            "bounded": self.bounded,
            "flags": self.flags,
        }


def dd_params(lam: float, d: int, p: float, s: float) -> InequalityParams:
    """Derivative-kind exponents with ``beta = d(1 + λp)`` and balanced ``mu``."""
    mu = d - s * (1.0 + d * (1.0 - lam * p) / p)
    return InequalityParams(d=d, p=p, s=s, beta=d * (1 + lam * p), mu=mu)


def dd_constant_probe(
    lam: float,
    d: int,
    p_grid: Sequence[float],
    s_grid: Sequence[float],
    ratio_bound: float = 50.0,
    settings: QuadSettings | None = None,
) -> DerivativeScan:
    """Quotients of a smooth bump for every balanced ``(p, s)`` pair.

    Pairs that are not integrable (``λp >= 1``) or whose balance residual is
    not zero are skipped with a flag. The scan is bounded when the largest
    over the smallest quotient stays within ``ratio_bound``.
    """
    settings = settings or QuadSettings()
    domain = Domain.whole_space(d)
    u = smooth_bump(d)
    scan = DerivativeScan(ratio_bound=ratio_bound)

    for p in p_grid:
        for s in s_grid:
            if not lam * p < 1.0:
                scan.skipped.append({"p": p, "s": s, "reason": "not_integrable"})
                continue
            params = dd_params(lam, d, p, s)
            condition = check_necessary_condition(InequalityKind.DERIVATIVE, params)
            if not condition.holds:
                scan.skipped.append({"p": p, "s": s, "reason": "balance_violated"})
                continue
            try:
                sample = rayleigh_quotient(
                    u, InequalityKind.DERIVATIVE, params, domain, settings
                )
            except HSLabError as e:
                scan.skipped.append({"p": p, "s": s, "reason": str(e)})
                continue
            scan.samples.append((float(p), float(s), sample))
            scan.flags.extend(f for f in sample.flags if f not in scan.flags)

    if scan.skipped:
        scan.flags.append("pairs_skipped")
        logger.warning(
            "Derivative scan skipped pairs", extra={"skipped": scan.skipped}
        )
    quotients = [sample.quotient for _, _, sample in scan.samples]
    if quotients and min(quotients) > 0:
        scan.max_min_ratio = max(quotients) / min(quotients)
        scan.bounded = scan.max_min_ratio <= ratio_bound
    return scan
