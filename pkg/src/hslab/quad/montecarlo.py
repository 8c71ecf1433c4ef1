"""Importance-sampled Monte Carlo for singular single and double integrals.

Points ``x`` are drawn with density proportional to ``|x|^{-a}`` on the ball
enclosing the domain; partners ``y = x + r·ω`` use ``r`` with density
proportional to ``r^{d-1-b}`` on ``(0, diam D)`` and ``ω`` uniform on the
sphere. Samples falling outside the domain carry zero weight, which keeps the
estimator unbiased.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigError, ParameterError
from ..model import Domain, DomainKind, InequalityParams, Region
from .result import QuadFlag, QuadMethod, QuadratureResult
from .rng import block_generator, block_sizes, sphere_area, unit_directions
from .settings import McConfig

logger = logging.getLogger(__name__)

PairKernel = Callable[[np.ndarray, np.ndarray], np.ndarray]
PointFunction = Callable[[np.ndarray], np.ndarray]

PROPOSAL_MARGIN = 0.1
HEAVY_TAIL_SHARE = 0.5
HALF_VARIANCE_GROWTH = 4.0


def default_pair_exponent(beta: float, d: int) -> float:
    """``max(0, β - d + 1/2)``, kept below ``d`` so the proposal normalises."""
    return min(max(0.0, beta - d + 0.5), d - PROPOSAL_MARGIN)


def default_origin_exponent(singular_order: float, d: int) -> float:
    """Flatten an origin singularity ``|x|^{-singular_order}`` by half an order."""
    return min(max(0.0, singular_order - 0.5), d - PROPOSAL_MARGIN)


def _check_exponent(name: str, value: float, d: int) -> None:
    if not (math.isfinite(value) and 0.0 <= value < d):
        raise ConfigError(f"{name} must lie in [0, {d}), got {value}")


def sampling_dimension(domain: Domain) -> int:
    if domain.kind is DomainKind.SURFACE and domain.m is not None:
        return domain.m
    return domain.d


@dataclass(frozen=True)
class _Proposal:
    d: int
    region: Region
    origin_exponent: float
    pair_exponent: float

    def sample_points(
        self, rng: np.random.Generator, n: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Points from ``|x|^{-a}`` on the enclosing ball, with their densities."""
        a, d, big_r = self.origin_exponent, self.d, self.region.enclosing_radius
        u = 1.0 - rng.random(n)
        rho = big_r * u ** (1.0 / (d - a))
        x = rho[:, None] * unit_directions(rng, n, d)
        density = (d - a) / (sphere_area(d) * big_r ** (d - a))
        if a != 0.0:
            density = density * rho ** (-a)
        else:
            density = np.full(n, density)
        return x, density

    def sample_partners(
        self, rng: np.random.Generator, x: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Partners ``x + r·ω`` with their conditional densities."""
        b, d, diam = self.pair_exponent, self.d, self.region.diameter
        n = x.shape[0]
        v = 1.0 - rng.random(n)
        r = diam * v ** (1.0 / (d - b))
        y = x + r[:, None] * unit_directions(rng, n, d)
        density = (d - b) / (sphere_area(d) * diam ** (d - b))
        density = density * r ** (-b) if b != 0.0 else np.full(n, density)
        return y, density


@dataclass
class _Estimate:
    mean: float
    stderr: float
    flags: tuple[str, ...]


def _reduce(weights: np.ndarray) -> _Estimate:
    """Mean and standard error with compensated sums; order fixed by the caller."""
    flags: list[str] = []
    finite = np.isfinite(weights)
    if not np.all(finite):
        flags.append(QuadFlag.NONFINITE_SAMPLES.value)
        weights = np.where(finite, weights, 0.0)
    n = weights.size
    mean = math.fsum(weights.tolist()) / n
    if n < 2:
        return _Estimate(mean, abs(mean), tuple(flags))
    centered = weights - mean
    squares = centered * centered
    sum_squares = math.fsum(squares.tolist())
    variance = sum_squares / (n - 1)

    if n >= 100 and sum_squares > 0.0:
        half = n // 2
        first = math.fsum(squares[:half].tolist())
        second = math.fsum(squares[half:].tolist())
        heavy = float(squares.max()) > HEAVY_TAIL_SHARE * sum_squares
        growing = first > 0.0 and second > HALF_VARIANCE_GROWTH * first
        if heavy or growing:
            flags.append(QuadFlag.INFINITE_VARIANCE.value)
    return _Estimate(mean, math.sqrt(variance / n), tuple(flags))


def _run_blocks(
    cfg: McConfig,
    n_total: int,
    block: Callable[[int, int], np.ndarray],
    block_size: int | None = None,
) -> np.ndarray:
    """Run blocks on the worker pool and concatenate them in block order."""
    sizes = block_sizes(n_total, block_size or cfg.block_size)

    def work(index: int) -> np.ndarray:
        return block(index, sizes[index])

    if cfg.workers == 1 or len(sizes) == 1:
        parts = [work(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    return np.concatenate(parts)


def _finish(
    estimate: _Estimate, method: QuadMethod, evaluations: int, seed: int, label: str
) -> QuadratureResult:
    if QuadFlag.INFINITE_VARIANCE.value in estimate.flags:
        logger.warning(
            "Monte Carlo weights look heavy-tailed; variance may be infinite",
            extra={"integral": label, "value": estimate.mean, "seed": seed},
        )
    return QuadratureResult(
        value=estimate.mean,
        error_estimate=estimate.stderr,
        method=method,
        evaluations=evaluations,
        seed=seed,
        flags=estimate.flags,
    )


def mc_double_integral(
    kernel: PairKernel,
    params: InequalityParams,
    domain: Domain,
    cfg: McConfig,
    *,
    window: float | None = None,
) -> QuadratureResult:
    """Estimate ``∫∫_{D×D} kernel(x, y) dx dy``.

    Args:
        kernel: Vectorised ``(n, d), (n, d) -> (n,)`` integrand
        params: Supplies the default proposal exponents and the validity check
        domain: Integration domain; whole space needs ``window``
        cfg: Sampler configuration
        window: Radius of the ball standing in for the whole space

    Raises:
        ParameterError: If ``2d + alpha1 + alpha2 - beta <= 0``
        ConfigError: If a proposal exponent is outside ``[0, d)``
    """
    d = sampling_dimension(domain)
    if not 2 * params.d + params.alpha1 + params.alpha2 - params.beta > 0:
        raise ParameterError("double integral diverges: 2d + alpha1 + alpha2 - beta <= 0")
    pair = (
        cfg.pair_exponent
        if cfg.pair_exponent is not None
        else default_pair_exponent(params.beta, d)
    )
    origin = (
        cfg.origin_exponent
        if cfg.origin_exponent is not None
        else default_origin_exponent(-params.alpha1, d)
    )
    _check_exponent("pair_exponent", pair, d)
    _check_exponent("origin_exponent", origin, d)
    proposal = _Proposal(d, domain.region(window), origin, pair)

    def block(index: int, n: int) -> np.ndarray:
        rng = block_generator(cfg.seed, index)
        x, qx = proposal.sample_points(rng, n)
        y, qy = proposal.sample_partners(rng, x)
        inside = proposal.region.contains(x) & proposal.region.contains(y)
        weights = np.zeros(n)
        if np.any(inside):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                values = np.asarray(kernel(x[inside], y[inside]), dtype=float)
                weights[inside] = values / (qx[inside] * qy[inside])
        return weights

    weights = _run_blocks(cfg, cfg.n_samples, block)
    return _finish(_reduce(weights), QuadMethod.MC_PAIRS, cfg.n_samples, cfg.seed, "pairs")


def mc_single_integral(
    f: PointFunction,
    domain: Domain,
    cfg: McConfig,
    *,
    window: float | None = None,
    singular_order: float = 0.0,
) -> QuadratureResult:
    """Estimate ``∫_D f(x) dx`` with an origin-weighted proposal."""
    d = sampling_dimension(domain)
    origin = (
        cfg.origin_exponent
        if cfg.origin_exponent is not None
        else default_origin_exponent(singular_order, d)
    )
    _check_exponent("origin_exponent", origin, d)
    proposal = _Proposal(d, domain.region(window), origin, 0.0)

    def block(index: int, n: int) -> np.ndarray:
        rng = block_generator(cfg.seed, index)
        x, qx = proposal.sample_points(rng, n)
        inside = proposal.region.contains(x)
        weights = np.zeros(n)
        if np.any(inside):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                weights[inside] = np.asarray(f(x[inside]), dtype=float) / qx[inside]
        return weights

    weights = _run_blocks(cfg, cfg.n_samples, block)
    return _finish(
        _reduce(weights), QuadMethod.MC_SINGLE, cfg.n_samples, cfg.seed, "single"
    )


def mc_nested_integral(
    kernel: PairKernel,
    outer_weight: PointFunction,
    power: float,
    domain: Domain,
    cfg: McConfig,
    *,
    inner_samples: int,
    window: float | None = None,
    outer_singular_order: float = 0.0,
    kernel_order: float = 0.0,
) -> QuadratureResult:
    """Estimate ``∫_D w(y) [∫_D kernel(x, y) dx]^power dy``.

    Each outer sample gets its own inner estimate from ``inner_samples``
    partners. The bias of raising a noisy inner mean to ``power`` is measured
    by comparing the two inner halves with the full inner mean, and its size
    is added to the error estimate.

    Raises:
        ConfigError: If ``inner_samples < 16`` or a proposal exponent is invalid
    """
    if inner_samples < 16:
        raise ConfigError(f"inner samples must be at least 16, got {inner_samples}")
    d = sampling_dimension(domain)
    pair = (
        cfg.pair_exponent
        if cfg.pair_exponent is not None
        else default_pair_exponent(kernel_order, d)
    )
    origin = (
        cfg.origin_exponent
        if cfg.origin_exponent is not None
        else default_origin_exponent(outer_singular_order, d)
    )
    _check_exponent("pair_exponent", pair, d)
    _check_exponent("origin_exponent", origin, d)
    proposal = _Proposal(d, domain.region(window), origin, pair)
    n_outer = max(32, cfg.n_samples // inner_samples)
    outer_block = max(1, cfg.block_size // inner_samples)
    half = inner_samples // 2

    def block(index: int, n: int) -> np.ndarray:
        rng = block_generator(cfg.seed, index)
        y, qy = proposal.sample_points(rng, n)
        y_rep = np.repeat(y, inner_samples, axis=0)
        x, qx = proposal.sample_partners(rng, y_rep)
        inside = proposal.region.contains(x)
        inner = np.zeros(n * inner_samples)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if np.any(inside):
                values = np.asarray(kernel(x[inside], y_rep[inside]), dtype=float)
                inner[inside] = values / qx[inside]
            inner = np.where(np.isfinite(inner), inner, 0.0).reshape(n, inner_samples)
            full = np.maximum(inner.mean(axis=1), 0.0) ** power
            halves = 0.5 * (
                np.maximum(inner[:, :half].mean(axis=1), 0.0) ** power
                + np.maximum(inner[:, half:].mean(axis=1), 0.0) ** power
            )
            outer_inside = proposal.region.contains(y)
            w = np.where(outer_inside, np.asarray(outer_weight(y), dtype=float), 0.0)
            scale = np.where(outer_inside, w / qy, 0.0)
        return np.stack([scale * full, scale * (halves - full)], axis=1)

    stacked = _run_blocks(cfg, n_outer, block, outer_block)

    estimate = _reduce(stacked[:, 0])
    bias = math.fsum(stacked[:, 1].tolist()) / n_outer
    flags = list(estimate.flags)
    if abs(bias) > estimate.stderr:
        flags.append(QuadFlag.INNER_BIAS.value)
    return _finish(
        _Estimate(estimate.mean, estimate.stderr + abs(bias), tuple(flags)),
        QuadMethod.MC_PAIRS,
        n_outer * inner_samples,
        cfg.seed,
        "nested",
    )
