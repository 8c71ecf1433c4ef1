"""Adaptive one-dimensional quadrature for integrands with endpoint singularities.

Each interval is split at the declared singular points. Pieces that end in a
singular point are mapped to ``t = -log(|x - s| / L)`` and integrated panel
by panel with panels of width ``ln 4``; this is geometric grading with ratio
0.25 towards ``s``. Every panel is integrated by a Gauss–Legendre 10/21
point pair with bisection on disagreement.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ParameterError
from .result import QuadFlag, QuadMethod, QuadratureResult
from .rng import sphere_area

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

GRADING_RATIO = 0.25
PANEL_WIDTH = -math.log(GRADING_RATIO)
MAX_DEPTH = 60
MAX_PANELS = 480
MIN_PANELS = 6
ZERO_PANELS = 24
MAX_EVALUATIONS = 4_000_000

_LOW_X, _LOW_W = np.polynomial.legendre.leggauss(10)
_HIGH_X, _HIGH_W = np.polynomial.legendre.leggauss(21)
_EPS = np.finfo(float).eps


@dataclass
class _Tally:
    evaluations: int = 0
    flags: set[str] = field(default_factory=set)


def _rule_pair(g: Integrand, lo: float, hi: float, tally: _Tally) -> tuple[float, float]:
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = np.concatenate([mid + half * _HIGH_X, mid + half * _LOW_X])
    values = np.asarray(g(nodes), dtype=float)
    tally.evaluations += nodes.size
    if not np.all(np.isfinite(values)):
        tally.flags.add(QuadFlag.RESOLUTION_LIMITED.value)
        values = np.where(np.isfinite(values), values, 0.0)
    n_high = _HIGH_X.size
    high = half * float(np.dot(_HIGH_W, values[:n_high]))
    low = half * float(np.dot(_LOW_W, values[n_high:]))
    return high, low


def _adaptive(
    g: Integrand, lo: float, hi: float, tol: float, abs_floor: float, tally: _Tally
) -> tuple[float, float]:
    """Bisection driven by the 10/21 point disagreement."""
    values: list[float] = []
    errors: list[float] = []
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        high, low = _rule_pair(g, a, b, tally)
        err = abs(high - low)
        accept = err <= max(tol * abs(high), abs_floor)
        exhausted = depth >= MAX_DEPTH or tally.evaluations >= MAX_EVALUATIONS
        if accept or exhausted or b - a <= 4 * _EPS * max(abs(a), abs(b)):
            if not accept and exhausted:
                tally.flags.add(QuadFlag.NONCONVERGENT.value)
            values.append(high)
            errors.append(err)
            continue
        mid = 0.5 * (a + b)
        stack.append((a, mid, depth + 1))
        stack.append((mid, b, depth + 1))
    return math.fsum(values), math.fsum(errors)


def _graded(
    f: Integrand, singular: float, regular: float, tol: float, tally: _Tally
) -> tuple[float, float]:
    """Integral over the segment between ``singular`` and ``regular``."""
    length = regular - singular
    scale = abs(length)

    def g(t: np.ndarray) -> np.ndarray:
        offset = np.exp(-t)
        return np.asarray(f(singular + length * offset), dtype=float) * scale * offset

    resolution = 8 * _EPS * abs(singular)
    contributions: list[float] = []
    errors: list[float] = []
    total = 0.0
    tail = 0.0
    converged = False
    for k in range(MAX_PANELS):
        t0 = k * PANEL_WIDTH
        value, err = _adaptive(
            g, t0, t0 + PANEL_WIDTH, tol, 0.01 * tol * abs(total), tally
        )
        contributions.append(value)
        errors.append(err)
        total = math.fsum(contributions)

        if k + 1 >= MIN_PANELS:
            if total == 0.0:
                if k + 1 >= ZERO_PANELS:
                    converged = True
                    break
                continue
            prev, last = abs(contributions[-2]), abs(value)
            if prev == 0.0 and last == 0.0:
                converged = True
                break
            ratio = last / prev if prev > 0.0 else math.inf
            if ratio < 1.0:
                tail = math.copysign(last * ratio / (1.0 - ratio), value)
                if abs(tail) <= 0.01 * tol * abs(total):
                    converged = True
                    break
        if scale * math.exp(-(t0 + PANEL_WIDTH)) <= resolution:
            tally.flags.add(QuadFlag.RESOLUTION_LIMITED.value)
            converged = abs(tail) <= tol * abs(total)
            break
        if tally.evaluations >= MAX_EVALUATIONS:
            break

    error = math.fsum(errors) + abs(tail)
    if not converged:
        tally.flags.add(QuadFlag.NONCONVERGENT.value)
        error = max(error, abs(contributions[-1]) * len(contributions), abs(tail))
    return total + tail, error


def _segments(
    a: float, b: float, singular_points: Sequence[float]
) -> tuple[list[float], set[float]]:
    marks = {float(s) for s in singular_points if a <= s <= b}
    cuts = sorted(marks | {a, b})
    return cuts, marks


def _integrate_finite(
    f: Integrand, a: float, b: float, singular_points: Sequence[float], tol: float,
    tally: _Tally,
) -> tuple[float, float]:
    cuts, marks = _segments(a, b, singular_points)
    values: list[float] = []
    errors: list[float] = []
    for lo, hi in zip(cuts[:-1], cuts[1:], strict=True):
        if hi <= lo:
            continue
        left, right = lo in marks, hi in marks
        if left and right:
            mid = 0.5 * (lo + hi)
            pieces = [_graded(f, lo, mid, tol, tally), _graded(f, hi, mid, tol, tally)]
        elif left:
            pieces = [_graded(f, lo, hi, tol, tally)]
        elif right:
            pieces = [_graded(f, hi, lo, tol, tally)]
        else:
            pieces = [_adaptive(f, lo, hi, tol, 0.0, tally)]
        for value, err in pieces:
            values.append(value)
            errors.append(err)
    return math.fsum(values), math.fsum(errors)


def integrate_1d_singular(
    f: Integrand,
    a: float,
    b: float,
    singular_points: Sequence[float] = (),
    tol: float = 1e-10,
) -> QuadratureResult:
    """Integrate a vectorised ``f`` over ``(a, b)``.

    Args:
        f: Integrand accepting and returning 1-D arrays
        a: Finite lower limit
        b: Upper limit, may be ``inf``
        singular_points: Points of ``[a, b]`` to grade towards; points outside
            the interval are ignored
        tol: Relative tolerance

    Returns:
        Result with ``adaptive_1d`` method; non-convergence is reported through
        flags and an inflated error estimate

    Raises:
        ParameterError: If the limits are not ordered or ``a`` is infinite
    """
    if not math.isfinite(a) or not a < b:
        raise ParameterError(f"invalid integration limits ({a}, {b})")
    tally = _Tally()

    if math.isinf(b):
        # x = a + (1 - u)/u maps (0, 1] onto [a, inf)
        def g(u: np.ndarray) -> np.ndarray:
            with np.errstate(divide="ignore", invalid="ignore"):
                x = a + (1.0 - u) / u
                return np.asarray(f(x), dtype=float) / (u * u)

        mapped = [0.0, *(1.0 / (1.0 + (s - a)) for s in singular_points if s >= a)]
        value, error = _integrate_finite(g, 0.0, 1.0, mapped, tol, tally)
    else:
        value, error = _integrate_finite(f, a, b, singular_points, tol, tally)

    flags = tuple(sorted(tally.flags))
    if QuadFlag.NONCONVERGENT.value in flags:
        logger.warning(
            "Adaptive quadrature did not converge",
            extra={"interval": [a, b], "value": value, "error_estimate": error},
        )
    return QuadratureResult(
        value=value,
        error_estimate=error,
        method=QuadMethod.ADAPTIVE_1D,
        evaluations=max(tally.evaluations, 1),
        flags=flags,
    )


def _power_law_tail(h: Integrand, eps0: float) -> tuple[float, float]:
    """``∫₀^ε h`` extrapolated from the local power law of ``h`` just outside ``ε``.

    The error is the spread between the exponents fitted on ``[ε, 2ε]`` and
    ``[2ε, 4ε]``; it vanishes for a pure power.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        edge = np.abs(np.asarray(h(np.array([eps0, 2 * eps0, 4 * eps0])), dtype=float))
    if not np.all(np.isfinite(edge)):
        return 0.0, math.inf
    if edge[0] == 0.0:
        return 0.0, 0.0
    if np.any(edge == 0.0):
        return 0.0, float(edge[0] * eps0)
    k_near = math.log(edge[1] / edge[0]) / math.log(2.0)
    k_far = math.log(edge[2] / edge[1]) / math.log(2.0)
    if not k_near > -1.0:
        return 0.0, math.inf
    tail = float(edge[0]) * eps0 / (k_near + 1.0)
    far = float(edge[0]) * eps0 / (k_far + 1.0) if k_far > -1.0 else math.inf
    return tail, abs(far - tail)


def integrate_radial(
    g: Integrand,
    d: int,
    radius: float = 1.0,
    tol: float = 1e-10,
    singular_points: Sequence[float] = (),
    origin_exclusion: float = 0.0,
    origin_tail: Callable[[float], float] | None = None,
) -> QuadratureResult:
    """``ω_{d-1} ∫₀^R g(ρ) ρ^{d-1} dρ`` for a radial integrand ``F(x) = g(|x|)``.

    When ``origin_exclusion`` is positive the ball of that radius is left out;
    its contribution comes from ``origin_tail`` when supplied, otherwise from
    the local power law of the integrand at the excluded radius.
    """
    if d < 1:
        raise ParameterError("dimension must be at least 1")
    eps0 = origin_exclusion if 0.0 < origin_exclusion < radius else 0.0

    def h(rho: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(g(rho), dtype=float)
            return values if d == 1 else values * rho ** (d - 1)

    marks = [eps0, *singular_points]
    inner = integrate_1d_singular(h, eps0, radius, marks, tol)
    value, error = inner.value, inner.error_estimate
    if eps0 > 0.0:
        if origin_tail is not None:
            value += origin_tail(eps0)
        else:
            tail, spread = _power_law_tail(h, eps0)
            value += tail
            error += spread

    omega = sphere_area(d)
    return QuadratureResult(
        value=omega * value,
        error_estimate=omega * error,
        method=QuadMethod.POLAR_RADIAL,
        evaluations=inner.evaluations,
        flags=inner.flags,
    )
