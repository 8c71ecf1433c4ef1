"""Bilateral Grand Lebesgue Space norms and the embedding checks built on them.

``||f||_G(ψ) = sup_{a < p < b} |f|_p / ψ(p)``. The supremum is taken on a dense
log-spaced grid of ``p`` first, then refined by a bounded scalar search inside
the best grid cell; ``|f|_p / ψ(p)`` need not be unimodal.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal, Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import interpolate, optimize

from .exceptions import (
    DimensionError,
    DivergentIntegralError,
    HSLabError,
    ParameterError,
)
from .model import Domain, DomainKind, InequalityParams
from .norms import NormKind, NormSpec, gagliardo_seminorm, mixed_seminorm, target_norm
from .quad.adaptive import integrate_1d_singular
from .quad.result import QuadMethod, QuadratureResult
from .quad.settings import QuadSettings
from .trialfuncs import Product, TrialFunction

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 64
REFINE_XATOL = 1e-10
CERTIFICATION_FACTOR = 3.0


class LpEvaluator(Protocol):
    """``p -> |f|_p`` as a quadrature result."""

    def __call__(self, p: float) -> QuadratureResult: ...


def _check_interval(a: float, b: float) -> None:
    if not (1.0 <= a < b):
        raise ParameterError(f"ψ needs 1 <= a < b, got ({a}, {b})")


def log_grid(a: float, b: float, n: int) -> np.ndarray:
    """``n`` log-spaced points from ``a`` to ``b``; ``log_grid(a, b, 2n-1)`` contains it."""
    if n < 2:
        raise ParameterError("a p-grid needs at least two points")
    if not math.isfinite(b):
        raise ParameterError("unbounded ψ interval needs an explicit upper grid end")
    return np.exp(np.linspace(math.log(a), math.log(b), n))


class PsiFunction(ABC):
    """Positive continuous function on ``(a, b)`` defining a BGLS norm."""

    a: float
    b: float

    @abstractmethod
    def __call__(self, p: float) -> float: ...

    @abstractmethod
    def describe(self) -> dict[str, Any]: ...

    def nodes(self) -> np.ndarray | None:
        """Fixed evaluation points, or None when ψ may be evaluated anywhere."""
        return None

    @property
    def refinable(self) -> bool:
        return self.nodes() is None

    def grid(
        self, n: int, interval: tuple[float, float] | None = None
    ) -> np.ndarray:
        lo, hi = interval if interval is not None else (self.a, self.b)
        fixed = self.nodes()
        if fixed is not None:
            return fixed[(fixed >= lo) & (fixed <= hi)]
        return log_grid(lo, hi, n)


class AnalyticPsi(PsiFunction):
    """``coefficient · p^power · Π |p - c|^γ`` on ``(a, b)``."""

    def __init__(
        self,
        a: float,
        b: float,
        coefficient: float = 1.0,
        power: float = 0.0,
        factors: Sequence[tuple[float, float]] = (),
    ) -> None:
        _check_interval(a, b)
        if not coefficient > 0:
            raise ParameterError("ψ coefficient must be positive")
        self.a, self.b = float(a), float(b)
        self.coefficient = float(coefficient)
        self.power = float(power)
        self.factors = tuple((float(c), float(g)) for c, g in factors)

    def __call__(self, p: float) -> float:
        value = self.coefficient * p**self.power
        for c, gamma in self.factors:
            gap = abs(p - c)
            if gap == 0.0:
                return 0.0 if gamma > 0 else math.inf
            value *= gap**gamma
        return value

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "analytic",
            "a": self.a,
            "b": self.b,
            "coefficient": self.coefficient,
            "power": self.power,
            "factors": [list(f) for f in self.factors],
        }


class TabulatedPsi(PsiFunction):
    """Table of ``(p, ψ(p))`` with monotone cubic interpolation between nodes."""

    def __init__(self, p_nodes: Sequence[float], values: Sequence[float]) -> None:
        p = np.asarray(p_nodes, dtype=float)
        v = np.asarray(values, dtype=float)
        if p.shape != v.shape or p.size < 2:
            raise ParameterError("ψ table needs matching nodes and values, two at least")
        if np.any(np.diff(p) <= 0):
            raise ParameterError("ψ table nodes must increase")
        if not np.all(np.isfinite(v) & (v > 0)):
            raise ParameterError("ψ table values must be positive and finite")
        _check_interval(float(p[0]), float(p[-1]))
        self.a, self.b = float(p[0]), float(p[-1])
        self.p_nodes, self.values = p, v
        self._interp = interpolate.PchipInterpolator(p, v, extrapolate=False)

    def __call__(self, p: float) -> float:
        if not self.a <= p <= self.b:
            return math.inf
        hit = np.flatnonzero(self.p_nodes == p)
        if hit.size:
            return float(self.values[hit[0]])
        return float(self._interp(p))

    def nodes(self) -> np.ndarray:
        return self.p_nodes

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "table",
            "p": self.p_nodes.tolist(),
            "values": self.values.tolist(),
        }


class DegeneratePsi(PsiFunction):
    """``ψ_r(p) = 1`` at ``p = r`` and ``∞`` elsewhere; its norm is ``|f|_r``."""

    def __init__(self, r: float) -> None:
        if not r >= 1.0:
            raise ParameterError(f"degenerate ψ needs r >= 1, got {r}")
        self.r = float(r)
        self.a = self.b = self.r

    def __call__(self, p: float) -> float:
        return 1.0 if p == self.r else math.inf

    def nodes(self) -> np.ndarray:
        return np.array([self.r])

    def describe(self) -> dict[str, Any]:
        return {"kind": "degenerate", "r": self.r}


class ScaledPsi(PsiFunction):
    """``factor(p) · base(p)``."""

    def __init__(
        self, base: PsiFunction, factor: Callable[[float], float], label: str
    ) -> None:
        self.base = base
        self.factor = factor
        self.label = label
        self.a, self.b = base.a, base.b

    @classmethod
    def with_constant_table(cls, base: PsiFunction, table: PsiFunction) -> ScaledPsi:
        """``K(p) · base(p)`` with ``K`` read from a table of constants.

        Raises:
            ParameterError: If the table does not cover the interval of ``base``
        """
        if table.a > base.a or table.b < base.b:
            raise ParameterError(
                f"constant table ({table.a}, {table.b}) does not cover "
                f"({base.a}, {base.b})"
            )
        return cls(base, table, "constant_table")

    @classmethod
    def hardy_sobolev_upper(cls, base: PsiFunction, constant: float, lam: float) -> ScaledPsi:
        """``C · p · base(p) / |1/λ - p|``."""
        if not constant > 0:
            raise ParameterError("the upper-bound constant must be positive")
        threshold = 1.0 / lam

        def factor(p: float) -> float:
            gap = abs(threshold - p)
            return math.inf if gap == 0.0 else constant * p / gap

        return cls(base, factor, f"upper(C={constant}, lambda={lam})")

    def __call__(self, p: float) -> float:
        return self.factor(p) * self.base(p)

    def nodes(self) -> np.ndarray | None:
        return self.base.nodes()

    def describe(self) -> dict[str, Any]:
        return {"kind": "scaled", "factor": self.label, "base": self.base.describe()}


class MeasureSpec(BaseModel):
    """Measure against which ``|·|_p`` is taken."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["lebesgue", "potential", "product"] = "lebesgue"
    d: int = Field(default=1, ge=1)
    lam: float | None = Field(default=None, alias="lambda")
    parts: list[MeasureSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_shape(self) -> MeasureSpec:
        if self.kind == "potential" and not (self.lam is not None and 0 < self.lam < 1):
            raise ParameterError("potential measure needs lambda in (0, 1)")
        if self.kind == "product" and not self.parts:
            raise ParameterError("product measure needs its factors")
        return self

    @classmethod
    def lebesgue(cls, d: int = 1) -> MeasureSpec:
        return cls(kind="lebesgue", d=d)

    @classmethod
    def potential(cls, lam: float, d: int = 1) -> MeasureSpec:
        return cls(kind="potential", d=d, **{"lambda": lam})

    def evaluator(
        self,
        u: TrialFunction,
        domain: Domain | None = None,
        settings: QuadSettings | None = None,
    ) -> LpEvaluator:
        if u.d != self.d:
            raise DimensionError(f"measure dimension {self.d} differs from function {u.d}")
        if self.kind == "lebesgue":
            return lebesgue_evaluator(u, domain, settings)
        if self.kind == "potential":
            assert self.lam is not None
            return potential_evaluator(u, self.lam, domain, settings)
        raise ParameterError("product measures are evaluated by anisotropic_norm")


def lebesgue_evaluator(
    u: TrialFunction, domain: Domain | None = None, settings: QuadSettings | None = None
) -> LpEvaluator:
    """``p -> (∫_D |u|^p)^{1/p}``."""
    domain = domain or Domain.whole_space(u.d)
    settings = settings or QuadSettings()

    def norm(p: float) -> QuadratureResult:
        params = InequalityParams(d=u.d, p=p, q=p)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=settings)
        return target_norm(u, spec, domain)

    return norm


def s_lambda_evaluator(
    u: TrialFunction,
    lam: float,
    domain: Domain | None = None,
    settings: QuadSettings | None = None,
) -> LpEvaluator:
    """``p -> |S_λ u|_p`` with ``S_λ u(x) = u(x) / |x|^{λd}``."""
    domain = domain or Domain.whole_space(u.d)
    settings = settings or QuadSettings()

    def norm(p: float) -> QuadratureResult:
        params = InequalityParams(d=u.d, p=p, q=p, mu=lam * u.d * p)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=settings)
        return target_norm(u, spec, domain)

    return norm


def potential_evaluator(
    u: TrialFunction,
    lam: float,
    domain: Domain | None = None,
    settings: QuadSettings | None = None,
) -> LpEvaluator:
    """``p -> |δ_λ u|_p`` over the potential measure.

    ``δ_λ u(x, y) = (u(x) - u(y)) / |x - y|^{λd}``, normalised so that the
    ``p``-th power is the Gagliardo integral with ``beta = d(1 + λp)``.

    The literal reading, with the kernel weight applied inside ``δ_λ``, again
    as an extra factor and once more by the measure density, has exponent
    ``λd(2p + 1)`` instead. The two agree only at ``λ(p + 1) = 1``. At
    ``λ = 1/2`` the literal exponent reaches ``2d`` at ``p = 1.5``, so on
    ``p >= 1.5`` its integrals diverge where this normalisation stays finite.
    """
    domain = domain or Domain.whole_space(u.d)
    settings = settings or QuadSettings()

    def norm(p: float) -> QuadratureResult:
        params = InequalityParams(d=u.d, p=p, beta=u.d * (1.0 + lam * p))
        spec = NormSpec(kind=NormKind.GAGLIARDO, params=params, settings=settings)
        return gagliardo_seminorm(u, spec, domain)

    return norm


@dataclass
class BglsResult:
    """Supremum of ``|f|_p / ψ(p)`` with the grid it was taken on."""

    value: float
    error_estimate: float
    argmax: float
    grid: list[float] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def rows(self) -> list[dict[str, float]]:
        return [{"p": p, "ratio": r} for p, r in zip(self.grid, self.ratios)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "argmax": self.argmax,
            "flags": self.flags,
            "table": self.rows(),
        }


def _safe_norm(norm_p: LpEvaluator, p: float) -> QuadratureResult:
    try:
        return norm_p(p)
    except (DivergentIntegralError, ParameterError) as e:
        logger.debug("Norm is infinite on the grid", extra={"p": p, "reason": str(e)})
        return QuadratureResult(
            value=math.inf,
            error_estimate=math.inf,
            method=QuadMethod.CLOSED_FORM,
            evaluations=0,
        )


def _ratio(result: QuadratureResult, psi_value: float) -> tuple[float, float]:
    if math.isinf(psi_value):
        return 0.0, 0.0
    return result.value / psi_value, result.error_estimate / psi_value


def bgls_norm(
    f: TrialFunction | LpEvaluator,
    psi: PsiFunction,
    measure: MeasureSpec | None = None,
    *,
    domain: Domain | None = None,
    settings: QuadSettings | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
    interval: tuple[float, float] | None = None,
    refine: bool = True,
) -> BglsResult:
    """``sup_p |f|_p / ψ(p)`` over ``interval`` (default the interval of ψ).

    Args:
        f: Trial function, or a ready ``p -> |f|_p`` evaluator
        psi: Weight function of the space
        measure: Measure for a trial function; Lebesgue on ``R^d`` by default
        domain: Integration domain for a trial function
        settings: Quadrature settings; ``settings.mc.workers`` evaluates grid
            points in parallel
        grid_size: Grid points for continuous ψ; tables use their own nodes
        interval: Sub-interval of ``(a, b)`` to take the supremum over
        refine: Whether to refine inside the best grid cell

    Returns:
        Result with the value, its error estimate and the maximising ``p``. A
        norm that is infinite at some grid point is reported as infinite.
    """
    settings = settings or QuadSettings()
    if isinstance(f, TrialFunction):
        norm_p = (measure or MeasureSpec.lebesgue(f.d)).evaluator(f, domain, settings)
    else:
        norm_p = f

    grid = [float(p) for p in psi.grid(grid_size, interval)]
    grid = [p for p in grid if psi(p) > 0.0]
    if not grid:
        raise ParameterError("the p-grid misses the interval of ψ")

    workers = settings.mc.workers
    if workers == 1:
        results = [_safe_norm(norm_p, p) for p in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _safe_norm(norm_p, p), grid))

    pairs = [_ratio(r, psi(p)) for p, r in zip(grid, results)]
    ratios = [ratio for ratio, _ in pairs]
    best = int(np.argmax(ratios))
    out = BglsResult(
        value=ratios[best],
        error_estimate=pairs[best][1],
        argmax=grid[best],
        grid=grid,
        ratios=ratios,
    )
    for r in results:
        out.flags.extend(flag for flag in r.flags if flag not in out.flags)

    if math.isinf(out.value):
        out.flags.append("infinite_norm")
        logger.warning(
            "BGLS norm is infinite", extra={"p": out.argmax, "psi": psi.describe()}
        )
        return out

    if refine and psi.refinable and len(grid) >= 3:
        lo = grid[max(best - 1, 0)]
        hi = grid[min(best + 1, len(grid) - 1)]

        def objective(log_p: float) -> float:
            p = math.exp(log_p)
            ratio, _ = _ratio(_safe_norm(norm_p, p), psi(p))
            return -ratio if math.isfinite(ratio) else -math.inf

        found = optimize.minimize_scalar(
            objective,
            bounds=(math.log(lo), math.log(hi)),
            method="bounded",
            options={"xatol": REFINE_XATOL},
        )
        p_star = float(math.exp(found.x))
        if -found.fun > out.value:
            result = _safe_norm(norm_p, p_star)
            out.value, out.error_estimate = _ratio(result, psi(p_star))
            out.argmax = p_star

    logger.debug(
        "BGLS norm",
        extra={"value": out.value, "argmax": out.argmax, "points": len(grid)},
    )
    return out


def natural_psi(
    g: TrialFunction | LpEvaluator,
    a: float,
    b: float,
    measure: MeasureSpec | None = None,
    *,
    domain: Domain | None = None,
    settings: QuadSettings | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> TabulatedPsi:
    """Tabulate ``ψ_g(p) = |g|_p`` on a grid of ``(a, b)``.

    Raises:
        DivergentIntegralError: If ``|g|_p`` is infinite at a grid point; the
            offending ``p`` is attached
    """
    _check_interval(a, b)
    if isinstance(g, TrialFunction):
        norm_p = (measure or MeasureSpec.lebesgue(g.d)).evaluator(g, domain, settings)
    else:
        norm_p = g
    nodes = log_grid(a, b, grid_size)
    values = []
    for p in nodes:
        value = _safe_norm(norm_p, float(p)).value
        if not (math.isfinite(value) and value > 0):
            raise DivergentIntegralError(
                f"natural ψ is not finite and positive at p = {p:g}", abscissa=float(p)
            )
        values.append(value)
    return TabulatedPsi(nodes, values)


def _block_marks(f: TrialFunction, blocks: int, scale: float = 1.0) -> list[list[float]]:
    """Breakpoints per coordinate of a product of one-dimensional functions.

    Coordinates of anything else only grade towards 0.
    """
    scale *= f.theta
    if blocks == 1 and f.d == 1:
        return [sorted({0.0, *(scale * b for b in f.profile.breakpoints())})]
    if blocks > 1 and isinstance(f.profile, Product) and f.profile.first.d == 1:
        head = _block_marks(f.profile.first, 1, scale)
        return head + _block_marks(f.profile.second, blocks - 1, scale)
    return [[0.0] for _ in range(blocks)]


def _coordinate_limits(
    f: TrialFunction, domain: Domain | None
) -> tuple[float, float]:
    if domain is not None and domain.kind is DomainKind.BOX:
        assert domain.lo is not None and domain.hi is not None
        return float(domain.lo), float(domain.hi)
    if domain is not None and domain.kind is DomainKind.BALL:
        assert domain.radius is not None
        return -float(domain.radius), float(domain.radius)
    radius = f.support_radius
    if not math.isfinite(radius):
        raise ParameterError("anisotropic norms on the whole space need compact support")
    return -radius, radius


def anisotropic_norm(
    f: TrialFunction,
    p_vector: Sequence[float],
    blocks: Sequence[int] | None = None,
    domain: Domain | None = None,
    tol: float = 1e-10,
) -> QuadratureResult:
    """Mixed norm ``|f|_{p₁,…,p_l}`` by nested adaptive quadrature.

    ``x₁`` is integrated innermost with ``p₁``, then ``x₂`` with ``p₂`` against
    the ``p₂/p₁`` power of the inner result, and so on; the order matters.
    Each block is one coordinate. Box domains apply the same interval to
    every coordinate; on the whole space the support of ``f`` bounds them.

    Raises:
        DimensionError: If the blocks do not partition the coordinates of ``f``
            into one-dimensional pieces
        ParameterError: If some exponent is below 1
    """
    blocks = list(blocks) if blocks is not None else [1] * f.d
    exponents = [float(p) for p in p_vector]
    if sum(blocks) != f.d or len(blocks) != len(exponents):
        raise DimensionError(
            f"blocks {blocks} and exponents {exponents} do not partition R^{f.d}"
        )
    if any(b != 1 for b in blocks):
        raise DimensionError("nested quadrature takes one coordinate per block")
    if any(not p >= 1.0 for p in exponents):
        raise ParameterError(f"anisotropic exponents must be at least 1: {exponents}")

    lo, hi = _coordinate_limits(f, domain)
    marks = _block_marks(f, len(blocks))
    evaluations = 0
    worst = [0.0]

    def level(k: int, tail: tuple[float, ...]) -> QuadratureResult:
        """``∫ value_{k-1}(x_k, tail)^{p_k / p_{k-1}} dx_k`` for block ``k``."""
        nonlocal evaluations

        if k == 0:

            def integrand(x: np.ndarray) -> np.ndarray:
                pts = np.column_stack([x, np.tile(tail, (x.size, 1))])
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.abs(f.values(pts)) ** exponents[0]

        else:
            ratio = exponents[k] / exponents[k - 1]

            def integrand(x: np.ndarray) -> np.ndarray:
                out = np.empty_like(x)
                for i, xk in enumerate(x):
                    inner = level(k - 1, (float(xk), *tail))
                    worst[0] = max(worst[0], ratio * inner.relative_error)
                    out[i] = inner.value**ratio
                return out

        result = integrate_1d_singular(integrand, lo, hi, marks[k], tol)
        evaluations += result.evaluations
        return result

    top = level(len(exponents) - 1, ())
    total = top.value
    error = top.error_estimate + abs(total) * worst[0]
    result = QuadratureResult(
        value=total,
        error_estimate=error,
        method=QuadMethod.NESTED_ADAPTIVE,
        evaluations=evaluations,
        flags=top.flags,
    ).power(1.0 / exponents[-1])
    logger.debug(
        "Computed anisotropic norm",
        extra={"exponents": exponents, "value": result.value},
    )
    return result


@dataclass
class EmbeddingCheck:
    """Both sides of ``||S_λ u||_{Gψ₁} <= ||δ_λ u||_{Gψ₂}``."""

    lhs: BglsResult
    rhs: BglsResult
    holds: bool
    slack: float
    mode: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "holds": self.holds,
            "slack": self.slack,
            "mode": self.mode,
        }


def _check_psi_side(psi: PsiFunction, lam: float) -> None:
    threshold = 1.0 / lam
    if not (psi.b <= threshold or psi.a >= threshold):
        raise ParameterError(
            f"ψ interval ({psi.a}, {psi.b}) must lie on one side of 1/λ = {threshold:g}"
        )


def check_embedding_51a(
    u: TrialFunction,
    psi2: PsiFunction,
    lam: float,
    *,
    mode: Literal["literature_upper", "certified_lower"] = "literature_upper",
    constant: float = 1.0,
    constant_table: PsiFunction | None = None,
    settings: QuadSettings | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> EmbeddingCheck:
    """Compare ``||S_λ u||`` in ``Gψ₁`` with ``||δ_λ u||`` in ``Gψ₂``, ``ψ₁ = K·ψ₂``.

    ``K(p)`` is ``C·p/|1/λ - p|`` with the given ``constant`` in
    ``literature_upper`` mode, and the certified lower bounds of
    ``constant_table`` in ``certified_lower`` mode. The potential-measure side
    is taken over the whole space of ``u``.

    Raises:
        ParameterError: If ψ₂ straddles ``1/λ`` or the constant table does not
            cover its interval
    """
    if not 0 < lam < 1:
        raise ParameterError(f"lambda must lie in (0, 1), got {lam}")
    _check_psi_side(psi2, lam)
    if mode == "certified_lower":
        if constant_table is None:
            raise ParameterError("certified_lower mode needs a constant table")
        psi1: PsiFunction = ScaledPsi.with_constant_table(psi2, constant_table)
    else:
        psi1 = ScaledPsi.hardy_sobolev_upper(psi2, constant, lam)

    settings = settings or QuadSettings()
    lhs = bgls_norm(
        s_lambda_evaluator(u, lam, settings=settings),
        psi1,
        settings=settings,
        grid_size=grid_size,
    )
    rhs = bgls_norm(
        potential_evaluator(u, lam, settings=settings),
        psi2,
        settings=settings,
        grid_size=grid_size,
    )
    margin = CERTIFICATION_FACTOR * (lhs.error_estimate + rhs.error_estimate)
    slack = rhs.value - lhs.value
    check = EmbeddingCheck(
        lhs=lhs, rhs=rhs, holds=slack + margin >= 0.0, slack=slack, mode=mode
    )
    logger.info(
        "Embedding check",
        extra={"mode": mode, "lhs": lhs.value, "rhs": rhs.value, "holds": check.holds},
    )
    return check


@dataclass
class WeakSharpnessPoint:
    interval: tuple[float, float]
    numerator: float
    denominator: float
    ratio: float


@dataclass
class WeakSharpness:
    """Ratios ``||S_λ u||_{Gψ₄} / ||δ_λ u||_{Gψ₁}`` on shrinking gaps to ``1/λ``."""

    points: list[WeakSharpnessPoint] = field(default_factory=list)

    @property
    def increasing(self) -> bool:
        ratios = [pt.ratio for pt in self.points]
        return len(ratios) >= 2 and all(b > a for a, b in zip(ratios, ratios[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "increasing": self.increasing,
            "table": [
                {
                    "a": pt.interval[0],
                    "b": pt.interval[1],
                    "numerator": pt.numerator,
                    "denominator": pt.denominator,
                    "ratio": pt.ratio,
                }
                for pt in self.points
            ],
        }


def weak_sharpness_ratio(
    u: TrialFunction,
    psi4: PsiFunction,
    psi1: PsiFunction,
    lam: float,
    intervals: Sequence[tuple[float, float]],
    settings: QuadSettings | None = None,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> WeakSharpness:
    """Ratio of the two BGLS norms for each interval, in the given order."""
    settings = settings or QuadSettings()
    s_norm = s_lambda_evaluator(u, lam, settings=settings)
    delta_norm = potential_evaluator(u, lam, settings=settings)
    sharpness = WeakSharpness()
    for a, b in intervals:
        top = bgls_norm(s_norm, psi4, settings=settings, grid_size=grid_size, interval=(a, b))
        bottom = bgls_norm(
            delta_norm, psi1, settings=settings, grid_size=grid_size, interval=(a, b)
        )
        ratio = top.value / bottom.value if bottom.value > 0 else math.inf
        sharpness.points.append(WeakSharpnessPoint((a, b), top.value, bottom.value, ratio))
    logger.info(
        "Weak sharpness ratios", extra={"ratios": [p.ratio for p in sharpness.points]}
    )
    return sharpness


AnisotropicPsi = Callable[[float, float], float]


def region_exponent(params: InequalityParams, r: float, p: float) -> float | None:
    """``q`` with ``(d-mu)/r = (d+alpha2-beta)/p + (d+alpha1)/q``, or None if ``q < 1``."""
    d = params.d
    rest = (d - params.mu) / r - (d + params.alpha2 - params.beta) / p
    if not rest > 0:
        return None
    q = (d + params.alpha1) / rest
    return q if q >= 1.0 else None


@dataclass
class Psi5Entry:
    r: float
    psi5: float = math.inf
    argmin: tuple[float, float] | None = None
    flags: list[str] = field(default_factory=list)
    lhs: float | None = None
    rhs: float | None = None
    holds: bool | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "psi5": self.psi5,
            "argmin": list(self.argmin) if self.argmin else None,
            "flags": self.flags,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


@dataclass
class Psi5Report:
    entries: list[Psi5Entry] = field(default_factory=list)

    def table(self) -> TabulatedPsi:
        """``ψ₅`` on the ``r`` values where it is finite."""
        finite = [e for e in self.entries if math.isfinite(e.psi5)]
        return TabulatedPsi([e.r for e in finite], [e.psi5 for e in finite])

    def to_dict(self) -> dict[str, Any]:
        return {"entries": [e.to_dict() for e in self.entries]}


def _minimise_on_curve(
    objective: Callable[[float], float], grid: np.ndarray
) -> tuple[float, float]:
    values = np.array([objective(float(p)) for p in grid])
    best = int(np.argmin(values))
    p_best, v_best = float(grid[best]), float(values[best])
    if grid.size >= 3:
        lo = float(grid[max(best - 1, 0)])
        hi = float(grid[min(best + 1, grid.size - 1)])
        found = optimize.minimize_scalar(
            objective, bounds=(lo, hi), method="bounded", options={"xatol": REFINE_XATOL}
        )
        if found.fun < v_best:
            p_best, v_best = float(found.x), float(found.fun)
    return p_best, v_best


def psi5_and_check_52(
    nu: AnisotropicPsi,
    r_grid: Sequence[float],
    params: InequalityParams,
    constant: AnisotropicPsi,
    *,
    u: TrialFunction | None = None,
    p_max: float = 8.0,
    grid_size: int = DEFAULT_GRID_SIZE,
    settings: QuadSettings | None = None,
) -> Psi5Report:
    """``ψ₅(r) = inf over R_r of ν(p, q) K(p, q)`` and, given ``u``, its check.

    ``R_r`` is parameterised by ``p ∈ [1, p_max]`` with ``q`` solved from the
    mixed balance relation. With a trial function the mixed inequality is
    checked at the minimiser: after normalising ``u`` so that its mixed
    seminorm equals ``ν(p*, q*)``, ``|u|_{r}`` with weight ``|x|^{-mu}`` must not
    exceed ``ψ₅(r)``.
    """
    settings = settings or QuadSettings()
    report = Psi5Report()
    domain = Domain.whole_space(params.d)
    for r in r_grid:
        entry = Psi5Entry(r=float(r))
        report.entries.append(entry)
        grid = np.array(
            [p for p in log_grid(1.0, p_max, grid_size) if region_exponent(params, r, p)]
        )
        if grid.size == 0:
            entry.flags.append("empty_region")
            logger.warning("Empty exponent region", extra={"r": r})
            continue

        def objective(p: float, r: float = float(r)) -> float:
            q = region_exponent(params, r, p)
            if q is None:
                return math.inf
            value = nu(p, q) * constant(p, q)
            if not value > 0:
                raise ParameterError(f"ν·K must be positive, got {value} at ({p}, {q})")
            return value

        p_star, entry.psi5 = _minimise_on_curve(objective, grid)
        q_star = region_exponent(params, r, p_star)
        assert q_star is not None
        entry.argmin = (p_star, q_star)

        if u is None:
            continue
        pair = params.model_copy(update={"p": p_star, "q": q_star, "r": float(r)})
        try:
            rhs_norm = mixed_seminorm(
                u, NormSpec(kind=NormKind.MIXED, params=pair, settings=settings), domain
            )
            lhs_norm = target_norm(
                u,
                NormSpec(
                    kind=NormKind.TARGET,
                    params=pair,
                    settings=settings,
                    target_exponent="r",
                ),
                domain,
            )
        except HSLabError as e:
            entry.flags.append("check_failed")
            logger.warning("ψ₅ check failed", extra={"r": r, "reason": str(e)})
            continue
        if rhs_norm.value == 0.0:
            entry.flags.append("zero_seminorm")
            continue
        scale = nu(p_star, q_star) / rhs_norm.value
        entry.lhs = lhs_norm.value * scale
        entry.rhs = entry.psi5
        error = entry.lhs * (lhs_norm.relative_error + rhs_norm.relative_error)
        entry.holds = entry.lhs <= entry.rhs + CERTIFICATION_FACTOR * error
    return report
