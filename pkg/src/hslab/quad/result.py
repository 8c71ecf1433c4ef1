"""Quadrature results and error propagation helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any


class QuadMethod(str, Enum):
    """How a value was computed."""

    ADAPTIVE_1D = "adaptive_1d"
    POLAR_RADIAL = "polar_radial"
    MC_PAIRS = "mc_pairs"
    MC_SINGLE = "mc_single"
    NESTED_ADAPTIVE = "nested_adaptive"
    CLOSED_FORM = "closed_form"


class QuadFlag(str, Enum):
    """Non-fatal numerical conditions attached to a result."""

    NONCONVERGENT = "nonconvergent"
    RESOLUTION_LIMITED = "resolution_limited"
    INFINITE_VARIANCE = "infinite_variance"
    NONFINITE_SAMPLES = "nonfinite_samples"
    INNER_BIAS = "inner_bias"


@dataclass(frozen=True)
class QuadratureResult:
    """Value with an absolute error estimate."""

    value: float
    error_estimate: float
    method: QuadMethod
    evaluations: int
    seed: int | None = None
    flags: tuple[str, ...] = ()

    @property
    def relative_error(self) -> float:
        if self.value == 0.0:
            return 0.0 if self.error_estimate == 0.0 else math.inf
        return self.error_estimate / abs(self.value)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def with_flags(self, *flags: str) -> QuadratureResult:
        merged = tuple(dict.fromkeys((*self.flags, *flags)))
        return replace(self, flags=merged)

    def power(self, exponent: float) -> QuadratureResult:
        """``value**exponent`` with first-order error propagation."""
        if not math.isfinite(self.value):
            return replace(self, value=math.inf, error_estimate=math.inf)
        if self.value == 0.0:
            return replace(self, error_estimate=self.error_estimate**exponent)
        if self.value < 0.0:
            return replace(self, value=math.nan, error_estimate=math.inf)
        value = self.value**exponent
        return replace(
            self,
            value=value,
            error_estimate=abs(exponent) * value * self.error_estimate / self.value,
        )

    def scaled(self, factor: float) -> QuadratureResult:
        return replace(
            self,
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "method": self.method.value,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "flags": list(self.flags),
        }


def combine_sum(parts: list[QuadratureResult], method: QuadMethod) -> QuadratureResult:
    """Sum of independent pieces; errors add."""
    flags: list[str] = []
    for part in parts:
        flags.extend(part.flags)
    seeds = {p.seed for p in parts if p.seed is not None}
    return QuadratureResult(
        value=math.fsum(p.value for p in parts),
        error_estimate=math.fsum(p.error_estimate for p in parts),
        method=method,
        evaluations=sum(p.evaluations for p in parts),
        seed=seeds.pop() if len(seeds) == 1 else None,
        flags=tuple(dict.fromkeys(flags)),
    )
