"""Integration engine for singular integrands."""

from .adaptive import integrate_1d_singular, integrate_radial
from .montecarlo import mc_double_integral, mc_nested_integral, mc_single_integral
from .result import QuadFlag, QuadMethod, QuadratureResult, combine_sum
from .settings import McConfig, MethodChoice, QuadSettings

__all__ = [
    "McConfig",
    "MethodChoice",
    "QuadFlag",
    "QuadMethod",
    "QuadSettings",
    "QuadratureResult",
    "combine_sum",
    "integrate_1d_singular",
    "integrate_radial",
    "mc_double_integral",
    "mc_nested_integral",
    "mc_single_integral",
]
