"""Hardy-Sobolev Lab - numerical checks of fractional Hardy-Sobolev inequalities."""

__version__ = "0.1.0"

from .model import Domain, InequalityKind, InequalityParams
from .norms import NormKind, NormSpec, evaluate_norm
from .quad import QuadratureResult, QuadSettings
from .trialfuncs import TrialFunction, dilate, evaluate

__all__ = [
    "Domain",
    "InequalityKind",
    "InequalityParams",
    "NormKind",
    "NormSpec",
    "QuadSettings",
    "QuadratureResult",
    "TrialFunction",
    "__version__",
    "dilate",
    "evaluate",
    "evaluate_norm",
]
