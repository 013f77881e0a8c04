"""Numerical laboratory for maximal estimates of Weyl sums."""

from .errors import InvalidInputError, PrecisionError, QuadratureError, ResourceError, WeylError
from .sums import PhasePoint, WeylParams, eval_gauss_sum, eval_weyl_sum

__version__ = "0.1.0"

__all__ = [
    "InvalidInputError",
    "PhasePoint",
    "PrecisionError",
    "QuadratureError",
    "ResourceError",
    "WeylError",
    "WeylParams",
    "eval_gauss_sum",
    "eval_weyl_sum",
    "__version__",
]
