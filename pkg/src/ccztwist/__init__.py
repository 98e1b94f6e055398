"""CCZ-equivalent but EA-inequivalent twists of quadratic functions over finite fields."""

from ._kernels import BACKEND
from .gfield import FieldCtx, FieldElement, get_field, parse_field_spec
from .vfunc import UnivariatePoly, VectorialFunction, evaluate, interpolate, parse_poly

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FieldCtx",
    "FieldElement",
    "UnivariatePoly",
    "VectorialFunction",
    "__version__",
    "evaluate",
    "get_field",
    "interpolate",
    "parse_field_spec",
    "parse_poly",
]
