"""Exact computations on the pinwheel substitution tiling: collared
prototiles, the substitution matrix and its Perron data, the module of
patch frequencies, and cohomology of the approximant complexes."""

__version__ = "0.1.0"

from .geometry import MINUS, PLUS, Point, TilePose, UnitRotation  # noqa: E402
from .substitution import SubstitutionRule, patch, pinwheel_rule, split  # noqa: E402

__all__ = [
    "MINUS",
    "PLUS",
    "Point",
    "SubstitutionRule",
    "TilePose",
    "UnitRotation",
    "__version__",
    "patch",
    "pinwheel_rule",
    "split",
]
