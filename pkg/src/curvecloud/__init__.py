"""curvecloud: fit variable-degree Bezier curves to point-cloud strokes and
vectorize whole sketches into scalable parametric curves."""

from .bezier import (
    BinVector,
    ControlPolygon,
    DegreeParam,
    RenderGrid,
    SelectorPair,
    bernstein_matrix,
    de_casteljau,
    hard_degree,
    one_hot_bins,
    render_fixed_degree,
    render_variable_degree,
    selectors,
    soft_bin,
)

__version__ = "0.1.0"

__all__ = [
    "BinVector",
    "ControlPolygon",
    "DegreeParam",
    "RenderGrid",
    "SelectorPair",
    "bernstein_matrix",
    "de_casteljau",
    "hard_degree",
    "one_hot_bins",
    "render_fixed_degree",
    "render_variable_degree",
    "selectors",
    "soft_bin",
    "__version__",
]
