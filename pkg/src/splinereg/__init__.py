"""Tensor-product B-spline fitting with adaptive derivative regularization.

Fits spline fields to scattered, nonuniformly sampled point clouds. The
penalty strength adapts per control point to the local data density, so dense
regions keep full least-squares accuracy while sparse and empty regions stay
smooth and bounded.
"""

from .analysis import (
    ErrorSummary,
    StrengthField,
    condition_number,
    error_vs_function,
    grid_axes,
    grid_lattice,
    grid_sample,
    strength_field,
)
from .basis import (
    KnotVector,
    anchor_params,
    basis_derivatives,
    basis_nonzero,
    find_span,
    greville_abscissae,
    uniform_knots,
)
from .datagen import (
    polysinc,
    sample_quadrant_gradient,
    sample_uniform,
    sample_voids,
    sample_with_hole,
)
from .estimator import AdaptiveSplineRegressor
from .fitting import (
    DesignMatrices,
    FitConfig,
    FitReport,
    PointCloud,
    assemble_collocation,
    assemble_derivative_block,
    fit,
    lambda1,
    lambda2,
    parameterize,
    solve,
)
from .modelio import load_model, read_cloud_csv, save_model, write_cloud_csv
from .tensor import MultiIndexSpace, TensorSpline

__version__ = "0.1.0"

__all__ = [
    "AdaptiveSplineRegressor",
    "DesignMatrices",
    "ErrorSummary",
    "FitConfig",
    "FitReport",
    "KnotVector",
    "MultiIndexSpace",
    "PointCloud",
    "StrengthField",
    "TensorSpline",
    "anchor_params",
    "assemble_collocation",
    "assemble_derivative_block",
    "basis_derivatives",
    "basis_nonzero",
    "condition_number",
    "error_vs_function",
    "find_span",
    "fit",
    "greville_abscissae",
    "grid_axes",
    "grid_lattice",
    "grid_sample",
    "lambda1",
    "lambda2",
    "load_model",
    "parameterize",
    "polysinc",
    "read_cloud_csv",
    "sample_quadrant_gradient",
    "sample_uniform",
    "sample_voids",
    "sample_with_hole",
    "save_model",
    "solve",
    "strength_field",
    "uniform_knots",
    "write_cloud_csv",
    "__version__",
]
