"""Distributionally robust (Wasserstein) halfspace depth."""
from ._backend import BACKEND
from .core import (
    DimensionMismatch,
    Direction,
    EmptyInput,
    InvalidDimension,
    MalformedInput,
    NonFiniteCoordinate,
    PointCloud,
    RDepthError,
    parse_csv,
    read_csv,
    validate_cloud,
)
from .depth import (
    DegenerateDirection,
    DepthQuery,
    DepthResult,
    InvalidAlphaBar,
    alpha_star,
    depth_surface,
    direction_grid,
    lower_depth,
    max_depth,
    refine_direction_2d,
    robust_depth,
    tukey_depth,
    value_gradient_2d,
)
from .experiments import (
    ExperimentReport,
    NotSPD,
    breakdown_demo,
    consistency_experiment,
    ordering_experiment,
    sample_elliptical,
    subset_count_experiment,
)
from .geometry import (
    CenterTooShallow,
    ContourPolyline,
    HullPolygon,
    contour_2d,
    convex_hull_2d,
    dist_to_hull,
    outer_depth,
)
from .inner import (
    ProjectionProfile,
    TruncatedMeanInverse,
    normal_inner_sup,
    normal_max_depth,
    project,
    worst_case_inf,
    worst_case_sup,
    worst_case_sup_dual,
)
from .median import (
    BallSystem,
    SeparableSubsets,
    TooLarge,
    ball_system,
    count_optimal_subsets,
    enumerate_separable_2d,
    median_membership,
    min_delta_full_depth_2d,
    subset_norm_oracle,
)

__version__ = "0.1.0"
