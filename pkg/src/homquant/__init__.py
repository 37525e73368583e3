"""Dilation homogeneity toolkit.

Canonical homogeneous norms for strictly monotone linear dilations, the
straightened vector-space structure they induce, a polar-spherical state
quantizer that commutes with a discrete dilation subgroup, sampled property
checkers, and closed-loop simulation under quantized homogeneous feedback.
"""

from .checks import (
    SampleSpec,
    SectorSpec,
    check_field_homogeneity,
    check_hom_sector,
    check_quantizer_discrete_homogeneity,
    ratio_bounds_on_domain,
    sample_directions,
    sample_states,
)
from .dilation import (
    Dilation,
    DiscreteDilation,
    dilate,
    dilation_norm_bounds,
    make_dilation,
)
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    DimensionTooSmallError,
    EmptyTrajectoryError,
    HomquantError,
    NegativeInputError,
    NoConvergenceError,
    NonFiniteStateError,
    NonPositiveFunctionError,
    NotMonotoneError,
    NotOnSphereError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    UnknownSuiteError,
    UnsupportedDimensionError,
    ZeroVectorError,
)
from .geometry import (
    DEFAULT_CONFIG,
    FundamentalDomain,
    HomNormConfig,
    distance_bound_alpha1,
    distance_bound_alpha2,
    hom_inner,
    hom_norm,
    hom_norm_many,
    hom_project,
    matrix_tilde_apply,
    phi,
    phi_inv,
    phi_many,
    projection_index,
    tilde_add,
    tilde_scale,
)
from .quantizer import (
    QuantizerParams,
    SphericalCoords,
    angular_error_bound,
    beta,
    epsilon_tilde,
    from_spherical,
    hom_quantize,
    log_quantize,
    spherical_quantize,
    to_spherical,
)
from .simulation import (
    HomFeedback,
    HomPlant,
    Trajectory,
    example_plant,
    hom_feedback_eval,
    settling_metrics,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "ConfigParseError",
    "ConfigValidationError",
    "Dilation",
    "DimensionTooSmallError",
    "DiscreteDilation",
    "EmptyTrajectoryError",
    "FundamentalDomain",
    "HomFeedback",
    "HomNormConfig",
    "HomPlant",
    "HomquantError",
    "NegativeInputError",
    "NoConvergenceError",
    "NonFiniteStateError",
    "NonPositiveFunctionError",
    "NotMonotoneError",
    "NotOnSphereError",
    "NotPositiveDefiniteError",
    "NotSymmetricError",
    "QuantizerParams",
    "SampleSpec",
    "SectorSpec",
    "SphericalCoords",
    "Trajectory",
    "UnknownSuiteError",
    "UnsupportedDimensionError",
    "ZeroVectorError",
    "angular_error_bound",
    "beta",
    "check_field_homogeneity",
    "check_hom_sector",
    "check_quantizer_discrete_homogeneity",
    "dilate",
    "dilation_norm_bounds",
    "distance_bound_alpha1",
    "distance_bound_alpha2",
    "epsilon_tilde",
    "example_plant",
    "from_spherical",
    "hom_feedback_eval",
    "hom_inner",
    "hom_norm",
    "hom_norm_many",
    "hom_project",
    "hom_quantize",
    "log_quantize",
    "make_dilation",
    "matrix_tilde_apply",
    "phi",
    "phi_inv",
    "phi_many",
    "projection_index",
    "ratio_bounds_on_domain",
    "sample_directions",
    "sample_states",
    "settling_metrics",
    "simulate",
    "spherical_quantize",
    "tilde_add",
    "tilde_scale",
    "to_spherical",
]
