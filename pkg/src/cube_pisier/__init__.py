"""Vector-valued Fourier analysis on the Hamming cube and Pisier-type constants."""
from .cube import (
    CubeFunction,
    TwoCubeFunction,
    decode_point,
    encode_point,
    expectation,
    fwht,
    subset_mask,
    translate,
    walsh_character,
    walsh_forward,
    walsh_inverse,
)
from .estimators import (
    ConstantEstimate,
    InequalityKind,
    exact_p2_scalar,
    f1log_bound,
    heat_lower_bound_check,
    maximize,
    ratio_deltafi,
    ratio_df,
    ratio_f1,
    ratio_pisier,
    scan,
)
from .norms import EllQ, L1Cube, LInfCube, NormSpace, Scalar, lp_moment, parse_norm, two_cube_moment
from .operators import (
    Multiplier,
    apply_multiplier,
    d_j,
    extract_fj,
    heat,
    inv_laplacian,
    laplacian,
    partial_j,
    rademacher_projection,
    riesz,
)
from .optimize import OptimizerConfig
from .semigroup import (
    BiasedBitLaw,
    QuadratureScheme,
    integral_representation,
    smoothed_derivative,
    verify_main_identity,
)

__version__ = "0.1.0"
