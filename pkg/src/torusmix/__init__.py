"""torusmix: optimal mixing of a diffusion-free passive scalar on the torus.

A pseudo-spectral toolkit for evolving the transport equation with an
enstrophy-normalized steepest-descent stirring velocity, measuring mix-norms
(homogeneous H^-1) and delta-mixedness, fitting exponential decay rates, and
checking duality certificates and scaling identities numerically.
"""

from .errors import (
    CFLViolationError,
    ConfigError,
    DegenerateVelocityError,
    DeltaOutOfRangeError,
    GeometryError,
    InsufficientDataError,
    NonMonotoneTimeError,
    NonZeroMeanError,
    ParamMismatchError,
    SupportViolationError,
    TorusmixError,
    ZeroCostError,
    ZeroFieldError,
)
from .spectral import (
    GridSpec,
    ScalarField,
    VectorField,
    ball_mean_field,
    dealias,
    divergence,
    gradient,
    inverse_laplacian,
    l2_inner,
    laplacian,
    leray_project,
    random_band_limited,
    to_real,
    to_spectral,
)
from .norms import (
    CostAccumulator,
    MixTimeSeries,
    accumulate_cost,
    grad_lp_norm,
    log_plus_gradient,
    lp_norm,
    sobolev_norm,
)
from .mixedness import (
    LevelSetMask,
    MixednessReport,
    ScaleScanResult,
    h_neg1_certificate,
    is_mixed,
    is_semi_mixed,
    mixing_scale_scan,
    super_level_set,
)
from .velocity import VelocityDesignResult, steepest_descent_velocity
from .solver import (
    InitialDataParams,
    RunResult,
    SolverConfig,
    initial_data,
    prepare_initial_state,
    run,
    step,
)

__version__ = "0.1.0"
