"""relqlab: numerical laboratory for relativistic path-weight propagators,
square-root-Hamiltonian wave dynamics, and noise-driven two-state collapse.

Natural units everywhere: hbar = c = 1, energies in multiples of m c^2.
"""

__version__ = "0.1.0"

from .specfun import (
    MomentQuery,
    QuadratureConvergenceError,
    bessel_j1_y1_small,
    gamma_half_integer,
    kernel_moment_closed,
    kernel_moment_contour,
    kummer_m,
)
from .pathweight import (
    LightlikeSegmentError,
    Path,
    PathFunctionals,
    PhysicalScale,
    SampledField,
    SeriesTruncationError,
    WeightUndefinedError,
    equal_time_kernel_profile,
    path_action,
    path_functionals,
    path_weight,
    short_time_closed_form,
    short_time_plane_wave,
    short_time_plane_wave_series,
    straight_path,
)
from .evolution import (
    FieldConfig,
    FluxReport,
    SpatialGrid,
    WaveFunction,
    apply_R,
    density_flux_report,
    dispersion,
    evolve,
    free_propagate,
    gaussian_packet,
    klein_gordon_residual,
    plane_wave,
    plane_wave_identity_check,
    schrodinger_overlap,
)
from .collapse import (
    DEFAULT_SIGMA_STAR,
    CollapseTrajectory,
    EnsembleReport,
    NoiseProcess,
    NoiseTooLargeError,
    TwoStateAmplitudes,
    TwoStateSystem,
    collapse_step,
    generate_noise,
    lambda_general,
    lambda_two_state,
    noise_kick,
    run_ensemble,
    run_trajectory,
    wilson_interval,
)
from .abexp import (
    ABConfig,
    DEFAULT_B1_STAR,
    EnvelopeOnlyPatternError,
    ScreenPattern,
    ab_phase,
    alternating_field,
    fringe_visibility,
    simulate_ab,
    two_state_for_paths,
)
