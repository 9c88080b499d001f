"""Decoherence of exciton cat states in a leaky cavity with a Lorentzian quasimode.

Closed-form amplitudes and decoherence factors, an exact discretized-bath
propagator used as a reference, and a thermal Monte Carlo estimator.

Units: hbar = 1, energies in meV, times in hbar/meV (about 0.658 ps),
temperatures in kelvin.
"""

from .errors import (
    ConvergenceError,
    ExcitonDecohError,
    ParameterError,
    PoleProximityError,
    RecurrenceError,
    RegimeError,
)
from .model import (
    CONSTANTS,
    DerivedParams,
    ModelParams,
    PhysicalConstants,
    Regime,
    coupling_density,
    derive_params,
    kernel_laplace,
    mean_occupation,
    memory_kernel,
    u_laplace,
)
from .amplitudes import (
    AmplitudeSample,
    env_weight,
    exponent_series,
    sample,
    u_analytic,
    v_analytic,
    v_hat,
)
from .bath_oracle import (
    AmplitudeSet,
    BathGrid,
    BathPropagator,
    build_grid,
    kernel_from_grid,
    oracle_beta,
    propagator,
    thermal_mc_factor,
)
from .decoherence import (
    NO_DECOHERENCE,
    DecoherenceSeries,
    Method,
    OccupationMode,
    SuperpositionSpec,
    ThermalSpec,
    beta_quadrature,
    beta_residue,
    beta_short,
    cat_factor,
    decoherence_series,
    factor_short_paper,
    factor_thermal,
    factor_thermal_short,
    factor_zero_T,
    t_d_cat_high_T,
    t_d_thermal,
    t_d_zero,
)

__version__ = "0.1.0"
