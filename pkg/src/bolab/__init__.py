"""Numerical laboratory for soliton stability in the Benjamin-Ono equation

    u_t = (D u - u^2)_x,   D = |d/dx| = Hilbert . d/dx,

on a periodic box standing in for the line.  The package builds the objects
a multi-soliton stability argument manipulates -- profiles, modulation
fits, weighted local masses, the linearized Hessian and its gaps -- and
measures every identity and inequality among them at desk scale.

Layout: `spectral` owns the grid and Fourier calculus; `solitons` the
profile family and conserved functionals; `evolution` the time stepper;
`modulation` parameter fitting and tracking; `lyapunov` the moving weights
and almost-monotone local masses; `operators` dense operator realizations
and spectral/inequality measurements; `harness` experiment orchestration;
`cli` the command-line front end.
"""

from .spectral import (
    Grid,
    RealField,
    SpectralField,
    apply_multiplier,
    d_power,
    derivative,
    hilbert,
    inner_product,
    inverse_transform,
    l2_norm,
    sobolev_norm,
    transform,
)
from .solitons import (
    SolitonParams,
    SolitonTrain,
    action_functional,
    energy,
    mass,
    soliton_profile,
    soliton_profile_dc,
    soliton_profile_dx,
    soliton_residual,
    soliton_sum,
)
from .evolution import BlowUpError, EvolutionConfig, Trajectory, evolve, step
from .modulation import (
    DegenerateConfigurationError,
    ModulationSeries,
    ModulationState,
    TrackingLostError,
    decompose,
    modulation_jacobian,
    track,
)
from .lyapunov import (
    MonotonicityReport,
    WeightConfig,
    cutoff_weight,
    energy_decomposition_residual,
    local_mass,
    lyapunov_functional,
    monotonicity_report,
    soliton_window,
    weighted_hessian_form,
)
from .operators import (
    EXCITED_STATE_EIGENVALUE,
    GROUND_STATE_EIGENVALUE,
    OperatorMatrix,
    SpectrumReport,
    assemble_h,
    assemble_hk,
    besov_norm,
    closed_form_modes,
    commutator_constant,
    constrained_gap,
    dense_symbol_matrix,
    eigen_spectrum,
    gn_ratio,
    hilbert_commutator_form,
    projection_kk,
)
from .harness import (
    ExperimentConfig,
    StabilityReport,
    VerificationSummary,
    build_perturbation,
    derive_cell_config,
    load_config,
    load_snapshot,
    measure_inequalities,
    run_experiment,
    run_sweep,
    run_verification_suite,
    save_snapshot,
)

__version__ = "0.1.0"
