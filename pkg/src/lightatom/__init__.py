"""Gaussian simulation of a multipass light-atom quantum interface.

A pulse of light makes repeated passes through an atomic ensemble; each
pass couples the collective spin and polarization quadratures through a
QND-type interaction while spontaneous emission and light losses feed in
noise.  Everything is exact covariance-matrix dynamics: states are 4x4
real symmetric matrices, passes are symplectic congruences plus noise,
and the figures of merit (EPR variance, Gaussian entanglement of
formation, quadrature squeezing) are functions of the covariance alone.
"""

from .dynamics import (
    GAMMA_NOISE,
    PassParams,
    ProtocolState,
    Scheme,
    disentangled_p_variance,
    optimal_disentangle_coupling,
    protocol_states,
    run_protocol,
    scattering_matrix,
    single_pass,
    switch_rotation_angles,
)
from .errors import InvalidStateError, NumericalFailureError, ParameterError
from .gaussian import (
    Mode,
    Quadrature,
    apply_linear_map,
    condition_on_quadrature,
    is_physical,
    rotate_quadratures,
    symplectic_eigenvalues,
    two_mode_squeezed,
    vacuum,
    validate_state,
)
from .measures import (
    StandardForm,
    entanglement_from_epr_uncertainty,
    epr_variance,
    geof,
    geof_numerical,
    geof_symmetric,
    log_negativity,
    partial_transpose,
    squeezing,
    standard_form,
)
from .optimize import (
    Objective,
    OptimizationResult,
    conditional_atomic_p,
    crude_conditional_variance,
    crude_single_pass,
    evaluate_objective,
    golden_section_minimize,
    optimize_disentangle_kappa,
    optimize_eta,
)
from .physical import (
    ExperimentalSetup,
    ModelParams,
    derive_model_params,
    photons_for_target_eta,
    rubidium_example,
)
from .runner import (
    ConfigError,
    RunConfig,
    SweepRecord,
    run_checks,
    run_figure,
    run_sweep,
    write_records,
)

__version__ = "0.1.0"

__all__ = [
    "GAMMA_NOISE",
    "ConfigError",
    "ExperimentalSetup",
    "InvalidStateError",
    "Mode",
    "ModelParams",
    "NumericalFailureError",
    "Objective",
    "OptimizationResult",
    "ParameterError",
    "PassParams",
    "ProtocolState",
    "Quadrature",
    "RunConfig",
    "Scheme",
    "StandardForm",
    "SweepRecord",
    "apply_linear_map",
    "condition_on_quadrature",
    "conditional_atomic_p",
    "crude_conditional_variance",
    "crude_single_pass",
    "derive_model_params",
    "disentangled_p_variance",
    "entanglement_from_epr_uncertainty",
    "epr_variance",
    "evaluate_objective",
    "geof",
    "geof_numerical",
    "geof_symmetric",
    "golden_section_minimize",
    "is_physical",
    "log_negativity",
    "optimal_disentangle_coupling",
    "optimize_disentangle_kappa",
    "optimize_eta",
    "partial_transpose",
    "photons_for_target_eta",
    "protocol_states",
    "rotate_quadratures",
    "rubidium_example",
    "run_checks",
    "run_figure",
    "run_protocol",
    "run_sweep",
    "scattering_matrix",
    "single_pass",
    "squeezing",
    "standard_form",
    "switch_rotation_angles",
    "symplectic_eigenvalues",
    "two_mode_squeezed",
    "vacuum",
    "validate_state",
    "write_records",
]
