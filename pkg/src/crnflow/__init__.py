"""Complex-balanced reaction networks with cross-diffusion.

Network analysis (conservation laws, deficiency, complex-balanced
equilibria) plus an entropy-stable finite-volume solver for the associated
reaction-cross-diffusion system, with certified decay diagnostics.
"""

from ._kernels import BACKEND
from .analysis import (
    EntropyAudit,
    RateEstimate,
    RatioReport,
    conservation_audit,
    dissipation_ratio,
    entropy_audit,
    estimate_decay_rate,
    summarize,
    synthetic_trajectory,
)
from .crn import (
    BoundaryFace,
    ComplexDecomposition,
    ConservationBasis,
    EquilibriumResult,
    Reaction,
    ReactionNetwork,
    complex_balance_residual,
    complex_decomposition,
    conservation_basis,
    deficiency,
    find_complex_balanced_equilibrium,
    mass_action_rates,
    project_equilibrium_to_mass,
    scan_boundary_equilibria,
    stoich_arrays,
)
from .crossdiff import (
    DiffusionParams,
    diffusion_matrix,
    dissipation_form,
    dissipation_lower_bound,
    is_detailed_balanced,
    validate_structure,
    weak_cross_alpha,
)
from .entropy import (
    CKP_COEFF,
    ckp_check,
    entropy_production_field,
    l1_distance,
    psi,
    reaction_dissipation_identity,
    relative_entropy_field,
    relative_entropy_point,
)
from .errors import (
    ConfigError,
    CrnflowError,
    InsufficientDecayData,
    MassNotReachable,
    NeitherConditionHolds,
    NetworkParseError,
    NoComplexBalance,
    StepFailed,
)
from .fvsolver import (
    Mesh,
    StepStats,
    Trajectory,
    assemble_fluxes,
    format_trajectory_csv,
    init_field,
    simulate,
    step_implicit_euler,
    write_trajectory_csv,
)
from .netparse import (
    InitialProfile,
    RunConfig,
    format_network,
    parse_config,
    parse_config_file,
    parse_network,
    parse_network_file,
)

__version__ = "0.1.0"
