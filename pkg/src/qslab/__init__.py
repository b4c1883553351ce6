"""Speed-limit bounds and minimal-time control for Lindblad open quantum systems."""

from .bounds import (
    BoundReport,
    ClosedSystemReport,
    NormKind,
    ReferenceGenerator,
    UnreachableTargetError,
    bound_general,
    bound_schedule_independent,
    bound_trajectory_avg,
    closed_system_report,
    single_qubit_analytic_bound,
    single_qubit_denominator,
)
from .control import (
    DynamicsError,
    OptimizerConfig,
    Schedule,
    TimeSearchResult,
    evaluate_cost,
    find_min_time,
    optimize_schedule,
    uncontrolled_first_passage,
)
from .lindblad import (
    ControlSystem,
    CptpReport,
    DissipationConvention,
    Dissipator,
    JumpTerm,
    LindbladGenerator,
    apply,
    build_superoperator,
    dissipator_superoperator,
    hamiltonian_superoperator,
    is_cptp,
    propagate,
    validate_density_matrix,
)
from .linalg import (
    DimensionError,
    Spectrum,
    hermitian_eig,
    kron,
    largest_singular_value,
    matrix_exp,
    unvec,
    vec,
)
from .models import (
    BathSpec,
    BohrDecomposition,
    IsingSpec,
    bell_state,
    bohr_decomposition,
    davies_rate,
    gibbs_state,
    ising_hamiltonian,
    make_bell,
    make_ising_davies,
    make_single_qubit,
)
from .norms import (
    NormMethod,
    NormReport,
    induced_11_bracket,
    induced_11_estimate,
    induced_22,
    trace_distance,
    trace_norm,
)

__version__ = "0.1.0"
