"""Multipartite entanglement growth in random unitary and Clifford circuits."""

from .circuits import (
    Trajectory,
    all_pairs,
    brick_wall_bonds,
    evolve,
    gates_per_iteration,
    star_pairs,
    step_all_pairs,
    step_brick_wall,
    step_clifford,
    step_star,
)
from .config import ExperimentConfig, config_from_ini, config_to_ini
from .harness import (
    ExperimentResult,
    fit_growth_curve,
    run_experiment,
    saturation_from_summary,
    scaling_sweep,
)
from .measurement import (
    ExcludedBranchError,
    WeakMeasurementPair,
    analytic_ghz_decay,
    apply_weak_measurement,
    branch_averaged_ggm,
    ensemble_weak_ggm,
    weak_branch_tables,
)
from .metrics import (
    BipartitionMask,
    FitError,
    MetricSeries,
    SaturationResult,
    detect_saturation,
    enumerate_bipartitions,
    fit_tanh,
    ggm,
    ipr,
    max_schmidt_sq,
)
from .rmps import (
    DegenerateStateError,
    MpsChain,
    ggm_vs_bond_dimension,
    match_min_bond_dimension,
    mps_to_statevector,
    sample_rmps,
)
from .sampling import CliffordGateTag, RngStream, ginibre_matrix, haar_unitary, random_clifford_gate
from .state import StateVector, apply_one_qubit, apply_two_qubit, ghz_state, new_basis_state

__version__ = "0.1.0"
