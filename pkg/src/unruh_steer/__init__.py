"""Steered coherence of uniformly accelerated atom pairs.

Two-qubit Fano-form state algebra, the dissipative Unruh-bath model (free
space and half-space geometries), coherence measures, steering-induced
coherence with its measurement-induced-disturbance twin, and the
coherence-steerability criteria, plus a deterministic sweep engine and CLI.
"""

from .coherence import (
    l1_coherence,
    l1_coherence_bloch,
    relative_entropy_coherence,
    trace_distance_coherence_qubit,
)
from .errors import (
    DegenerateBasis,
    DegenerateLimit,
    DenominatorZero,
    DomainError,
    NonHermitian,
    NotPositive,
    UnphysicalDrift,
    UnruhSteerError,
    UnsupportedDirection,
)
from .model import (
    BoundaryEquilibrium,
    KossakowskiBoundary,
    KossakowskiFree,
    Trajectory,
    UnruhParams,
    equilibrium_boundary,
    equilibrium_free,
    evolve,
    kossakowski_boundary,
    kossakowski_free,
    ode_rhs,
    relaxation_horizon,
    steering_node_acceleration,
)
from .qmat import (
    FanoState,
    basis_from_axis,
    concurrence,
    dephase_b,
    eigen_descending,
    fano_to_matrix,
    matrix_to_fano,
    min_eigenvalue,
    partial_trace,
    random_density_matrix,
    random_fano_state,
    trace_norm,
)
from .steering import (
    BoundaryVerdict,
    ConditionalCoherence,
    CyclicPairings,
    SteerabilityFree,
    SteeredEnsemble,
    alpha_matrix,
    conditional_coherence,
    one_sided_mid,
    sic_closed_form_free,
    steer_bob,
    steerability_functional_free,
    steerability_pairings_free,
    steerability_verdict_boundary,
    steering_induced_coherence,
    theorem1_residual,
)
from .sweeps import GridSpec, SweepResult, load_csv, load_json, run_grid

__version__ = "0.1.0"

__all__ = [
    "BoundaryEquilibrium",
    "BoundaryVerdict",
    "ConditionalCoherence",
    "CyclicPairings",
    "DegenerateBasis",
    "DegenerateLimit",
    "DenominatorZero",
    "DomainError",
    "FanoState",
    "GridSpec",
    "KossakowskiBoundary",
    "KossakowskiFree",
    "NonHermitian",
    "NotPositive",
    "SteerabilityFree",
    "SteeredEnsemble",
    "SweepResult",
    "Trajectory",
    "UnphysicalDrift",
    "UnruhParams",
    "UnruhSteerError",
    "UnsupportedDirection",
    "alpha_matrix",
    "basis_from_axis",
    "concurrence",
    "conditional_coherence",
    "dephase_b",
    "eigen_descending",
    "equilibrium_boundary",
    "equilibrium_free",
    "evolve",
    "fano_to_matrix",
    "kossakowski_boundary",
    "kossakowski_free",
    "l1_coherence",
    "l1_coherence_bloch",
    "load_csv",
    "load_json",
    "matrix_to_fano",
    "min_eigenvalue",
    "ode_rhs",
    "one_sided_mid",
    "partial_trace",
    "random_density_matrix",
    "random_fano_state",
    "relative_entropy_coherence",
    "relaxation_horizon",
    "run_grid",
    "sic_closed_form_free",
    "steer_bob",
    "steerability_functional_free",
    "steerability_pairings_free",
    "steerability_verdict_boundary",
    "steering_induced_coherence",
    "steering_node_acceleration",
    "theorem1_residual",
    "trace_distance_coherence_qubit",
    "trace_norm",
    "__version__",
]
