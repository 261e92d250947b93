"""Ground-state physics of the multi-mode Dicke model at desk scale.

Exact sparse diagonalization, coherent-state and parity-projected variational
approximations, and superradiant phase-transition diagnostics (energy
derivatives, observables, entanglement entropy, ground-state fidelity).
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateCoupling,
    DickeError,
    DimensionMismatch,
    DimensionOverflow,
    NoConvergence,
    NoTransitionInRange,
    ProjectionCollapse,
    TruncationLoss,
    UsageError,
    ZeroCooperation,
)
from .model import DerivedScalars, ModelParams, derived_scalars
from .hilbert import BasisLayout, build_basis, build_hamiltonian, build_parity
from .spectrum import GroundStateRecord, converge_cutoff, dense_oracle, ground_state
from .variational import (
    Observables,
    SasFactors,
    VariationalPoint,
    cs_critical_point,
    cs_energy,
    cs_observables,
    cs_state_vector,
    sas_energy,
    sas_observables,
    sas_state_vector,
    sasc_observables,
    sasn_minimize,
)
from .analysis import (
    PhaseDiagram,
    SweepResult,
    TransitionEstimate,
    entanglement_entropy,
    expectation,
    fidelity,
    locate_transition,
    neighbor_fidelity_sweep,
    phase_boundary,
    run_sweep,
    variational_vs_quantum_fidelity,
)

__all__ = [
    "__version__",
    "ModelParams", "DerivedScalars", "derived_scalars",
    "BasisLayout", "build_basis", "build_hamiltonian", "build_parity",
    "GroundStateRecord", "ground_state", "dense_oracle", "converge_cutoff",
    "VariationalPoint", "SasFactors", "Observables",
    "cs_energy", "sas_energy", "cs_critical_point",
    "cs_observables", "sasc_observables", "sas_observables", "sasn_minimize",
    "cs_state_vector", "sas_state_vector",
    "expectation", "entanglement_entropy", "fidelity",
    "run_sweep", "neighbor_fidelity_sweep", "variational_vs_quantum_fidelity",
    "locate_transition", "phase_boundary",
    "SweepResult", "TransitionEstimate", "PhaseDiagram",
    "DickeError", "DegenerateCoupling", "ZeroCooperation",
    "DimensionOverflow", "DimensionMismatch", "NoConvergence",
    "ProjectionCollapse", "TruncationLoss", "NoTransitionInRange", "UsageError",
]
