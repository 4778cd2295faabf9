"""qasim: classically emulated subspace quantum dynamics.

Small-molecule Hamiltonians are mapped onto qubits, a handful of
time-evolved copies of a reference state span a reduced subspace, and
observable trajectories are integrated there, exactly or through a
Hadamard-test shot-noise model, with analytic quantum-runtime cost
accounting on the side.
"""

from .chemistry import (
    IntegralSet,
    build_hamiltonian,
    build_initial_state,
    build_observables,
    load_integrals,
    sector_spectrum,
)
from .engine import (
    BasisSpec,
    CoefficientTrajectory,
    ConditionError,
    EngineError,
    QasMatrices,
    ShotModel,
    build_basis,
    derive_seeds,
    dominant_frequency,
    exact_matrices,
    lin_independence_report,
    min_error_overlap,
    observable_trajectory,
    sample_matrices,
    solve_dynamics,
    subspace_state,
)
from .paulis import FermionOp, PauliString, PauliSum, jordan_wigner
from .resources import (
    CostFormula,
    ScenarioParams,
    crossover_heuristic,
    crossover_threshold,
    propagator_cost,
    qas_cost,
    standard_method_cost,
)
from .statevector import (
    ExactPropagator,
    StateVector,
    apply_pauli_sum,
    expectation,
    inner,
    trotter1_evolve,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "CoefficientTrajectory",
    "ConditionError",
    "CostFormula",
    "EngineError",
    "ExactPropagator",
    "FermionOp",
    "IntegralSet",
    "PauliString",
    "PauliSum",
    "QasMatrices",
    "ScenarioParams",
    "ShotModel",
    "StateVector",
    "apply_pauli_sum",
    "build_basis",
    "build_hamiltonian",
    "build_initial_state",
    "build_observables",
    "crossover_heuristic",
    "crossover_threshold",
    "derive_seeds",
    "dominant_frequency",
    "exact_matrices",
    "expectation",
    "inner",
    "jordan_wigner",
    "lin_independence_report",
    "load_integrals",
    "min_error_overlap",
    "observable_trajectory",
    "propagator_cost",
    "qas_cost",
    "sample_matrices",
    "sector_spectrum",
    "solve_dynamics",
    "standard_method_cost",
    "subspace_state",
    "trotter1_evolve",
    "__version__",
]
