"""Variational real- and imaginary-time dynamics for Pauli-string Hamiltonians.

The package simulates parametrized exponential-Pauli ansatz states whose
parameters evolve by McLachlan's variational principle, evaluates the
required overlap matrices either directly or through simulated Hadamard-test
circuits, and validates the results against independent oracles: exact
diagonalization, exact dense propagation, stationary perturbation theory, and
the coupled coefficient equations of driven systems.
"""

from .ansatz import (
    Ansatz,
    AnsatzGate,
    MVSystem,
    assemble_gradient,
    assemble_mv,
    h2_ansatz,
    rabi_ansatz,
    x_rotation_ansatz,
)
from .circuits import (
    ControlledSequence,
    PauliGate,
    RotationGate,
    estimate_gradient_circuit,
    estimate_mv_circuit,
    hadamard_test,
)
from .config import ExperimentConfig, SweepSpec, config_to_text, load_config, parse_config
from .drive import DriveSpec, DriveTerm, TimeDependentHamiltonian, as_time_dependent
from .engine import (
    EvolutionConfig,
    GroundStateNotConverged,
    GroundStateResult,
    PropagationAborted,
    Trajectory,
    evolve_real_time,
    ground_state_search,
    solve_step,
    write_trajectory_csv,
)
from .oracles import (
    CoefficientTrajectory,
    SpectralData,
    exact_diagonalize,
    rabi_analytic,
    tdpt_integrate,
    tipt_corrections,
)
from .pauli import PauliSum, PauliTerm, identity, multiply
from .states import (
    StateVector,
    apply_exp_pauli,
    apply_pauli,
    basis_state,
    exact_propagate,
    expectation,
    fidelity,
    inner,
)

__version__ = "0.1.0"

__all__ = [
    "Ansatz",
    "AnsatzGate",
    "MVSystem",
    "assemble_gradient",
    "assemble_mv",
    "h2_ansatz",
    "rabi_ansatz",
    "x_rotation_ansatz",
    "ControlledSequence",
    "PauliGate",
    "RotationGate",
    "estimate_gradient_circuit",
    "estimate_mv_circuit",
    "hadamard_test",
    "ExperimentConfig",
    "SweepSpec",
    "config_to_text",
    "load_config",
    "parse_config",
    "DriveSpec",
    "DriveTerm",
    "TimeDependentHamiltonian",
    "as_time_dependent",
    "EvolutionConfig",
    "GroundStateNotConverged",
    "GroundStateResult",
    "PropagationAborted",
    "Trajectory",
    "evolve_real_time",
    "ground_state_search",
    "solve_step",
    "write_trajectory_csv",
    "CoefficientTrajectory",
    "SpectralData",
    "exact_diagonalize",
    "rabi_analytic",
    "tdpt_integrate",
    "tipt_corrections",
    "PauliSum",
    "PauliTerm",
    "identity",
    "multiply",
    "StateVector",
    "apply_exp_pauli",
    "apply_pauli",
    "basis_state",
    "exact_propagate",
    "expectation",
    "fidelity",
    "inner",
    "__version__",
]
