"""Linear solves, real-time stepping, and ground-state descent."""

import numpy as np
import pytest

from vardyn import (
    Ansatz,
    AnsatzGate,
    EvolutionConfig,
    GroundStateNotConverged,
    MVSystem,
    PauliSum,
    PropagationAborted,
    Trajectory,
    basis_state,
    evolve_real_time,
    exact_diagonalize,
    ground_state_search,
    h2_ansatz,
    rabi_ansatz,
    solve_step,
    write_trajectory_csv,
    x_rotation_ansatz,
)
from vardyn.experiments import build_h2_hamiltonian, two_level_drive, two_level_h0
from vardyn.drive import TimeDependentHamiltonian
from vardyn.oracles import tdpt_integrate

X_SUM = PauliSum.from_terms([(1.0, "X")])
Z_SUM = PauliSum.from_terms([(1.0, "Z")])
I_SUM = PauliSum.from_terms([(1.0, "I")])


def test_solve_step_identity():
    assert np.allclose(solve_step(MVSystem(np.array([[1.0]]), np.array([1.0]))), [1.0])


def test_solve_step_zero_matrix_minimum_norm():
    assert np.allclose(solve_step(MVSystem(np.array([[0.0]]), np.array([0.0]))), [0.0])


def test_solve_step_tikhonov_closed_form():
    system = MVSystem(np.array([[2.0, 0.0], [0.0, 0.0]]), np.array([1.0, 0.0]))
    x = solve_step(system, regularization=1e-6)
    assert np.max(np.abs(x - np.array([0.5, 0.0]))) < 1e-5


def test_solve_step_nonsingular_matches_direct_solve():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        a = rng.normal(size=(n, n))
        m = a @ a.T + np.eye(n)  # symmetric positive definite
        v = rng.normal(size=n)
        system = MVSystem(m, v)
        assert np.max(np.abs(solve_step(system) - np.linalg.solve(m, v))) < 1e-10


def test_evolution_config_validation():
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.0)
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.5, t_final=0.1)
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.1, integrator="rk2")
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.1, backend="hardware")
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.1, regularization=-1.0)
    EvolutionConfig(dt=0.1, t_final=0.0)  # t_final = 0 is a single-point run


def test_evolve_calibration_parameter_is_time():
    cfg = EvolutionConfig(dt=1e-3, t_final=1.0, regularization=0.0)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    assert abs(trajectory.params[-1, 0] - 1.0) < 1e-6


def test_evolve_t_final_zero_single_row():
    cfg = EvolutionConfig(dt=1e-3, t_final=0.0)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    assert trajectory.rows == 1
    assert trajectory.times[0] == 0.0


def test_evolve_euler_first_order_convergence():
    # The single-X calibration flow has constant parameter velocity (Euler is
    # exact there), so first-order convergence is confirmed on the resonantly
    # driven two-level system, whose velocities vary along the trajectory.
    delta = 0.05
    h = TimeDependentHamiltonian(two_level_h0(0.0, 1.0), two_level_drive(delta, 1.0))
    ansatz = rabi_ansatz(global_phase=True)
    reference = tdpt_integrate([0.0, 1.0], h.drive, [1, 0], 1.0, 1e-4)

    def max_population_error(dt: float) -> float:
        cfg = EvolutionConfig(dt=dt, t_final=1.0, integrator="euler")
        trajectory = evolve_real_time(ansatz, [0.0, 0.0, 0.0], h, cfg)
        stride = int(round(dt / 1e-4))
        oracle_p2 = reference.populations()[::stride, 1]
        var_p2 = trajectory.observables["pop_1"]
        assert oracle_p2.shape == var_p2.shape
        return float(np.max(np.abs(var_p2 - oracle_p2)))

    err_coarse = max_population_error(4e-3)
    err_fine = max_population_error(2e-3)
    assert err_coarse / err_fine >= 1.9


def test_evolve_rk4_error_below_threshold_on_calibration():
    cfg = EvolutionConfig(dt=1e-3, t_final=1.0, regularization=0.0)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    assert abs(trajectory.params[-1, 0] - 1.0) < 1e-8


def test_evolve_energy_conserved_time_independent():
    cfg = EvolutionConfig(dt=1e-3, t_final=2.0, regularization=0.0)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    energy = trajectory.observables["energy"]
    assert np.max(np.abs(energy - energy[0])) < 1e-4


def test_evolve_records_requested_observables():
    cfg = EvolutionConfig(dt=1e-2, t_final=0.1, record_fidelity=True, record_states=True)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    assert set(trajectory.observables) == {"energy", "pop_0", "pop_1", "fidelity"}
    assert trajectory.states is not None and len(trajectory.states) == trajectory.rows
    assert np.all(trajectory.observables["fidelity"] >= 1 - 1e-8)


def test_evolve_condition_abort_when_unregularized():
    # Two identical gates give exactly parallel derivative states, so M stays
    # singular at every step and the eps = 0 abort rule must fire.
    ansatz = Ansatz(
        1,
        (AnsatzGate(X_SUM, "minus_i"), AnsatzGate(X_SUM, "minus_i")),
        basis_state(1, "0"),
    )
    cfg = EvolutionConfig(dt=1e-2, t_final=1.0, regularization=0.0, integrator="euler")
    with pytest.raises(PropagationAborted, match="condition"):
        evolve_real_time(ansatz, [0.0, 0.0], X_SUM, cfg)
    # ... while the default regularization handles the same system fine.
    cfg_reg = EvolutionConfig(dt=1e-2, t_final=0.2, regularization=1e-8, integrator="euler")
    trajectory = evolve_real_time(ansatz, [0.0, 0.0], X_SUM, cfg_reg)
    assert trajectory.rows == 21


def test_ground_state_x_rotation_on_z():
    result = ground_state_search(x_rotation_ansatz(), [0.3], Z_SUM, EvolutionConfig(dt=0.1))
    assert abs(result.energy - (-1.0)) < 1e-6
    assert abs(abs(np.sin(result.params[0])) - 1.0) < 1e-3


def test_ground_state_escapes_stationary_start():
    # lambda = 0 is an energy maximum of <phi|Z|phi> on this manifold; the
    # descent must probe its way off instead of reporting the excited level.
    result = ground_state_search(x_rotation_ansatz(), [0.0], Z_SUM, EvolutionConfig(dt=0.1))
    assert abs(result.energy - (-1.0)) < 1e-6


def test_ground_state_identity_hamiltonian():
    result = ground_state_search(x_rotation_ansatz(), [0.7], I_SUM, EvolutionConfig(dt=0.1))
    assert abs(result.energy - 1.0) < 1e-12


def test_ground_state_h2_row_matches_exact_diagonalization():
    g = np.array([-0.75, 0.16, -0.16, 0.11, 0.06, 0.06])
    h = build_h2_hamiltonian(g)
    exact = exact_diagonalize(h).ground_energy
    result = ground_state_search(h2_ansatz(), [0.0, 0.0], h, EvolutionConfig(dt=0.1))
    assert result.energy >= exact - 1e-9
    assert abs(result.energy - exact) < 1e-6


def test_ground_state_energy_monotone_nonincreasing():
    g = np.array([-0.55, 0.25, -0.25, 0.08, 0.1, 0.1])
    result = ground_state_search(h2_ansatz(), [0.0, 0.0], build_h2_hamiltonian(g), EvolutionConfig(dt=0.1))
    energy = result.trajectory.observables["energy"]
    assert np.all(np.diff(energy) <= 1e-9)


def test_ground_state_nonconvergence_reports_gradient():
    cfg = EvolutionConfig(dt=1e-4, max_steps=3)
    with pytest.raises(GroundStateNotConverged, match="gradient norm"):
        ground_state_search(x_rotation_ansatz(), [0.3], Z_SUM, cfg)


def test_trajectory_validation():
    with pytest.raises(ValueError, match="increasing"):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 1)), {"energy": np.zeros(2)})
    with pytest.raises(ValueError, match="rows"):
        Trajectory(np.array([0.0, 1.0]), np.zeros((3, 1)), {"energy": np.zeros(2)})


def test_write_trajectory_csv_header_and_shape(tmp_path):
    cfg = EvolutionConfig(dt=1e-2, t_final=0.05, record_fidelity=True)
    trajectory = evolve_real_time(x_rotation_ansatz(), [0.0], X_SUM, cfg)
    path = write_trajectory_csv(trajectory, tmp_path / "trajectory.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,param_0,energy,pop_0,pop_1,fidelity"
    assert len(lines) == trajectory.rows + 1
    assert lines[1].startswith("0,0,")
