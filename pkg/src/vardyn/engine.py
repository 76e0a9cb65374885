"""Time stepping of the variational equations of motion.

Real-time dynamics solves M ldot = V per step and integrates the parameter
trajectory with Euler or classical 4th-order stepping; ground-state search
runs the imaginary-time analogue M ldot = -C/2 with C_k = Re <d_k phi|H|phi>
until the energy stops changing.  The matrix M can be singular (it is for
several ansaetze at l = 0), so the per-step solve supports both Tikhonov
regularization (M + eps I) and a minimum-norm pseudo-inverse at eps = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ansatz import Ansatz, MVSystem, assemble_gradient, assemble_mv
from .drive import TimeDependentHamiltonian, as_time_dependent
from .pauli import PauliSum
from .states import StateVector, expectation, fidelity, schrodinger_step

__all__ = [
    "INTEGRATORS",
    "BACKENDS",
    "EvolutionConfig",
    "Trajectory",
    "GroundStateResult",
    "PropagationAborted",
    "GroundStateNotConverged",
    "solve_step",
    "evolve_real_time",
    "ground_state_search",
    "write_trajectory_csv",
]

_log = logging.getLogger(__name__)

INTEGRATORS = ("euler", "rk4")
BACKENDS = ("direct", "circuit")

#: Singular values below this count as zero in the eps = 0 pseudo-inverse.
SINGULAR_CUTOFF = 1e-10

#: Condition-number threshold for the consecutive-step abort rule at eps = 0.
CONDITION_LIMIT = 1e12
CONDITION_STREAK = 10

#: Coordinate offset used to probe for descent directions at stationary points.
ESCAPE_PROBE_STEP = 1e-2


class PropagationAborted(RuntimeError):
    """Raised when M stays ill-conditioned for too many unregularized steps."""


class GroundStateNotConverged(RuntimeError):
    """Raised when imaginary-time descent exhausts its step budget."""


@dataclass(frozen=True)
class EvolutionConfig:
    """Stepping controls shared by real-time evolution and ground-state search.

    ``regularization`` is the Tikhonov eps added to M before solving; the
    default 1e-8 stabilizes early steps where M is singular without biasing
    converged trajectories.  ``t_final`` is ignored by ground-state search,
    which runs until ``convergence`` (|dE| per unit imaginary time) or
    ``max_steps``.
    """

    dt: float
    t_final: float = 0.0
    integrator: str = "rk4"
    regularization: float = 1e-8
    backend: str = "direct"
    record_populations: bool = True
    record_fidelity: bool = False
    record_states: bool = False
    max_steps: int = 100_000
    convergence: float = 1e-9

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not (math.isfinite(self.t_final) and self.t_final >= 0):
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        if self.t_final != 0 and self.dt > self.t_final * (1 + 1e-12):
            raise ValueError(f"dt = {self.dt} exceeds t_final = {self.t_final}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if not (math.isfinite(self.regularization) and self.regularization >= 0):
            raise ValueError(f"regularization must be nonnegative, got {self.regularization}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")


@dataclass
class Trajectory:
    """Recorded time series: one row per step, including the initial point."""

    times: np.ndarray
    params: np.ndarray
    observables: dict[str, np.ndarray]
    states: list[StateVector] | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.params = np.asarray(self.params, dtype=float)
        rows = self.times.shape[0]
        if self.params.shape[0] != rows:
            raise ValueError(f"params has {self.params.shape[0]} rows, times has {rows}")
        for name, series in self.observables.items():
            series = np.asarray(series, dtype=float)
            if series.shape[0] != rows:
                raise ValueError(f"observable {name!r} has {series.shape[0]} rows, times has {rows}")
            self.observables[name] = series
        if self.states is not None and len(self.states) != rows:
            raise ValueError(f"states has {len(self.states)} entries, times has {rows}")
        if rows > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    @property
    def rows(self) -> int:
        return self.times.shape[0]


@dataclass
class GroundStateResult:
    energy: float
    params: np.ndarray
    trajectory: Trajectory
    steps: int
    gradient_norm: float


def _solve_with_cond(m: np.ndarray, v: np.ndarray, regularization: float) -> tuple[np.ndarray, float]:
    """Solve for ldot; the condition number is tracked only at eps = 0,
    where the consecutive-step abort rule needs it (the SVD is free there)."""
    if regularization > 0:
        reg = m + regularization * np.eye(m.shape[0])
        return np.linalg.solve(reg, v), float("nan")
    u, s, vt = np.linalg.svd(m)
    if s.size == 0:
        return np.zeros_like(v), 1.0
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    inv = np.where(s >= SINGULAR_CUTOFF, np.divide(1.0, s, out=np.zeros_like(s), where=s > 0), 0.0)
    return vt.T @ (inv * (u.T @ v)), cond


def solve_step(system: MVSystem, regularization: float = 0.0) -> np.ndarray:
    """Parameter velocities ldot for one step.

    With regularization eps > 0 this solves (M + eps I) ldot = V directly;
    at eps = 0 it returns the minimum-norm least-squares solution, treating
    singular values below 1e-10 as zero, so singular M never raises.  The
    condition number goes to the debug log.
    """
    x, cond = _solve_with_cond(system.m, system.v, regularization)
    if _log.isEnabledFor(logging.DEBUG):
        _log.debug("solve_step: size=%d cond=%g regularization=%g", system.size, cond, regularization)
    return x


def _mv_assembler(config: EvolutionConfig, dump_dir: "Path | str | None"):
    if config.backend == "direct":
        return lambda ansatz, lam, h: assemble_mv(ansatz, lam, h)
    from .circuits import estimate_mv_circuit

    counter = iter(range(10**9))
    dump = Path(dump_dir) if dump_dir is not None else None

    def assemble(ansatz, lam, h):
        path = dump / f"assembly_{next(counter):06d}.txt" if dump is not None else None
        return estimate_mv_circuit(ansatz, lam, h, dump_path=path)

    return assemble


def _gradient_assembler(config: EvolutionConfig, dump_dir: "Path | str | None"):
    if config.backend == "direct":
        return lambda ansatz, lam, h: assemble_gradient(ansatz, lam, h)
    from .circuits import estimate_gradient_circuit

    counter = iter(range(10**9))
    dump = Path(dump_dir) if dump_dir is not None else None

    def assemble(ansatz, lam, h):
        path = dump / f"assembly_{next(counter):06d}.txt" if dump is not None else None
        return estimate_gradient_circuit(ansatz, lam, h, dump_path=path)

    return assemble


def _population_labels(qubit_count: int) -> list[str]:
    return [format(i, f"0{qubit_count}b") for i in range(1 << qubit_count)]


class _Recorder:
    """Accumulates per-step rows for a Trajectory."""

    def __init__(self, ansatz: Ansatz, config: EvolutionConfig, with_fidelity: bool):
        self.ansatz = ansatz
        self.config = config
        self.with_fidelity = with_fidelity
        self.times: list[float] = []
        self.params: list[np.ndarray] = []
        self.energy: list[float] = []
        self.pops: list[np.ndarray] = []
        self.fid: list[float] = []
        self.states: list[StateVector] | None = [] if config.record_states else None

    def record(self, t: float, lam: np.ndarray, h_t: PauliSum, psi_exact: np.ndarray | None) -> None:
        phi = self.ansatz.prepare(lam)
        self.times.append(t)
        self.params.append(lam.copy())
        self.energy.append(expectation(h_t, phi))
        if self.config.record_populations:
            self.pops.append(phi.populations())
        if self.with_fidelity:
            assert psi_exact is not None
            self.fid.append(fidelity(psi_exact, phi))
        if self.states is not None:
            self.states.append(phi)

    def build(self) -> Trajectory:
        observables: dict[str, np.ndarray] = {"energy": np.asarray(self.energy)}
        if self.pops:
            pops = np.asarray(self.pops)
            for i, label in enumerate(_population_labels(self.ansatz.qubit_count)):
                observables[f"pop_{label}"] = pops[:, i]
        if self.fid:
            observables["fidelity"] = np.asarray(self.fid)
        return Trajectory(
            times=np.asarray(self.times),
            params=np.asarray(self.params),
            observables=observables,
            states=self.states,
        )


def evolve_real_time(
    ansatz: Ansatz,
    params0,
    hamiltonian: "PauliSum | TimeDependentHamiltonian",
    config: EvolutionConfig,
    *,
    dump_dir: "Path | str | None" = None,
) -> Trajectory:
    """Integrate the McLachlan equations M ldot = V from t = 0 to t_final.

    Euler does one M/V assembly per step; rk4 does four, at the staged times
    and parameters.  Requested observables (energy, basis populations, and
    the fidelity against an independently co-propagated exact state when
    ``record_fidelity`` is set) are recorded at every step.

    Raises :class:`PropagationAborted` if the condition number of M exceeds
    1e12 for 10 consecutive steps while regularization is zero.
    """
    tdh = as_time_dependent(hamiltonian)
    if tdh.qubit_count != ansatz.qubit_count:
        raise ValueError(f"Hamiltonian acts on {tdh.qubit_count} qubits, ansatz on {ansatz.qubit_count}")
    lam = np.array(params0, dtype=float).ravel()
    if lam.shape != (ansatz.parameter_count,):
        raise ValueError(f"expected {ansatz.parameter_count} initial parameters, got {lam.shape[0]}")
    assemble = _mv_assembler(config, dump_dir)

    def velocity(t: float, params: np.ndarray) -> tuple[np.ndarray, float]:
        system = assemble(ansatz, params, tdh.at(t))
        return _solve_with_cond(system.m, system.v, config.regularization)

    psi_exact = ansatz.prepare(lam).amplitudes.copy() if config.record_fidelity else None
    recorder = _Recorder(ansatz, config, with_fidelity=config.record_fidelity)
    recorder.record(0.0, lam, tdh.at(0.0), psi_exact)

    t = 0.0
    streak = 0
    step_index = 0
    eps_t = 1e-12 * max(1.0, config.t_final)
    while t < config.t_final - eps_t:
        dt = min(config.dt, config.t_final - t)
        if config.integrator == "euler":
            k1, cond = velocity(t, lam)
            lam = lam + dt * k1
        else:
            k1, cond = velocity(t, lam)
            k2, _ = velocity(t + 0.5 * dt, lam + 0.5 * dt * k1)
            k3, _ = velocity(t + 0.5 * dt, lam + 0.5 * dt * k2)
            k4, _ = velocity(t + dt, lam + dt * k3)
            lam = lam + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if config.regularization == 0.0:
            streak = streak + 1 if cond > CONDITION_LIMIT else 0
            if streak >= CONDITION_STREAK:
                raise PropagationAborted(
                    f"M condition number above {CONDITION_LIMIT:g} for {streak} consecutive "
                    f"steps with zero regularization (step {step_index}, t = {t:g}, cond = {cond:g})"
                )
        if psi_exact is not None:
            psi_exact = schrodinger_step(tdh.dense_at, t, dt, psi_exact)
            psi_exact /= np.linalg.norm(psi_exact)
        t += dt
        step_index += 1
        recorder.record(t, lam, tdh.at(t), psi_exact)
    return recorder.build()


def ground_state_search(
    ansatz: Ansatz,
    params0,
    hamiltonian: PauliSum,
    config: EvolutionConfig,
    *,
    dump_dir: "Path | str | None" = None,
) -> GroundStateResult:
    """Variational imaginary-time descent to the minimal-energy parameters.

    Each step solves M ldot = -C/2 with C_k = Re <d_k phi|H|phi> and advances
    the parameters by ``config.dt`` of imaginary time (Euler or rk4).  The
    iteration stops once |dE| per unit imaginary time falls below
    ``config.convergence``; the returned energy satisfies the variational
    bound E >= E_ground up to solver tolerance.

    A gradient flow started exactly at a stationary point (an excited
    eigenstate reachable by the ansatz, say) would never move, so on apparent
    convergence each coordinate is probed by a fixed offset and the descent
    restarts from any strictly lower point; convergence is only reported once
    no probe improves the energy.  The probe is deterministic.

    Raises :class:`GroundStateNotConverged` (reporting the final gradient
    norm) after ``config.max_steps`` steps without convergence.
    """
    if not isinstance(hamiltonian, PauliSum):
        raise ValueError("ground-state search needs a time-independent PauliSum Hamiltonian")
    hamiltonian.require_hermitian()
    if hamiltonian.qubit_count != ansatz.qubit_count:
        raise ValueError(
            f"Hamiltonian acts on {hamiltonian.qubit_count} qubits, ansatz on {ansatz.qubit_count}"
        )
    lam = np.array(params0, dtype=float).ravel()
    if lam.shape != (ansatz.parameter_count,):
        raise ValueError(f"expected {ansatz.parameter_count} initial parameters, got {lam.shape[0]}")
    assemble = _gradient_assembler(config, dump_dir)

    last_c = np.zeros_like(lam)

    def velocity(params: np.ndarray) -> np.ndarray:
        nonlocal last_c
        m, c = assemble(ansatz, params, hamiltonian)
        last_c = c
        x, _ = _solve_with_cond(m, -0.5 * c, config.regularization)
        return x

    def probe_descent(params: np.ndarray, energy: float) -> "np.ndarray | None":
        best, best_energy = None, energy - 1e-12
        for k in range(params.size):
            for sign in (1.0, -1.0):
                candidate = params.copy()
                candidate[k] += sign * ESCAPE_PROBE_STEP
                value = expectation(hamiltonian, ansatz.prepare(candidate))
                if value < best_energy:
                    best, best_energy = candidate, value
        return best

    recorder = _Recorder(ansatz, config, with_fidelity=False)
    recorder.record(0.0, lam, hamiltonian, None)
    energy = recorder.energy[-1]

    for step in range(1, config.max_steps + 1):
        if config.integrator == "euler":
            lam = lam + config.dt * velocity(lam)
        else:
            k1 = velocity(lam)
            k2 = velocity(lam + 0.5 * config.dt * k1)
            k3 = velocity(lam + 0.5 * config.dt * k2)
            k4 = velocity(lam + config.dt * k3)
            lam = lam + (config.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        recorder.record(step * config.dt, lam, hamiltonian, None)
        new_energy = recorder.energy[-1]
        if abs(new_energy - energy) / config.dt < config.convergence:
            escaped = probe_descent(lam, new_energy)
            if escaped is None:
                return GroundStateResult(
                    energy=new_energy,
                    params=lam,
                    trajectory=recorder.build(),
                    steps=step,
                    gradient_norm=float(np.linalg.norm(2.0 * last_c)),
                )
            lam = escaped
            new_energy = expectation(hamiltonian, ansatz.prepare(lam))
        energy = new_energy
    raise GroundStateNotConverged(
        f"no convergence after {config.max_steps} steps; final energy {energy:.12g}, "
        f"final gradient norm {float(np.linalg.norm(2.0 * last_c)):.3g}"
    )


def write_trajectory_csv(trajectory: Trajectory, path: "Path | str") -> Path:
    """Write ``t,param_0,...,energy[,pop_<label>...,fidelity]`` at full precision."""
    path = Path(path)
    n_params = trajectory.params.shape[1] if trajectory.params.ndim == 2 else 0
    header = ["t"] + [f"param_{i}" for i in range(n_params)]
    names = ["energy"]
    names += sorted(n for n in trajectory.observables if n.startswith("pop_"))
    if "fidelity" in trajectory.observables:
        names.append("fidelity")
    header += names
    lines = [",".join(header)]
    for row in range(trajectory.rows):
        cells = [f"{trajectory.times[row]:.17g}"]
        cells += [f"{trajectory.params[row, i]:.17g}" for i in range(n_params)]
        cells += [f"{trajectory.observables[name][row]:.17g}" for name in names]
        lines.append(",".join(cells))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
