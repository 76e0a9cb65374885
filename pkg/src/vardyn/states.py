"""Dense normalized state vectors over 2^n computational basis states.

Bit convention: qubit 0 is the leftmost character of a basis label and the
most significant bit of the basis index, so ``basis_state(2, "01")`` puts
amplitude 1 at index 1.

Everything here works in natural units (hbar = 1); the Schrodinger equation
integrated by :func:`exact_propagate` is i d|psi>/dt = H(t) |psi>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .drive import TimeDependentHamiltonian, as_time_dependent
from .pauli import DENSE_QUBIT_CAP, PauliSum, PauliTerm

__all__ = [
    "NORM_TOLERANCE",
    "StateVector",
    "basis_state",
    "apply_pauli",
    "apply_pauli_array",
    "apply_pauli_sum_array",
    "apply_exp_pauli",
    "exp_pauli_array",
    "inner",
    "fidelity",
    "expectation",
    "schrodinger_step",
    "exact_propagate",
]

#: Allowed deviation of the squared norm from 1 at construction.
NORM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized complex amplitude vector over 2^n basis states.

    The amplitude array is copied and frozen at construction; operations
    return new states, so instances are safe to share between threads.
    """

    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.qubit_count < 1:
            raise ValueError(f"qubit_count must be positive, got {self.qubit_count}")
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        dim = 1 << self.qubit_count
        if amp.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes for {self.qubit_count} qubits, got {amp.shape[0]}")
        norm_sq = float(np.vdot(amp, amp).real)
        if abs(norm_sq - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def populations(self) -> np.ndarray:
        """Probabilities |amplitude|^2 per basis index."""
        return np.abs(self.amplitudes) ** 2

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, StateVector)
            and self.qubit_count == other.qubit_count
            and bool(np.array_equal(self.amplitudes, other.amplitudes))
        )

    __hash__ = None  # type: ignore[assignment]


def basis_state(qubit_count: int, label: str) -> StateVector:
    """Computational basis state for a bitstring label (qubit 0 leftmost)."""
    if len(label) != qubit_count or any(c not in "01" for c in label):
        raise ValueError(f"label {label!r} is not a bitstring of length {qubit_count}")
    amp = np.zeros(1 << qubit_count, dtype=complex)
    amp[int(label, 2)] = 1.0
    return StateVector(qubit_count, amp)


@lru_cache(maxsize=1024)
def _compiled_action(letters: str) -> tuple[np.ndarray, np.ndarray]:
    """Permutation/phase form of a phase-free Pauli string.

    P |i> = phase[i] |perm[i]>, so (P psi)[perm] = phase * psi.
    """
    n = len(letters)
    idx = np.arange(1 << n)
    phase = np.ones(1 << n, dtype=complex)
    flip = 0
    for q, ch in enumerate(letters):
        if ch == "I":
            continue
        bit = (idx >> (n - 1 - q)) & 1
        if ch in "XY":
            flip |= 1 << (n - 1 - q)
        if ch == "Y":
            phase = phase * np.where(bit == 0, 1j, -1j)
        elif ch == "Z":
            phase = phase * np.where(bit == 0, 1.0, -1.0)
    perm = idx ^ flip
    perm.setflags(write=False)
    phase.setflags(write=False)
    return perm, phase


def apply_pauli_array(term: PauliTerm, amplitudes: np.ndarray) -> np.ndarray:
    """P |psi> on a raw amplitude array, including the term's phase."""
    perm, phase = _compiled_action(term.letters)
    out = np.empty_like(amplitudes)
    if term.phase == 1:
        out[perm] = phase * amplitudes
    else:
        out[perm] = (term.phase * phase) * amplitudes
    return out


def apply_pauli(term: PauliTerm, state: StateVector) -> StateVector:
    """P |psi>; norm is preserved since Pauli strings are unitary."""
    if term.qubit_count != state.qubit_count:
        raise ValueError(f"qubit count mismatch: {term.qubit_count} vs {state.qubit_count}")
    return StateVector(state.qubit_count, apply_pauli_array(term, state.amplitudes))


def apply_pauli_sum_array(operator: PauliSum, amplitudes: np.ndarray) -> np.ndarray:
    """(sum_j c_j P_j) |psi> on a raw amplitude array."""
    out = np.zeros_like(amplitudes)
    for coeff, letters in operator.terms:
        perm, phase = _compiled_action(letters)
        out[perm] += (coeff * phase) * amplitudes
    return out


def exp_pauli_array(generator: PauliSum, angle: float, amplitudes: np.ndarray) -> np.ndarray:
    """exp(-i * angle * G) |psi> for a Hermitian generator G.

    A single-term generator s*P uses the closed form
    cos(angle*s) - i sin(angle*s) P, valid because P^2 = I; anything else goes
    through a dense eigendecomposition (within the dense cap).
    """
    generator.require_hermitian()
    if len(generator) == 0:
        return amplitudes.copy()
    if len(generator) == 1:
        coeff, letters = generator.terms[0]
        theta = angle * coeff.real
        return np.cos(theta) * amplitudes - 1j * np.sin(theta) * apply_pauli_array(
            PauliTerm(letters), amplitudes
        )
    dense = generator.to_dense()
    evals, evecs = np.linalg.eigh(dense)
    return evecs @ (np.exp(-1j * angle * evals) * (evecs.conj().T @ amplitudes))


def apply_exp_pauli(generator: PauliSum, angle: float, state: StateVector) -> StateVector:
    """exp(-i * angle * G) |psi> as a new normalized state."""
    if generator.qubit_count != state.qubit_count:
        raise ValueError(f"qubit count mismatch: {generator.qubit_count} vs {state.qubit_count}")
    return StateVector(state.qubit_count, exp_pauli_array(generator, angle, state.amplitudes))


def _as_array(state: "StateVector | np.ndarray") -> np.ndarray:
    return state.amplitudes if isinstance(state, StateVector) else np.asarray(state)


def inner(a: "StateVector | np.ndarray", b: "StateVector | np.ndarray") -> complex:
    """<a|b>, conjugating a."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return complex(np.vdot(va, vb))


def fidelity(a: "StateVector | np.ndarray", b: "StateVector | np.ndarray") -> float:
    """|<a|b>|^2, insensitive to global phases."""
    return abs(inner(a, b)) ** 2


def expectation(operator: PauliSum, state: "StateVector | np.ndarray") -> float:
    """Re <psi| O |psi>; equals the full expectation for Hermitian O."""
    vec = _as_array(state)
    return float(np.vdot(vec, apply_pauli_sum_array(operator, vec)).real)


def schrodinger_step(dense_at, t: float, dt: float, psi: np.ndarray) -> np.ndarray:
    """One classical 4th-order step of i dpsi/dt = H(t) psi (no renormalization).

    ``dense_at(t)`` must return the dense Hamiltonian at time t.
    """
    k1 = -1j * (dense_at(t) @ psi)
    h_mid = dense_at(t + 0.5 * dt)
    k2 = -1j * (h_mid @ (psi + 0.5 * dt * k1))
    k3 = -1j * (h_mid @ (psi + 0.5 * dt * k2))
    k4 = -1j * (dense_at(t + dt) @ (psi + dt * k3))
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def exact_propagate(
    hamiltonian: "PauliSum | TimeDependentHamiltonian",
    initial: StateVector,
    t_final: float,
    dt: float,
) -> StateVector:
    """Propagate |psi(0)> to time t_final by dense 4th-order stepping.

    This is the exact-evolution oracle: it never touches the variational code
    path.  The state is renormalized after every step, which guards against
    slow norm drift over long horizons.  For a time-independent Hamiltonian
    and dt -> 0 the result converges to exp(-i H t)|psi(0)>.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be nonnegative, got {t_final}")
    tdh = as_time_dependent(hamiltonian)
    if tdh.qubit_count != initial.qubit_count:
        raise ValueError(f"qubit count mismatch: {tdh.qubit_count} vs {initial.qubit_count}")
    psi = initial.amplitudes.copy()
    t = 0.0
    eps = 1e-12 * max(1.0, t_final)
    while t < t_final - eps:
        step = min(dt, t_final - t)
        psi = schrodinger_step(tdh.dense_at, t, step, psi)
        psi /= np.linalg.norm(psi)
        t += step
    return StateVector(initial.qubit_count, psi)
