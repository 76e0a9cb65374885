"""Parametrized exponential-Pauli circuits and their exact derivatives.

An ansatz prepares |phi(l)> by applying gates U(l_1), U(l_2), ... to a
reference state in the listed order (gate 1 hits the reference first) and
optionally multiplying by a global phase exp(-i l_0).  Each gate is

    U(l) = exp(-i l G)   or   exp(+i l G)

for a Hermitian generator G = sum_a s_a P_a with real weights s_a over Pauli
strings P_a.  Because G commutes with its own exponential, the derivative of
the prepared state with respect to l_k is obtained exactly by inserting
(-+ i G_k) immediately after gate k:

    d|phi>/dl_k = U_N ... U_{k+1} (-+ i G_k) U_k ... U_1 |ref>.

From these derivative states the equations of motion for real-time evolution
follow from McLachlan's principle as the linear system M ldot = V with

    M_ki = Re <d_k phi | d_i phi>,      V_k = Im <d_k phi | H | phi>.

The sign convention in V is fixed so that the single-parameter rotation
exp(-i l X)|0> under H = X evolves with ldot = +1, reproducing exact
Schrodinger evolution (see the calibration tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum
from .states import StateVector, apply_pauli_sum_array, exp_pauli_array

__all__ = [
    "SIGN_CONVENTIONS",
    "AnsatzGate",
    "Ansatz",
    "MVSystem",
    "assemble_mv",
    "assemble_gradient",
    "x_rotation_ansatz",
    "rabi_ansatz",
    "h2_ansatz",
]

SIGN_CONVENTIONS = ("minus_i", "plus_i")

#: Allowed asymmetry |M - M^T| in an assembled M matrix.
M_SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AnsatzGate:
    """One parametrized layer exp(-i l G) (minus_i) or exp(+i l G) (plus_i)."""

    generator: PauliSum
    sign: str = "minus_i"

    def __post_init__(self) -> None:
        if self.sign not in SIGN_CONVENTIONS:
            raise ValueError(f"sign must be one of {SIGN_CONVENTIONS}, got {self.sign!r}")
        self.generator.require_hermitian()

    @property
    def qubit_count(self) -> int:
        return self.generator.qubit_count

    @property
    def derivative_factor(self) -> complex:
        """The -i (minus_i) or +i (plus_i) inserted by differentiation."""
        return -1j if self.sign == "minus_i" else 1j

    def apply(self, angle: float, amplitudes: np.ndarray) -> np.ndarray:
        signed = angle if self.sign == "minus_i" else -angle
        return exp_pauli_array(self.generator, signed, amplitudes)


def _apply_generator(generator: PauliSum, amplitudes: np.ndarray) -> np.ndarray:
    return apply_pauli_sum_array(generator, amplitudes)


@dataclass(frozen=True)
class Ansatz:
    """Gate sequence plus reference state |phi(l)> = U(l_N)...U(l_1)|ref>.

    When ``global_phase_param`` is set the parameter vector gains a leading
    entry l_0 and the prepared state is multiplied by exp(-i l_0).  A global
    phase parameter makes real-time McLachlan evolution exact on manifolds
    that otherwise cover states only up to phase, so it defaults to on for
    dynamics experiments and off for ground-state search.
    """

    qubit_count: int
    gates: tuple[AnsatzGate, ...]
    reference: StateVector
    global_phase_param: bool = False

    def __post_init__(self) -> None:
        if self.reference.qubit_count != self.qubit_count:
            raise ValueError(
                f"reference acts on {self.reference.qubit_count} qubits, expected {self.qubit_count}"
            )
        for i, gate in enumerate(self.gates):
            if gate.qubit_count != self.qubit_count:
                raise ValueError(f"gate {i} acts on {gate.qubit_count} qubits, expected {self.qubit_count}")
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def parameter_count(self) -> int:
        return len(self.gates) + (1 if self.global_phase_param else 0)

    def split_params(self, params: "np.ndarray | list[float]") -> tuple[float | None, np.ndarray]:
        """Separate the optional global-phase parameter from the gate angles."""
        vec = np.asarray(params, dtype=float).ravel()
        if vec.shape != (self.parameter_count,):
            raise ValueError(f"expected {self.parameter_count} parameters, got {vec.shape[0]}")
        if self.global_phase_param:
            return float(vec[0]), vec[1:]
        return None, vec

    # -- state preparation ----------------------------------------------------

    def prepare(self, params: "np.ndarray | list[float]") -> StateVector:
        """|phi(l)>: gates applied in listed order, then the global phase."""
        lam0, angles = self.split_params(params)
        vec = self.reference.amplitudes
        for gate, angle in zip(self.gates, angles):
            vec = gate.apply(angle, vec)
        if lam0 is not None:
            vec = np.exp(-1j * lam0) * vec
        return StateVector(self.qubit_count, vec)

    def derivative_state(self, params: "np.ndarray | list[float]", k: int) -> np.ndarray:
        """d|phi(l)>/dl_k as a raw (possibly unnormalized) amplitude array.

        ``k`` indexes the full parameter vector; with a global phase parameter,
        k = 0 returns -i |phi(l)>.
        """
        if not 0 <= k < self.parameter_count:
            raise IndexError(f"parameter index {k} out of range for {self.parameter_count} parameters")
        lam0, angles = self.split_params(params)
        if lam0 is not None and k == 0:
            return -1j * self.prepare(params).amplitudes
        g = k - 1 if self.global_phase_param else k
        vec = self.reference.amplitudes
        for j in range(g + 1):
            vec = self.gates[j].apply(angles[j], vec)
        vec = self.gates[g].derivative_factor * _apply_generator(self.gates[g].generator, vec)
        for j in range(g + 1, len(self.gates)):
            vec = self.gates[j].apply(angles[j], vec)
        if lam0 is not None:
            vec = np.exp(-1j * lam0) * vec
        return vec

    def derivative_bundle(self, params: "np.ndarray | list[float]") -> tuple[np.ndarray, list[np.ndarray]]:
        """The prepared state and all parameter derivatives, sharing prefixes."""
        lam0, angles = self.split_params(params)
        prefixes = [self.reference.amplitudes]
        for gate, angle in zip(self.gates, angles):
            prefixes.append(gate.apply(angle, prefixes[-1]))
        phi = prefixes[-1]
        derivs: list[np.ndarray] = []
        if lam0 is not None:
            derivs.append(-1j * phi)
        for g, gate in enumerate(self.gates):
            vec = gate.derivative_factor * _apply_generator(gate.generator, prefixes[g + 1])
            for j in range(g + 1, len(self.gates)):
                vec = self.gates[j].apply(angles[j], vec)
            derivs.append(vec)
        if lam0 is not None:
            factor = np.exp(-1j * lam0)
            phi = factor * phi
            derivs = [factor * d for d in derivs]
        return phi, derivs


@dataclass(frozen=True)
class MVSystem:
    """The per-step linear system M ldot = V of the variational equations."""

    m: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        v = np.asarray(self.v, dtype=float).ravel()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"M must be square, got shape {m.shape}")
        if v.shape != (m.shape[0],):
            raise ValueError(f"V has shape {v.shape}, expected ({m.shape[0]},)")
        asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if asym > M_SYMMETRY_TOLERANCE:
            raise ValueError(f"M is not symmetric: max |M - M^T| = {asym:g}")
        m.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v)

    @property
    def size(self) -> int:
        return self.m.shape[0]


def _overlaps(ansatz: Ansatz, params, hamiltonian: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    """M matrix plus the complex vector g_k = <d_k phi | H | phi>."""
    if hamiltonian.qubit_count != ansatz.qubit_count:
        raise ValueError(
            f"Hamiltonian acts on {hamiltonian.qubit_count} qubits, ansatz on {ansatz.qubit_count}"
        )
    hamiltonian.require_hermitian()
    phi, derivs = ansatz.derivative_bundle(params)
    hphi = apply_pauli_sum_array(hamiltonian, phi)
    p = len(derivs)
    m = np.empty((p, p), dtype=float)
    g = np.empty(p, dtype=complex)
    for k in range(p):
        dk = derivs[k]
        for i in range(p):
            m[k, i] = np.vdot(dk, derivs[i]).real
        g[k] = np.vdot(dk, hphi)
    return m, g


def assemble_mv(ansatz: Ansatz, params, hamiltonian: PauliSum) -> MVSystem:
    """M_ki = Re <d_k phi|d_i phi> and V_k = Im <d_k phi|H|phi> at ``params``.

    M is symmetric positive semidefinite (it is a Gram matrix of derivative
    states under the real inner product).
    """
    m, g = _overlaps(ansatz, params, hamiltonian)
    return MVSystem(m, g.imag)


def assemble_gradient(ansatz: Ansatz, params, hamiltonian: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    """M plus the energy half-gradient C_k = Re <d_k phi|H|phi>.

    dE/dl_k = 2 C_k for a unitary ansatz, so imaginary-time descent solves
    M ldot = -C/2.
    """
    m, g = _overlaps(ansatz, params, hamiltonian)
    return m, g.real


# -- ansatz factories ---------------------------------------------------------


def x_rotation_ansatz() -> Ansatz:
    """exp(-i l X)|0>: the single-parameter calibration ansatz."""
    from .states import basis_state

    gate = AnsatzGate(PauliSum.from_terms([(1.0, "X")]), "minus_i")
    return Ansatz(1, (gate,), basis_state(1, "0"))


def rabi_ansatz(global_phase: bool = True) -> Ansatz:
    """The driven two-level ansatz exp(+i a Z) exp(+i b X)|0>.

    Listed order applies the X rotation to |0> first and the Z rotation last,
    so with the global phase on, the three parameters cover every normalized
    single-qubit state and real-time evolution is exact up to stepping error.
    """
    from .states import basis_state

    x_gate = AnsatzGate(PauliSum.from_terms([(1.0, "X")]), "plus_i")
    z_gate = AnsatzGate(PauliSum.from_terms([(1.0, "Z")]), "plus_i")
    return Ansatz(1, (x_gate, z_gate), basis_state(1, "0"), global_phase_param=global_phase)


def h2_ansatz(global_phase: bool = False) -> Ansatz:
    """The two-qubit pair ansatz exp(+i a X0Y1) exp(+i b Z0)|01>.

    The X0Y1 rotation mixes |01> and |10> with a real angle, which is exactly
    the manifold containing singlet-like ground states of two-qubit molecular
    Hamiltonians in the particle-conserving sector.
    """
    from .states import basis_state

    z_gate = AnsatzGate(PauliSum.from_terms([(1.0, "ZI")]), "plus_i")
    xy_gate = AnsatzGate(PauliSum.from_terms([(1.0, "XY")]), "plus_i")
    return Ansatz(2, (z_gate, xy_gate), basis_state(2, "01"), global_phase_param=global_phase)
