"""Classical reference computations the variational results are judged against.

Four independent oracles, all in natural units (hbar = 1):

* exact diagonalization of a Pauli-sum Hamiltonian,
* stationary perturbation theory at orders 1 and 2 for a split H0 + lambda V,
* the exact coupled coefficient equations of a driven system, integrated in
  the H0 eigenbasis,
        i dc_m/dt = sum_n V_mn(t) exp(i w_mn t) c_n,   w_mn = w_m - w_n,
* the closed-form populations of a driven two-level system (Rabi formula).

For the stationary series the standard energy-denominator convention
E_n - E_m is used, with the first-order state summed over the coupled levels
|m>; only this convention makes the order-2 energy error scale as lambda^3
against exact diagonalization, which is exactly how the tests pin it down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .drive import DriveSpec
from .pauli import DENSE_QUBIT_CAP, PauliSum

__all__ = [
    "SpectralData",
    "CoefficientTrajectory",
    "exact_diagonalize",
    "tipt_corrections",
    "tdpt_integrate",
    "rabi_analytic",
]

#: Levels closer than this refuse nondegenerate perturbation theory.
DEGENERACY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues in ascending order with orthonormal eigenvectors as columns."""

    energies: np.ndarray
    states: np.ndarray

    def __post_init__(self) -> None:
        energies = np.asarray(self.energies, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if states.shape != (energies.size, energies.size):
            raise ValueError(f"states shape {states.shape} does not match {energies.size} energies")
        energies.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "states", states)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.states[:, 0]


class CoefficientTrajectory(NamedTuple):
    """Time grid and basis-coefficient vectors c_m(t), one row per time."""

    times: np.ndarray
    coefficients: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.coefficients[-1]

    def populations(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


def exact_diagonalize(hamiltonian: PauliSum, cap: int = DENSE_QUBIT_CAP) -> SpectralData:
    """Full eigendecomposition of a Hermitian Pauli sum (ground truth oracle)."""
    hamiltonian.require_hermitian()
    energies, states = np.linalg.eigh(hamiltonian.to_dense(cap))
    return SpectralData(energies, states)


def tipt_corrections(
    h0: PauliSum,
    v: PauliSum,
    lam: float,
    level: int,
    order: int,
) -> tuple[float, np.ndarray]:
    """Stationary perturbation series for H = H0 + lambda V at one level.

    Order 1:
        E = E_n + lam V_nn
        |psi> = |n> + lam sum_{m != n} V_mn / (E_n - E_m) |m>
    Order 2 adds to the energy
        lam^2 sum_{m != n} |V_mn|^2 / (E_n - E_m)
    and to the state the double-sum cross term, the diagonal cross term, and
    the normalization correction -1/2 lam^2 sum |V_mn|^2 / (E_n - E_m)^2 |n>.
    Here V_mn = <m|V|n> in the H0 eigenbasis and E are the unperturbed
    energies.  The returned state is expressed in the computational basis.

    Raises ValueError when the requested level is degenerate (gap below
    1e-8); degenerate perturbation theory is out of scope.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if h0.qubit_count != v.qubit_count:
        raise ValueError(f"qubit count mismatch: {h0.qubit_count} vs {v.qubit_count}")
    v.require_hermitian()
    spectrum = exact_diagonalize(h0)
    energies, basis = spectrum.energies, spectrum.states
    dim = energies.size
    if not 0 <= level < dim:
        raise ValueError(f"level {level} out of range for dimension {dim}")
    gaps = energies[level] - energies
    others = np.arange(dim) != level
    if np.min(np.abs(gaps[others])) <= DEGENERACY_THRESHOLD:
        raise ValueError(
            f"level {level} is degenerate within {DEGENERACY_THRESHOLD:g}; "
            "nondegenerate perturbation theory does not apply"
        )

    v_mat = basis.conj().T @ v.to_dense() @ basis
    v_col = v_mat[:, level]
    v_nn = float(v_col[level].real)

    # b_m = V_mn / (E_n - E_m) drives every correction below.
    b = np.zeros(dim, dtype=complex)
    b[others] = v_col[others] / gaps[others]

    energy = float(energies[level]) + lam * v_nn
    coeffs = np.zeros(dim, dtype=complex)
    coeffs[level] = 1.0
    coeffs = coeffs + lam * b
    if order == 2:
        energy += lam**2 * float(np.sum((np.abs(v_col[others]) ** 2) / gaps[others]).real)
        second = np.zeros(dim, dtype=complex)
        second[others] = (v_mat @ b)[others] / gaps[others] - v_nn * b[others] / gaps[others]
        second[level] = -0.5 * np.sum(np.abs(b) ** 2)
        coeffs = coeffs + lam**2 * second
    return energy, basis @ coeffs


def tdpt_integrate(
    h0_energies: Sequence[float],
    v: DriveSpec,
    c0: Sequence[complex],
    t_final: float,
    dt: float,
) -> CoefficientTrajectory:
    """Integrate the exact coupled coefficient equations in the H0 eigenbasis.

    The basis indexed by m is the eigenbasis of H0 with energies as given, and
    the drive operators are expressed in that same basis.  No perturbative
    truncation is applied, so this doubles as an exact-evolution oracle; the
    total population sum stays at 1 to integrator precision.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be nonnegative, got {t_final}")
    energies = np.asarray(h0_energies, dtype=float)
    c = np.asarray(c0, dtype=complex).ravel()
    if c.shape != energies.shape:
        raise ValueError(f"c0 has shape {c.shape}, expected {energies.shape}")
    norm = float(np.vdot(c, c).real)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"initial coefficients are not normalized: sum |c|^2 = {norm!r}")
    dim = energies.size
    dense_ops: list[np.ndarray] = []
    for term in v.terms:
        op = term.operator.to_dense()
        if op.shape != (dim, dim):
            raise ValueError(
                f"drive operator on {term.operator.qubit_count} qubits does not match {dim} levels"
            )
        dense_ops.append(op)
    omega_diff = energies[:, None] - energies[None, :]

    def derivative(t: float, coeffs: np.ndarray) -> np.ndarray:
        if not dense_ops:
            return np.zeros_like(coeffs)
        v_t = np.zeros((dim, dim), dtype=complex)
        for term, op in zip(v.terms, dense_ops):
            v_t += term.coefficient(t) * op
        kernel = v_t * np.exp(1j * omega_diff * t)
        return -1j * (kernel @ coeffs)

    times = [0.0]
    history = [c.copy()]
    t = 0.0
    eps = 1e-12 * max(1.0, t_final)
    while t < t_final - eps:
        step = min(dt, t_final - t)
        k1 = derivative(t, c)
        k2 = derivative(t + 0.5 * step, c + 0.5 * step * k1)
        k3 = derivative(t + 0.5 * step, c + 0.5 * step * k2)
        k4 = derivative(t + step, c + step * k3)
        c = c + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += step
        times.append(t)
        history.append(c.copy())
    return CoefficientTrajectory(np.asarray(times), np.asarray(history))


def rabi_analytic(delta: float, omega: float, omega21: float, t: float) -> tuple[float, float]:
    """Exact populations of a resonantly driven two-level system.

    For H0 = E1 |0><0| + E2 |1><1| with omega21 = E2 - E1 and the drive
    V(t) = delta e^{i omega t} |0><1| + h.c., starting from |0>:

        p2 = delta^2 / (delta^2 + (omega - omega21)^2 / 4) * sin^2(Omega t)
        Omega = sqrt(delta^2 + (omega - omega21)^2 / 4)
        p1 = 1 - p2

    Omega is the Rabi frequency; at resonance the transfer is complete and
    p2 = sin^2(delta t).
    """
    detuning = omega - omega21
    rabi_sq = delta**2 + 0.25 * detuning**2
    if rabi_sq == 0.0 or delta == 0.0:
        return 1.0, 0.0
    p2 = (delta**2 / rabi_sq) * math.sin(math.sqrt(rabi_sq) * t) ** 2
    return 1.0 - p2, p2
