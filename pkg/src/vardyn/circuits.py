"""Ancilla-based Hadamard-test evaluation of the M/V matrix elements.

Every entry of the variational linear system is a real or imaginary part of
an overlap <ref| W |ref> where W is a product of ansatz gates, their adjoints,
generator Pauli strings, and Hamiltonian Pauli strings.  Such overlaps are
measurable with one ancilla: prepare the ancilla with a Hadamard (plus S^dag
for the imaginary part), run a sequence of gates where some are controlled on
the ancilla, close with a Hadamard, and read <Z> on the ancilla.  With A the
product of the uncontrolled gates and B the product of all gates,

    <Z> = Re <ref| A^dag B |ref>        (real part)
    <Z> = Im <ref| A^dag B |ref>        (imaginary part, with S^dag).

The simulation here is exact (infinite-shot limit): the joint ancilla+system
state is tracked as two system-sized branches and the expectation is read off
without sampling.  The estimator must agree entrywise with the direct
assembly in :mod:`vardyn.ansatz`; that backend equivalence is a tested
contract, not an accident.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ansatz import Ansatz, MVSystem
from .pauli import PauliSum, PauliTerm, identity
from .states import StateVector, apply_pauli_array, exp_pauli_array

__all__ = [
    "PauliGate",
    "RotationGate",
    "ControlledSequence",
    "hadamard_test",
    "estimate_mv_circuit",
    "estimate_gradient_circuit",
]

PARTS = ("real", "imaginary")


@dataclass(frozen=True)
class PauliGate:
    """A bare Pauli string applied as a gate (phases stay observable)."""

    term: PauliTerm


@dataclass(frozen=True)
class RotationGate:
    """exp(-i angle G) for sign minus_i, exp(+i angle G) for plus_i."""

    generator: PauliSum
    angle: float
    sign: str = "minus_i"


@dataclass(frozen=True)
class ControlledSequence:
    """An ordered gate list over the system qubits plus one implied ancilla.

    Each entry is (gate, controlled); controlled gates act only on the branch
    where the ancilla is |1>.  ``part`` selects whether the closing ancilla
    measurement reads the real or the imaginary part of the overlap.
    """

    system_qubits: int
    operations: tuple[tuple["PauliGate | RotationGate", bool], ...]
    part: str = "real"

    def __post_init__(self) -> None:
        if self.part not in PARTS:
            raise ValueError(f"part must be one of {PARTS}, got {self.part!r}")
        for op, _ in self.operations:
            count = op.term.qubit_count if isinstance(op, PauliGate) else op.generator.qubit_count
            if count != self.system_qubits:
                raise ValueError(f"gate acts on {count} qubits, sequence declares {self.system_qubits}")


def _apply_op(op: "PauliGate | RotationGate", vec: np.ndarray) -> np.ndarray:
    if isinstance(op, PauliGate):
        return apply_pauli_array(op.term, vec)
    signed = op.angle if op.sign == "minus_i" else -op.angle
    return exp_pauli_array(op.generator, signed, vec)


def hadamard_test(sequence: ControlledSequence, reference: StateVector) -> float:
    """Exact ancilla <Z> after the Hadamard-test circuit on ``reference``.

    The ancilla starts in |0>, gets a Hadamard (and S^dag when part is
    imaginary), the sequence runs with its controlled gates conditioned on the
    ancilla, a closing Hadamard is applied, and the exact Z expectation of the
    ancilla is returned.  The result always lies in [-1, 1].
    """
    if reference.qubit_count != sequence.system_qubits:
        raise ValueError(
            f"reference has {reference.qubit_count} qubits, sequence declares {sequence.system_qubits}"
        )
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    branch0 = inv_sqrt2 * reference.amplitudes
    branch1 = branch0.copy()
    if sequence.part == "imaginary":
        branch1 = -1j * branch1
    for op, controlled in sequence.operations:
        branch1 = _apply_op(op, branch1)
        if not controlled:
            branch0 = _apply_op(op, branch0)
    out0 = inv_sqrt2 * (branch0 + branch1)
    out1 = inv_sqrt2 * (branch0 - branch1)
    return float(np.vdot(out0, out0).real - np.vdot(out1, out1).real)


@dataclass(frozen=True)
class _Slot:
    """Where a parameter's generator insertion sits in the gate chain.

    ``position`` counts how many ansatz gates are applied before the inserted
    Pauli; the global-phase parameter is a virtual slot at position 0 with the
    identity string as its single generator term.
    """

    position: int
    terms: tuple[tuple[float, PauliTerm], ...]
    factor: complex  # -i for minus_i gates and the global phase, +i for plus_i


def _slots(ansatz: Ansatz) -> list[_Slot]:
    slots: list[_Slot] = []
    if ansatz.global_phase_param:
        slots.append(_Slot(0, ((1.0, identity(ansatz.qubit_count)),), -1j))
    for g, gate in enumerate(ansatz.gates):
        terms = tuple((coeff.real, term) for coeff, term in gate.generator.pauli_terms())
        slots.append(_Slot(g + 1, terms, gate.derivative_factor))
    return slots


def _uncontrolled(ansatz: Ansatz, angles: np.ndarray, start: int, stop: int) -> list:
    return [
        (RotationGate(ansatz.gates[j].generator, float(angles[j]), ansatz.gates[j].sign), False)
        for j in range(start, stop)
    ]


def _estimate(
    ansatz: Ansatz,
    params,
    hamiltonian: PauliSum,
    part: str,
    dump_path: "Path | str | None",
) -> tuple[np.ndarray, np.ndarray]:
    """Shared M plus per-parameter Hamiltonian-coupling vector via circuits.

    With part = "real" the vector is V_k = Im <d_k phi|H|phi>; with
    part = "imaginary" it is C_k = Re <d_k phi|H|phi>.  Both use the same
    sequences; only the ancilla phase gate and the weights differ.
    """
    hamiltonian.require_hermitian()
    if hamiltonian.qubit_count != ansatz.qubit_count:
        raise ValueError(
            f"Hamiltonian acts on {hamiltonian.qubit_count} qubits, ansatz on {ansatz.qubit_count}"
        )
    _, angles = ansatz.split_params(params)
    slots = _slots(ansatz)
    n_gates = len(ansatz.gates)
    p = len(slots)
    m = np.zeros((p, p))
    w = np.zeros(p)
    dump: list[tuple[str, float, ControlledSequence]] | None = [] if dump_path is not None else None

    for k in range(p):
        pos_k = slots[k].position
        for i in range(k, p):
            pos_i = slots[i].position
            sign = 1.0 if slots[k].factor == slots[i].factor else -1.0
            total = 0.0
            for s_a, sigma_a in slots[k].terms:
                for s_b, sigma_b in slots[i].terms:
                    ops = (
                        _uncontrolled(ansatz, angles, 0, pos_k)
                        + [(PauliGate(sigma_a), True)]
                        + _uncontrolled(ansatz, angles, pos_k, pos_i)
                        + [(PauliGate(sigma_b), True)]
                    )
                    seq = ControlledSequence(ansatz.qubit_count, tuple(ops), "real")
                    value = hadamard_test(seq, ansatz.reference)
                    total += sign * s_a * s_b * value
                    if dump is not None:
                        dump.append((f"M[{k},{i}]", sign * s_a * s_b, seq))
            m[k, i] = m[i, k] = total

        coupling_sign = 1.0 if slots[k].factor == -1j else -1.0
        total = 0.0
        for s_a, sigma_a in slots[k].terms:
            for c_j, h_term in hamiltonian.pauli_terms():
                ops = (
                    _uncontrolled(ansatz, angles, 0, pos_k)
                    + [(PauliGate(sigma_a), True)]
                    + _uncontrolled(ansatz, angles, pos_k, n_gates)
                    + [(PauliGate(h_term), True)]
                )
                seq = ControlledSequence(ansatz.qubit_count, tuple(ops), part)
                value = hadamard_test(seq, ansatz.reference)
                total += coupling_sign * s_a * c_j.real * value
                if dump is not None:
                    name = "V" if part == "real" else "C"
                    dump.append((f"{name}[{k}]", coupling_sign * s_a * c_j.real, seq))
        w[k] = total

    if dump_path is not None and dump is not None:
        _write_dump(Path(dump_path), ansatz.qubit_count, dump)
    return m, w


def estimate_mv_circuit(
    ansatz: Ansatz,
    params,
    hamiltonian: PauliSum,
    *,
    dump_path: "Path | str | None" = None,
) -> MVSystem:
    """Assemble M and V exclusively from Hadamard-test circuits.

    One circuit per (k, i) generator-term pair for M and one per (k, j)
    generator/Hamiltonian-term pair for V, combined with the gate sign
    conventions and coefficients.  Multi-term generators expand linearly over
    their terms.  The result matches the direct assembly entrywise to
    numerical precision.
    """
    m, v = _estimate(ansatz, params, hamiltonian, "real", dump_path)
    return MVSystem(m, v)


def estimate_gradient_circuit(
    ansatz: Ansatz,
    params,
    hamiltonian: PauliSum,
    *,
    dump_path: "Path | str | None" = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Circuit-backed analogue of :func:`vardyn.ansatz.assemble_gradient`.

    Uses imaginary-part Hadamard tests for C_k = Re <d_k phi|H|phi>, which
    drives imaginary-time ground-state descent on the circuit backend.
    """
    return _estimate(ansatz, params, hamiltonian, "imaginary", dump_path)


def _describe(op: "PauliGate | RotationGate", controlled: bool) -> str:
    if isinstance(op, PauliGate):
        targets = [str(q) for q, c in enumerate(op.term.letters) if c != "I"]
        name = f"PAULI {op.term.letters} phase={op.term.phase}"
    else:
        letters = [l for _, l in op.generator.terms]
        active = sorted({q for l in letters for q, c in enumerate(l) if c != "I"})
        targets = [str(q) for q in active]
        gen = " + ".join(f"{c.real:.17g} {l}" for c, l in op.generator.terms)
        tag = "-i" if op.sign == "minus_i" else "+i"
        name = f"EXP({tag}) angle={op.angle:.17g} generator=[{gen}]"
    joined = ",".join(targets) if targets else "none"
    return f"{name} controlled={'yes' if controlled else 'no'} targets={joined}"


def _write_dump(path: Path, system_qubits: int, records: list) -> None:
    lines = [f"# Hadamard-test circuits for one M/V assembly on {system_qubits} system qubits + 1 ancilla"]
    for index, (element, weight, seq) in enumerate(records):
        lines.append(f"circuit {index}: element={element} weight={weight:.17g} part={seq.part}")
        lines.append("  H ancilla")
        if seq.part == "imaginary":
            lines.append("  SDG ancilla")
        for op, controlled in seq.operations:
            lines.append("  " + _describe(op, controlled))
        lines.append("  H ancilla")
        lines.append("  measure <Z> ancilla")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
