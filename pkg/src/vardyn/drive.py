"""Time-dependent Hamiltonians H(t) = H0 + V(t).

The drive V(t) is a sum of Pauli terms, each modulated by a parametric
waveform: constant, cosine, or sine with an amplitude, frequency, and phase
offset.  A resonant two-level drive

    V(t) = d e^{i w t} |0><1| + d e^{-i w t} |1><0|

decomposes in this scheme as d cos(w t) X - d sin(w t) Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import DENSE_QUBIT_CAP, PauliSum, PauliTerm

__all__ = [
    "WAVEFORMS",
    "DriveTerm",
    "DriveSpec",
    "TimeDependentHamiltonian",
    "as_time_dependent",
]

WAVEFORMS = ("constant", "cosine", "sine")


@dataclass(frozen=True)
class DriveTerm:
    """One waveform-modulated Pauli operator of a drive.

    The instantaneous coefficient is
      constant: amplitude
      cosine:   amplitude * cos(frequency * t + phase_offset)
      sine:     amplitude * sin(frequency * t + phase_offset)

    The operator phase must be +1 or -1 so that a real amplitude keeps the
    drive Hermitian at every time.
    """

    waveform: str
    amplitude: float
    operator: PauliTerm
    frequency: float = 0.0
    phase_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.waveform not in WAVEFORMS:
            raise ValueError(f"unknown waveform {self.waveform!r}; expected one of {WAVEFORMS}")
        for name in ("amplitude", "frequency", "phase_offset"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"drive {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.operator.phase not in (1 + 0j, -1 + 0j):
            raise ValueError(
                f"drive operator phase must be +1 or -1 for Hermiticity, got {self.operator.phase}"
            )

    def coefficient(self, t: float) -> float:
        if self.waveform == "constant":
            return self.amplitude
        arg = self.frequency * t + self.phase_offset
        if self.waveform == "cosine":
            return self.amplitude * math.cos(arg)
        return self.amplitude * math.sin(arg)


@dataclass(frozen=True)
class DriveSpec:
    """An ordered collection of drive terms; empty means no drive."""

    terms: tuple[DriveTerm, ...] = ()

    def __post_init__(self) -> None:
        counts = {term.operator.qubit_count for term in self.terms}
        if len(counts) > 1:
            raise ValueError(f"drive terms act on differing qubit counts: {sorted(counts)}")

    @property
    def qubit_count(self) -> int | None:
        return self.terms[0].operator.qubit_count if self.terms else None

    def pauli_sum_at(self, t: float, qubit_count: int | None = None) -> PauliSum:
        """The drive operator at time t as a canonical PauliSum."""
        n = self.qubit_count or qubit_count
        if n is None:
            raise ValueError("empty drive needs an explicit qubit count")
        return PauliSum.from_terms(
            ((term.coefficient(t), term.operator) for term in self.terms), qubit_count=n
        )


class TimeDependentHamiltonian:
    """H(t) = static + drive(t), with cached dense pieces for propagation."""

    def __init__(self, static: PauliSum, drive: DriveSpec | None = None):
        drive = drive if drive is not None else DriveSpec()
        if drive.qubit_count is not None and drive.qubit_count != static.qubit_count:
            raise ValueError(
                f"drive acts on {drive.qubit_count} qubits but the static part on {static.qubit_count}"
            )
        static.require_hermitian()
        self.static = static
        self.drive = drive
        self._static_dense: np.ndarray | None = None
        self._term_dense: list[np.ndarray] | None = None

    @property
    def qubit_count(self) -> int:
        return self.static.qubit_count

    @property
    def is_static(self) -> bool:
        return not self.drive.terms

    def at(self, t: float) -> PauliSum:
        """The instantaneous Hamiltonian as a canonical PauliSum."""
        if self.is_static:
            return self.static
        pairs = list(self.static.terms) + [
            (term.coefficient(t) * term.operator.phase, term.operator.letters)
            for term in self.drive.terms
        ]
        return PauliSum(self.qubit_count, tuple(pairs))

    def dense_at(self, t: float, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        if self._static_dense is None:
            self._static_dense = self.static.to_dense(cap)
            self._term_dense = [term.operator.to_dense(cap) for term in self.drive.terms]
        mat = self._static_dense
        if self.is_static:
            return mat
        mat = mat.copy()
        assert self._term_dense is not None
        for term, dense in zip(self.drive.terms, self._term_dense):
            mat += term.coefficient(t) * dense
        return mat

    def __repr__(self) -> str:
        return f"TimeDependentHamiltonian(static={self.static!s}, drive_terms={len(self.drive.terms)})"


def as_time_dependent(h: "PauliSum | TimeDependentHamiltonian") -> TimeDependentHamiltonian:
    """Coerce a static PauliSum into the time-dependent wrapper."""
    if isinstance(h, TimeDependentHamiltonian):
        return h
    return TimeDependentHamiltonian(h)
