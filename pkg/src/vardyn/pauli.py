"""Multi-qubit Pauli strings and their weighted sums.

A Pauli string is a tensor product of single-qubit operators from {I, X, Y, Z}
together with a phase from the Pauli group, {+1, -1, +i, -i}.  Weighted sums of
phase-free strings represent operators such as Hamiltonians,

    H = sum_j c_j P_j,

which are Hermitian exactly when every c_j is real.  Qubit 0 is the leftmost
tensor factor everywhere in this package, so ``ZI`` acts with Z on qubit 0 and
``basis index = int(bitstring, 2)`` with qubit 0 as the most significant bit.

All values are immutable after construction and all operations are pure, so
terms and sums can be shared freely between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "PAULI_LETTERS",
    "PAULI_PHASES",
    "PAULI_MATRICES",
    "DENSE_QUBIT_CAP",
    "COEFF_PRUNE_THRESHOLD",
    "PauliTerm",
    "PauliSum",
    "identity",
    "multiply",
]

PAULI_LETTERS = "IXYZ"

#: The four phases of the Pauli group.
PAULI_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)

#: Largest qubit count for which dense matrices may be materialized.
DENSE_QUBIT_CAP = 10

#: Coefficients with magnitude below this are dropped during canonicalization.
COEFF_PRUNE_THRESHOLD = 1e-12

#: Maximum |Im c| for a sum to count as Hermitian.
HERMITIAN_TOLERANCE = 1e-12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Single-qubit products a*b -> (phase, letter), e.g. XY = iZ, YX = -iZ.
_SINGLE_PRODUCT = {
    ("I", "I"): (1, "I"),
    ("I", "X"): (1, "X"),
    ("I", "Y"): (1, "Y"),
    ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"),
    ("X", "X"): (1, "I"),
    ("X", "Y"): (1j, "Z"),
    ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Y"): (1, "I"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"),
    ("Z", "X"): (1j, "Y"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "Z"): (1, "I"),
}

_PHASE_LABEL = {1 + 0j: "+1", -1 + 0j: "-1", 1j: "+i", -1j: "-i"}


def _check_letters(letters: str, qubit_count: int | None = None) -> None:
    if not letters or any(c not in PAULI_LETTERS for c in letters):
        raise ValueError(f"invalid Pauli letters {letters!r}; expected a nonempty string over I, X, Y, Z")
    if qubit_count is not None and len(letters) != qubit_count:
        raise ValueError(f"Pauli letters {letters!r} act on {len(letters)} qubits, expected {qubit_count}")


def _kron_chain(letters: str) -> np.ndarray:
    mat = PAULI_MATRICES[letters[0]]
    for c in letters[1:]:
        mat = np.kron(mat, PAULI_MATRICES[c])
    return mat


def _check_dense_cap(qubit_count: int, cap: int) -> None:
    if qubit_count > cap:
        raise ValueError(f"refusing dense matrix for {qubit_count} qubits (cap is {cap})")


@dataclass(frozen=True)
class PauliTerm:
    """A single Pauli string with a group phase.

    ``PauliTerm("XY", 1j)`` is the operator +i (X tensor Y).  The phase must be
    one of the four Pauli-group phases; arbitrary scalar weights belong in a
    :class:`PauliSum` coefficient instead.
    """

    letters: str
    phase: complex = 1 + 0j

    def __post_init__(self) -> None:
        _check_letters(self.letters)
        phase = complex(self.phase)
        if phase not in PAULI_PHASES:
            raise ValueError(f"phase {self.phase!r} is not one of +1, -1, +i, -i")
        object.__setattr__(self, "phase", phase)

    @property
    def qubit_count(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        """True when every letter is I (the phase is ignored)."""
        return set(self.letters) == {"I"}

    def with_phase(self, phase: complex) -> "PauliTerm":
        return PauliTerm(self.letters, phase)

    def to_dense(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Dense matrix, qubit 0 as the leftmost Kronecker factor."""
        _check_dense_cap(self.qubit_count, cap)
        return self.phase * _kron_chain(self.letters)

    def __str__(self) -> str:
        return f"{_PHASE_LABEL[self.phase]}*{self.letters}"


def identity(qubit_count: int) -> PauliTerm:
    """The identity string on ``qubit_count`` qubits."""
    return PauliTerm("I" * qubit_count)


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product a*b as a single Pauli term with accumulated phase.

    Example: multiply(X0, Y0) = +i Z0, since XY = iZ on each qubit.
    """
    if a.qubit_count != b.qubit_count:
        raise ValueError(f"qubit count mismatch: {a.qubit_count} vs {b.qubit_count}")
    phase = a.phase * b.phase
    letters = []
    for ca, cb in zip(a.letters, b.letters):
        factor, letter = _SINGLE_PRODUCT[(ca, cb)]
        phase *= factor
        letters.append(letter)
    return PauliTerm("".join(letters), phase)


@dataclass(frozen=True)
class PauliSum:
    """Canonical weighted sum of phase-free Pauli strings.

    Terms are stored merged (no two entries share a letter sequence), sorted by
    letters, and pruned of coefficients below ``COEFF_PRUNE_THRESHOLD``, so two
    sums representing the same operator compare equal.  Phases of constituent
    terms are folded into the coefficients by the constructors.

    The empty sum is the zero operator.
    """

    qubit_count: int
    terms: tuple[tuple[complex, str], ...] = ()

    def __post_init__(self) -> None:
        if self.qubit_count < 1:
            raise ValueError(f"qubit_count must be positive, got {self.qubit_count}")
        merged: dict[str, complex] = {}
        for coeff, letters in self.terms:
            _check_letters(letters, self.qubit_count)
            merged[letters] = merged.get(letters, 0j) + complex(coeff)
        canonical = tuple(
            (c, letters)
            for letters, c in sorted(merged.items())
            if abs(c) >= COEFF_PRUNE_THRESHOLD
        )
        object.__setattr__(self, "terms", canonical)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, qubit_count: int) -> "PauliSum":
        return cls(qubit_count, ())

    @classmethod
    def from_terms(
        cls,
        items: Iterable[tuple[complex, "PauliTerm | str"]],
        qubit_count: int | None = None,
    ) -> "PauliSum":
        """Build a sum from (coefficient, term) pairs, folding term phases.

        ``items`` may mix :class:`PauliTerm` values and bare letter strings.
        """
        pairs: list[tuple[complex, str]] = []
        for coeff, term in items:
            if isinstance(term, PauliTerm):
                pairs.append((complex(coeff) * term.phase, term.letters))
            else:
                pairs.append((complex(coeff), term))
        if qubit_count is None:
            if not pairs:
                raise ValueError("cannot infer qubit count from an empty term list")
            qubit_count = len(pairs[0][1])
        return cls(qubit_count, tuple(pairs))

    @classmethod
    def from_text(cls, text: str, qubit_count: int | None = None) -> "PauliSum":
        """Parse the line format ``<coeff_real> <coeff_imag> <letters>``.

        Blank lines and ``#`` comments are skipped.
        """
        pairs: list[tuple[complex, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected '<coeff_real> <coeff_imag> <letters>', got {raw!r}")
            try:
                re_part, im_part = float(fields[0]), float(fields[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad coefficient in {raw!r}") from exc
            pairs.append((complex(re_part, im_part), fields[2]))
        if not pairs:
            if qubit_count is None:
                raise ValueError("empty operator text and no qubit count given")
            return cls.zero(qubit_count)
        return cls.from_terms(pairs, qubit_count)

    # -- inspection ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def pauli_terms(self) -> Iterator[tuple[complex, PauliTerm]]:
        """Yield (coefficient, phase-free PauliTerm) pairs."""
        for coeff, letters in self.terms:
            yield coeff, PauliTerm(letters)

    def coefficient(self, letters: str) -> complex:
        for c, l in self.terms:
            if l == letters:
                return c
        return 0j

    def is_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> bool:
        return all(abs(c.imag) <= tol for c, _ in self.terms)

    def require_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> None:
        for c, letters in self.terms:
            if abs(c.imag) > tol:
                raise ValueError(f"operator is not Hermitian: term {letters} has coefficient {c}")

    # -- arithmetic ---------------------------------------------------------

    def add_scaled(self, scale: complex, other: "PauliSum") -> "PauliSum":
        """Canonical merged sum ``self + scale * other``."""
        if other.qubit_count != self.qubit_count:
            raise ValueError(f"qubit count mismatch: {self.qubit_count} vs {other.qubit_count}")
        extra = tuple((complex(scale) * c, letters) for c, letters in other.terms)
        return PauliSum(self.qubit_count, self.terms + extra)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return self.add_scaled(1, other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self.add_scaled(-1, other)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.qubit_count, tuple((complex(scalar) * c, l) for c, l in self.terms))

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1

    # -- dense / text bridges -----------------------------------------------

    def to_dense(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Dense 2^n x 2^n matrix; Hermitian when all coefficients are real."""
        _check_dense_cap(self.qubit_count, cap)
        dim = 1 << self.qubit_count
        mat = np.zeros((dim, dim), dtype=complex)
        for coeff, letters in self.terms:
            mat += coeff * _kron_chain(letters)
        return mat

    def to_text(self) -> str:
        """Serialize as one ``<coeff_real> <coeff_imag> <letters>`` line per term."""
        return "\n".join(
            f"{c.real:.17g} {c.imag:.17g} {letters}" for c, letters in self.terms
        )

    def __str__(self) -> str:
        if not self.terms:
            return f"0 (on {self.qubit_count} qubits)"
        return " + ".join(f"({c.real:+g}{c.imag:+g}j)*{l}" for c, l in self.terms)
