"""Shared test utilities: seeded randomness and independent dense oracles."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from vardyn import Ansatz, PauliSum, PauliTerm

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"
CONFIG_DIR = REPO_ROOT / "configs"

# Independent single-qubit matrices (deliberately not imported from the package).
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_from_letters(letters: str) -> np.ndarray:
    """Kronecker chain with qubit 0 leftmost, built from scratch."""
    mat = PAULI[letters[0]]
    for c in letters[1:]:
        mat = np.kron(mat, PAULI[c])
    return mat


def dense_expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) through an eigendecomposition (oracle path)."""
    evals, evecs = np.linalg.eigh(h)
    return evecs @ np.diag(np.exp(-1j * t * evals)) @ evecs.conj().T


def random_letters(rng: np.random.Generator, n: int) -> str:
    return "".join(rng.choice(list("IXYZ")) for _ in range(n))


def random_term(rng: np.random.Generator, n: int, with_phase: bool = True) -> PauliTerm:
    phase = rng.choice([1, -1, 1j, -1j]) if with_phase else 1
    return PauliTerm(random_letters(rng, n), complex(phase))


def random_hermitian_sum(rng: np.random.Generator, n: int, n_terms: int) -> PauliSum:
    pairs = [(float(rng.uniform(-1, 1)), random_letters(rng, n)) for _ in range(n_terms)]
    return PauliSum.from_terms(pairs, qubit_count=n)


def random_state_array(rng: np.random.Generator, n: int) -> np.ndarray:
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return vec / np.linalg.norm(vec)


def random_params(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, count)


def finite_difference_derivative(ansatz: Ansatz, params, k: int, step: float = 1e-5) -> np.ndarray:
    """Central finite difference of prepare, the independent derivative oracle."""
    params = np.asarray(params, dtype=float)
    plus = params.copy()
    minus = params.copy()
    plus[k] += step
    minus[k] -= step
    return (ansatz.prepare(plus).amplitudes - ansatz.prepare(minus).amplitudes) / (2 * step)


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
