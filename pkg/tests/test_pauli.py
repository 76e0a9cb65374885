"""Pauli term/sum algebra against dense-matrix oracles."""

import numpy as np
import pytest

from vardyn import PauliSum, PauliTerm, identity, multiply
from vardyn.pauli import PAULI_PHASES

from helpers import dense_from_letters, random_letters, random_term


def term_dense(term: PauliTerm) -> np.ndarray:
    return term.phase * dense_from_letters(term.letters)


def test_multiply_single_qubit_examples():
    assert multiply(PauliTerm("XI"), PauliTerm("YI")) == PauliTerm("ZI", 1j)
    assert multiply(PauliTerm("ZZ"), PauliTerm("ZZ")) == PauliTerm("II", 1)


def test_multiply_two_qubit_dense_oracle():
    a, b = PauliTerm("YX"), PauliTerm("XX")
    product = multiply(a, b)
    assert product == PauliTerm("ZI", -1j)
    oracle = term_dense(a) @ term_dense(b)
    assert np.max(np.abs(term_dense(product) - oracle)) < 1e-14


def test_multiply_all_single_qubit_pairs_match_dense():
    for la in "IXYZ":
        for lb in "IXYZ":
            for phase in PAULI_PHASES:
                a, b = PauliTerm(la, phase), PauliTerm(lb)
                got = term_dense(multiply(a, b))
                want = term_dense(a) @ term_dense(b)
                assert np.max(np.abs(got - want)) < 1e-14


def test_multiply_random_pairs_match_dense():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        a, b = random_term(rng, n), random_term(rng, n)
        got = term_dense(multiply(a, b))
        want = term_dense(a) @ term_dense(b)
        assert np.max(np.abs(got - want)) < 1e-14


def test_multiply_associative_symbolically():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        a, b, c = (random_term(rng, n) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_multiply_qubit_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        multiply(PauliTerm("X"), PauliTerm("XX"))


def test_term_validation():
    with pytest.raises(ValueError):
        PauliTerm("XQ")
    with pytest.raises(ValueError):
        PauliTerm("")
    with pytest.raises(ValueError):
        PauliTerm("X", 0.5)
    assert identity(3).letters == "III"
    assert identity(2).is_identity()


def test_sum_canonicalization_merges_sorts_prunes():
    s = PauliSum(1, ((1.0, "X"), (0.5, "Z"), (2.0, "X"), (1e-15, "Y")))
    assert s.terms == ((0.5 + 0j, "Z"), (3.0 + 0j, "X")) or s.terms == ((3.0 + 0j, "X"), (0.5 + 0j, "Z"))
    # sorted by letters
    assert [l for _, l in s.terms] == sorted(l for _, l in s.terms)


def test_sum_canonicalization_idempotent():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        pairs = tuple(
            (complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), random_letters(rng, n))
            for _ in range(6)
        )
        once = PauliSum(n, pairs)
        twice = PauliSum(n, once.terms)
        assert once == twice


def test_from_terms_folds_phases():
    s = PauliSum.from_terms([(2.0, PauliTerm("X", -1j))])
    assert s.terms == ((-2j, "X"),)


def test_add_scaled_examples():
    x = PauliSum.from_terms([(1.0, "X")])
    z = PauliSum.from_terms([(1.0, "Z")])
    assert len(x.add_scaled(-1, x)) == 0
    combined = z.add_scaled(2, x)
    assert combined.coefficient("Z") == 1 and combined.coefficient("X") == 2


def test_add_scaled_rebuilds_full_hamiltonian_from_split():
    from vardyn.experiments import build_h2_hamiltonian, h2_split

    g = np.array([-0.55, 0.25, -0.25, 0.08, 0.1, 0.1])
    h0, hp = h2_split(g)
    assert h0.add_scaled(1.0, hp) == build_h2_hamiltonian(g)


def test_add_scaled_qubit_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        PauliSum.from_terms([(1.0, "X")]).add_scaled(1, PauliSum.from_terms([(1.0, "XX")]))


def test_to_dense_examples():
    zz = PauliSum.from_terms([(1.0, "ZZ")])
    assert np.allclose(zz.to_dense(), np.diag([1, -1, -1, 1]), atol=1e-15)
    assert np.allclose(PauliSum.zero(2).to_dense(), np.zeros((4, 4)), atol=0)
    diag = PauliSum.from_terms([(0.5, "II"), (0.25, "ZI")])
    assert np.allclose(diag.to_dense(), np.diag([0.75, 0.75, 0.25, 0.25]), atol=1e-15)


def test_to_dense_matches_independent_kron():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        pairs = [(complex(rng.uniform(-1, 1)), random_letters(rng, n)) for _ in range(4)]
        s = PauliSum(n, tuple(pairs))
        oracle = sum(c * dense_from_letters(l) for c, l in s.terms) if len(s) else np.zeros((2**n, 2**n))
        assert np.max(np.abs(s.to_dense() - oracle)) < 1e-14


def test_hermitian_sum_dense_is_hermitian():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        pairs = [(float(rng.uniform(-1, 1)), random_letters(rng, n)) for _ in range(5)]
        dense = PauliSum(n, tuple(pairs)).to_dense()
        assert np.max(np.abs(dense - dense.conj().T)) < 1e-14


def test_hermiticity_check():
    assert PauliSum.from_terms([(0.5, "X")]).is_hermitian()
    bad = PauliSum.from_terms([(0.5j, "X")])
    assert not bad.is_hermitian()
    with pytest.raises(ValueError, match="Hermitian"):
        bad.require_hermitian()


def test_dense_cap():
    with pytest.raises(ValueError, match="cap"):
        PauliSum.from_terms([(1.0, "I" * 11)]).to_dense()
    with pytest.raises(ValueError, match="cap"):
        PauliTerm("I" * 4).to_dense(cap=3)


def test_text_round_trip():
    s = PauliSum.from_terms([(0.5, "ZZ"), (-0.25 + 0j, "XI")])
    text = s.to_text()
    assert "0.5 0 ZZ" in text or "0.5 0.0 ZZ" in text.replace("0 Z", "0.0 Z")
    assert PauliSum.from_text(text) == s
    with_comments = "# a Hamiltonian\n" + text + "\n\n"
    assert PauliSum.from_text(with_comments) == s


def test_from_text_errors():
    with pytest.raises(ValueError):
        PauliSum.from_text("0.5 ZZ")
    with pytest.raises(ValueError):
        PauliSum.from_text("x y ZZ")
    with pytest.raises(ValueError):
        PauliSum.from_text("")
    assert len(PauliSum.from_text("", qubit_count=2)) == 0
