import numpy as np
import pytest

from matfunc.gates import Gate, gate_matrix
from matfunc.pauli import (PauliOperator, PauliString, all_strings, decompose_gate,
                           decompose_projector, embed, multiply, span_rank, string_apply,
                           string_entry, string_matrix, subgroup_closure, tensor, to_dense)
from matfunc.dense import dense_to_pauli

from conftest import random_pauli

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_word(word: str) -> np.ndarray:
    out = np.eye(1)
    for ch in word:
        out = np.kron(out, MATS[ch])
    return out


@pytest.mark.parametrize("word", ["X", "Y", "Z", "XY", "ZIY", "YYXZ", "IIII"])
def test_string_matrix_matches_kronecker(word):
    assert np.allclose(string_matrix(PauliString.from_word(word)), kron_word(word))


def test_word_round_trip_and_validation():
    s = PauliString.from_word("XYZI")
    assert s.word == "XYZI"
    with pytest.raises(ValueError):
        PauliString.from_word("XQ")
    with pytest.raises(ValueError):
        PauliString(2, 4, 0)


@pytest.mark.parametrize("a,b", [("X", "Y"), ("Y", "Z"), ("Z", "X"), ("XY", "YZ"), ("YYZ", "XZY")])
def test_multiply_matches_dense(a, b):
    ph, s = multiply(PauliString.from_word(a), PauliString.from_word(b))
    assert np.allclose(ph * string_matrix(s), kron_word(a) @ kron_word(b))


def test_single_qubit_products():
    ph, s = multiply(PauliString.from_word("X"), PauliString.from_word("Y"))
    assert s.word == "Z" and ph == 1j
    ph, s = multiply(PauliString.from_word("Y"), PauliString.from_word("X"))
    assert s.word == "Z" and ph == -1j


def test_string_entry_and_apply(rng):
    for s in all_strings(3):
        m = string_matrix(s)
        for j in range(8):
            rows, k = string_apply(np.array([s.x_bits]), np.array([s.z_bits]), np.array([j]))
            assert np.isclose(m[rows[0], j], 1j ** k[0])
            for i in range(8):
                assert np.isclose(string_entry(s, i, j), m[i, j])


def test_operator_arithmetic_matches_dense(rng):
    a = random_pauli(rng, 3, 5)
    b = random_pauli(rng, 3, 4)
    da, db = to_dense(a), to_dense(b)
    assert np.allclose(to_dense(a + b), da + db)
    assert np.allclose(to_dense(a - b), da - db)
    assert np.allclose(to_dense(a @ b), da @ db)
    assert np.allclose(to_dense(a.adjoint()), da.conj().T)
    assert np.allclose(to_dense(a.scale(2 - 1j)), (2 - 1j) * da)
    assert np.allclose(to_dense(tensor(a, b)), np.kron(da, db))
    assert a.is_hermitian()
    assert np.isclose(a.pauli_norm, np.sum(np.abs(a.coeffs)))


def test_entry_and_apply_basis(rng):
    a = random_pauli(rng, 3, 6)
    d = to_dense(a)
    for j in range(8):
        col = a.apply_basis(j)
        for i in range(8):
            assert np.isclose(a.entry(i, j), d[i, j])
            assert np.isclose(col.get(i, 0), d[i, j])


def test_json_round_trip_and_word_convention():
    op = PauliOperator.from_words([(0.5, "XYZ"), (-0.25j, "IZI")])
    obj = op.to_json()
    assert obj["n"] == 3
    assert {t["word"] for t in obj["terms"]} == {"XYZ", "IZI"}
    assert PauliOperator.from_json(obj) == op
    # leftmost character acts on qubit 0, the most significant bit
    assert np.allclose(to_dense(PauliOperator.from_words([(1.0, "XI")])), np.kron(X, I2))


@pytest.mark.parametrize("i,j,n", [(0, 0, 1), (1, 0, 1), (2, 1, 2), (5, 3, 3)])
def test_decompose_projector(i, j, n):
    ref = np.zeros((1 << n, 1 << n))
    ref[i, j] = 1
    op = decompose_projector(i, j, n)
    assert np.allclose(to_dense(op), ref)
    assert len(op) == 1 << n
    assert np.allclose(np.abs(op.coeffs), 2.0 ** -n)


@pytest.mark.parametrize("g", [Gate("H", (1,)), Gate("CNOT", (0, 2)), Gate("CNOT", (2, 1)),
                               Gate("TOFFOLI", (0, 1, 2)), Gate("TOFFOLI", (2, 0, 1)),
                               Gate("X", (0,)), Gate("Z", (2,))])
def test_decompose_gate_matches_gate_matrix(g):
    assert np.allclose(to_dense(decompose_gate(g, 3)), gate_matrix(g, 3))


def test_hadamard_decomposition_has_two_terms():
    op = decompose_gate(Gate("H", (0,)), 1)
    assert len(op) == 2
    assert np.isclose(op.pauli_norm, np.sqrt(2))


def test_embed_places_operator():
    local = PauliOperator.from_words([(1.0, "XZ")])
    assert np.allclose(to_dense(embed(local, [2, 0], 3)), kron_word("ZIX"))


def test_closure_size_is_two_to_the_rank(rng):
    for _ in range(20):
        n = int(rng.integers(1, 5))
        op = random_pauli(rng, n, int(rng.integers(1, min(6, 4 ** n) + 1)))
        strings = [PauliString(n, int(x), int(z)) for x, z in zip(op.xs, op.zs)]
        closure = subgroup_closure(strings, n)
        assert len(closure) == 2 ** span_rank(op.xs, op.zs, n)
        assert len(closure) <= 2 ** len(op)


def test_dense_to_pauli_round_trip(rng):
    a = random_pauli(rng, 3, 7)
    back = dense_to_pauli(to_dense(a))
    assert back.allclose(a)
    d = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    d = d + d.conj().T
    assert np.allclose(to_dense(dense_to_pauli(d)), d)
    proj = dense_to_pauli(np.diag([1.0, 0.0]))
    assert proj.allclose(PauliOperator.from_words([(0.5, "I"), (0.5, "Z")]))
