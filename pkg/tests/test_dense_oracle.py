import numpy as np
import pytest
import scipy.linalg as sla

from matfunc import dense
from matfunc.projector import Projector

from conftest import random_sparse_hermitian


def herm(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_eig_diagonal_and_two_by_two():
    e = dense.eig_hermitian(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(e.eigenvalues, [-1.0, 2.0, 3.0])
    half_x = np.array([[0, 0.5], [0.5, 0]])
    assert np.allclose(dense.eig_hermitian(half_x).eigenvalues, [-0.5, 0.5])


def test_eig_residuals_random_64(rng):
    a = herm(rng, 64)
    e = dense.eig_hermitian(a)
    v, lam = e.eigenvectors, e.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    assert np.linalg.norm(a @ v - v * lam) <= 1e-10 * np.linalg.norm(a, 2) * 64
    assert np.allclose(v.conj().T @ v, np.eye(64), atol=1e-10)
    assert np.allclose(lam, sla.eigvalsh(a), atol=1e-10)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        dense.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_apply_function_identities(rng):
    a = herm(rng, 10)
    assert np.allclose(dense.apply_function(a, lambda x: x), a, atol=1e-10)
    assert np.allclose(dense.apply_function(a, lambda x: x ** 2), a @ a, atol=1e-10)
    u = dense.apply_function(a, lambda x: np.exp(1j * 0.7 * x))
    assert np.allclose(u.conj().T @ u, np.eye(10), atol=1e-9)
    assert np.allclose(u, sla.expm(0.7j * a), atol=1e-9)


def test_trace_conservation_and_monomials(rng):
    a = herm(rng, 12)
    a /= np.linalg.norm(a, 2)
    lam = sla.eigvalsh(a)
    for f in (np.cos, lambda x: x ** 3, lambda x: np.exp(2j * x)):
        assert np.isclose(np.trace(dense.apply_function(a, f)), np.sum(f(lam)), atol=1e-9)
    for m in (1, 5, 17, 32):
        assert np.allclose(dense.apply_function(a, lambda x: x ** m),
                           np.linalg.matrix_power(a, m), atol=1e-8)


def test_inverse_and_near_singular(rng):
    a = herm(rng, 8) + 6 * np.eye(8)
    inv = dense.apply_function(a, lambda x: 1 / x)
    assert np.linalg.norm(inv @ a - np.eye(8)) <= 1e-8 * np.linalg.cond(a)
    with pytest.raises(ValueError):
        dense.apply_function(np.diag([1.0, 0.0]), lambda x: 1 / x)


def test_targets():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    proj = Projector.first_half()
    assert dense.exact_lm(a, lambda x: np.ones_like(x), 0, proj) == pytest.approx(1.0)
    assert dense.exact_lm(a, lambda x: np.ones_like(x), 1, proj) == pytest.approx(0.0)
    # X|0> = |1>: all weight outside the first half
    assert dense.exact_lm(a, lambda x: x, 0, proj) == pytest.approx(0.0)
    assert dense.exact_normalized_lm(a, lambda x: x, 1, proj) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        dense.exact_normalized_lm(a, lambda x: 0 * x, 0, proj)
    assert dense.exact_entry(a, lambda x: x, 1, 0) == pytest.approx(1.0)


def test_offdiag_via_diag(rng):
    a = herm(rng, 4)
    for i in range(4):
        for j in range(4):
            assert abs(dense.offdiag_via_diag_check(a, i, j) - a[i, j]) <= 1e-12
    r = random_sparse_hermitian(rng, 6, 3, complex_=False)
    assert dense.offdiag_via_diag_check(r, 0, 1).imag == pytest.approx(0.0, abs=1e-14)


def test_norms(rng):
    a = herm(rng, 6)
    assert np.isclose(dense.operator_norm(a), np.linalg.norm(a, 2))
    b = a + 10 * np.eye(6)
    assert np.isclose(dense.condition_number(b), np.linalg.cond(b))


def test_dense_cap(monkeypatch):
    from matfunc.config import CapExceeded

    monkeypatch.setenv("MATFUNC_DENSE_CAP", "4")
    with pytest.raises(CapExceeded):
        dense.eig_hermitian(np.eye(8))
