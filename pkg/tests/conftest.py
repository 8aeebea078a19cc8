"""Shared fixtures: random instances and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest

from matfunc.access import Metadata, PauliAccess, SparseOracle, SuperSparseMatrix
from matfunc.pauli import PauliOperator

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_sparse_hermitian(rng: np.random.Generator, N: int, s: int = 3, complex_: bool = True,
                            one_norm: float | None = 1.0) -> np.ndarray:
    """Hermitian matrix with at most ``s`` non-zeros per row, rescaled to a given 1-norm."""
    d = np.zeros((N, N), dtype=complex)
    for i in range(N):
        d[i, i] = rng.normal()
    pairs = max(1, (s - 1) * N // 2)
    for _ in range(pairs):
        i, j = rng.integers(0, N, size=2)
        if i == j:
            continue
        if np.count_nonzero(d[i]) >= s or np.count_nonzero(d[j]) >= s:
            continue
        v = rng.normal() + (1j * rng.normal() if complex_ else 0.0)
        d[i, j] = v
        d[j, i] = np.conj(v)
    if one_norm is not None:
        d *= one_norm / np.max(np.sum(np.abs(d), axis=0))
    return d


def sparse_oracle(d: np.ndarray, **meta) -> SparseOracle:
    s = int(max(np.count_nonzero(d, axis=0).max(), np.count_nonzero(d, axis=1).max()))
    m = dict(s=s, one_norm=float(np.max(np.sum(np.abs(d), axis=0))))
    m.update(meta)
    return SparseOracle.from_dense(d, Metadata(**m))


def supersparse_from_dense(d: np.ndarray, **meta) -> SuperSparseMatrix:
    ents = [(i, j, d[i, j]) for i, j in zip(*np.nonzero(d))]
    return SuperSparseMatrix(d.shape[0], tuple(ents), Metadata(**meta))


def random_pauli(rng: np.random.Generator, n: int, L: int, lam: float = 1.0) -> PauliOperator:
    """``L`` distinct random words with real coefficients of total weight ``lam``."""
    if L > 4 ** n:
        raise ValueError(f"only {4 ** n} distinct words on {n} qubits")
    words: list[str] = []
    while len(words) < L:
        w = "".join("IXYZ"[k] for k in rng.integers(0, 4, size=n))
        if w not in words:
            words.append(w)
    c = rng.normal(size=L)
    c = c / np.sum(np.abs(c)) * lam
    return PauliOperator.from_words(zip(c.tolist(), words))


def random_poly_coeffs(rng: np.random.Generator, degree: int, weight: float = 1.0,
                       complex_: bool = True) -> list[complex]:
    c = rng.normal(size=degree + 1) + (1j * rng.normal(size=degree + 1) if complex_ else 0.0)
    c[-1] = c[-1] if abs(c[-1]) > 0.1 else 0.5
    return (c / np.sum(np.abs(c)) * weight).tolist()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pauli_access():
    def make(op: PauliOperator, **meta) -> PauliAccess:
        return PauliAccess(op, meta=Metadata(**meta))
    return make


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
