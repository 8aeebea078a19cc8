"""Brute-force dense ground truth.

Everything here works on explicit ``N x N`` arrays: a cyclic Jacobi eigensolver
for Hermitian matrices, matrix functions through the eigendecomposition, the
two target quantities (entries and local measurements) and a few identities
used to cross-check the estimators.  The module is independent of the
estimators on purpose; it never calls into them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .config import CapExceeded, dense_cap
from .pauli import PauliOperator
from .projector import Projector

ScalarFn = Callable[[np.ndarray], np.ndarray]

# small FIFO cache: oracles often apply several functions to one matrix
_CACHE: dict = {}
_CACHE_SIZE = 8


@dataclass(frozen=True)
class EigenDecomposition:
    """``A = V diag(w) V^dagger`` with ascending real ``w``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    def function(self, f: ScalarFn, zero_tol: float | None = None) -> np.ndarray:
        w = self.eigenvalues
        if zero_tol is not None and np.any(np.abs(w) < zero_tol):
            raise ValueError("function undefined at a (near-)zero eigenvalue")
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            try:
                fw = np.asarray(f(w), dtype=complex)
            except FloatingPointError as exc:
                raise ValueError(f"function undefined on the spectrum: {exc}") from None
        if fw.shape != w.shape:
            fw = np.broadcast_to(fw, w.shape)
        if not np.all(np.isfinite(fw)):
            raise ValueError("function undefined on the spectrum")
        v = self.eigenvectors
        return (v * fw) @ v.conj().T


def _check_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > dense_cap():
        raise CapExceeded(f"dimension {a.shape[0]} exceeds the dense cap {dense_cap()}")
    return a


def check_hermitian(a: np.ndarray, tol: float = 1e-12) -> None:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if not np.allclose(a, a.conj().T, rtol=0.0, atol=tol * scale):
        raise ValueError("matrix is not Hermitian")


@njit(cache=True)
def _jacobi_sweep(a, v, negligible):
    """One cyclic sweep of two-sided rotations, row by row over the upper triangle."""
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            mag = abs(apq)
            if mag <= negligible:
                continue
            phase = apq / mag
            theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
            sign = 1.0 if theta >= 0.0 else -1.0
            t = sign / (abs(theta) + np.hypot(1.0, theta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G = diag(1, conj(phase)) [[c, s], [-s, c]]
            gqp = -s * np.conj(phase)
            gqq = c * np.conj(phase)
            for k in range(n):
                akp = a[k, p]
                akq = a[k, q]
                a[k, p] = akp * c + akq * gqp
                a[k, q] = akp * s + akq * gqq
            for k in range(n):
                apk = a[p, k]
                aqk = a[q, k]
                a[p, k] = c * apk + np.conj(gqp) * aqk
                a[q, k] = s * apk + np.conj(gqq) * aqk
            a[p, q] = 0.0
            a[q, p] = 0.0
            for k in range(n):
                vkp = v[k, p]
                vkq = v[k, q]
                v[k, p] = vkp * c + vkq * gqp
                v[k, q] = vkp * s + vkq * gqq


def eig_hermitian(d: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> EigenDecomposition:
    """Eigendecomposition by cyclic two-sided Jacobi rotations.

    Each sweep visits the upper-triangular pairs in row order and zeroes them
    with a complex rotation ``diag(1, e^{-i phi}) R(theta)``.  Iteration stops
    when the off-diagonal Frobenius norm drops below ``tol * ||A||_F``; one
    extra sweep then polishes the eigenvectors (convergence is quadratic there).
    Real symmetric input is handled in real arithmetic.
    """
    a = np.array(_check_square(d), dtype=complex)
    check_hermitian(a)
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.eye(0, dtype=complex))
    key = (a.shape, a.tobytes(), tol)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    real = not np.any(a.imag)
    a = 0.5 * (a + a.conj().T)
    if real:
        a = np.ascontiguousarray(a.real)
    v = np.eye(n, dtype=a.dtype)
    fro = float(np.linalg.norm(a))
    target = tol * fro
    negligible = 1e-30 * fro

    def off_norm() -> float:
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.linalg.norm(off))

    sweeps = 0
    polish = 1
    while sweeps < max_sweeps:
        if off_norm() <= target:
            if polish == 0:
                break
            polish -= 1
        _jacobi_sweep(a, v, negligible)
        sweeps += 1
    if off_norm() > target:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    out = EigenDecomposition(w[order], v[:, order].astype(complex), sweeps)
    if len(_CACHE) >= _CACHE_SIZE:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = out
    return out


def as_decomposition(d) -> EigenDecomposition:
    return d if isinstance(d, EigenDecomposition) else eig_hermitian(d)


def apply_function(d, f: ScalarFn, zero_tol: float | None = None) -> np.ndarray:
    """``S f(Lambda) S^dagger`` for Hermitian ``d`` (array or decomposition)."""
    return as_decomposition(d).function(f, zero_tol)


def exact_entry(d, f: ScalarFn, i: int, j: int) -> complex:
    return complex(apply_function(d, f)[i, j])


def _column(d, f: ScalarFn, i: int) -> np.ndarray:
    dec = as_decomposition(d)
    v = dec.eigenvectors
    fw = np.asarray(f(dec.eigenvalues), dtype=complex)
    if not np.all(np.isfinite(fw)):
        raise ValueError("function undefined on the spectrum")
    return v @ (fw * v[i].conj())


def exact_lm(d, f: ScalarFn, i: int, projector: Projector | None = None) -> float:
    """``<i| f(A)^dagger pi f(A) |i>``."""
    col = _column(d, f, i)
    mask = (projector or Projector.first_half()).mask(len(col))
    return float(np.sum(np.abs(col[mask]) ** 2))


def exact_normalized_lm(d, f: ScalarFn, i: int, projector: Projector | None = None) -> float:
    col = _column(d, f, i)
    norm2 = float(np.sum(np.abs(col) ** 2))
    if norm2 < 1e-12:
        raise ValueError("f(A)|i> has (near-)zero norm; normalized measurement undefined")
    mask = (projector or Projector.first_half()).mask(len(col))
    return float(np.sum(np.abs(col[mask]) ** 2)) / norm2


def offdiag_via_diag_check(d: np.ndarray, i: int, j: int) -> complex:
    """Rebuild ``<i|A|j>`` from diagonal expectations only.

    ``2 Re A_ij = <u|A|u> - A_ii - A_jj`` with ``u = |i> + |j>`` and
    ``2 Im A_ij = A_ii + A_jj - <w|A|w>`` with ``w = |i> + i|j>``.
    """
    a = np.asarray(d)
    if i == j:
        return complex(a[i, i])

    def quad(vec):
        return complex(vec.conj() @ a @ vec)

    n = a.shape[0]
    u = np.zeros(n, dtype=complex)
    u[i], u[j] = 1.0, 1.0
    w = np.zeros(n, dtype=complex)
    w[i], w[j] = 1.0, 1.0j
    aii, ajj = a[i, i].real, a[j, j].real
    re = 0.5 * (quad(u).real - aii - ajj)
    im = 0.5 * (aii + ajj - quad(w).real)
    return complex(re, im)


def dense_to_pauli(d: np.ndarray, max_qubits: int = 6) -> PauliOperator:
    """Trace inner products ``a_l = Tr[P_l A] / 2^n``."""
    a = _check_square(d)
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or n == 0:
        raise ValueError("dimension must be a power of two (at least 2)")
    if n > max_qubits:
        raise CapExceeded(f"{n} qubits exceeds the decomposition cap of {max_qubits}")
    k = np.arange(dim, dtype=np.int64)
    xs, zs, cs = [], [], []
    for x in range(dim):
        # Tr[P A] = sum_k <k^x|P|k> A[k, k^x]
        band = a[k, k ^ x]
        for z in range(dim):
            ph = (1j) ** (int(x & z).bit_count()) * (-1.0) ** np.bitwise_count(k & z)
            xs.append(x)
            zs.append(z)
            cs.append(np.sum(ph * band) / dim)
    return PauliOperator(n, xs, zs, cs)


def operator_norm(d: np.ndarray) -> float:
    w = eig_hermitian(d).eigenvalues
    return float(np.max(np.abs(w))) if len(w) else 0.0


def condition_number(d: np.ndarray, zero_tol: float = 1e-12) -> float:
    w = np.abs(eig_hermitian(d).eigenvalues)
    if np.min(w) < zero_tol:
        raise ValueError("matrix is singular")
    return float(np.max(w) / np.min(w))
