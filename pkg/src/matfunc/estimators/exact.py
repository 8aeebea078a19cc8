"""Deterministic estimators: path recursion on sparse oracles and closure algorithms.

Vectors are sparse dicts ``index -> amplitude``.  The path recursion
``[A^m]_{ij} = sum_k [A^{m-1}]_{ik} A_{kj}`` is evaluated with memoization,
i.e. by propagating ``A^k |j>`` one power at a time, so shared sub-paths are
visited once.
"""

from __future__ import annotations

import math

import numpy as np

from ..access import PauliAccess, SparseOracle, SuperSparseMatrix
from ..config import CLOSURE_CAP, PATH_LOG2_CAP, SUPERSPARSE_CAP, CapExceeded
from ..pauli import PauliOperator, span_rank, subgroup_closure
from ..polynomials import PolynomialSpec
from ..projector import Projector

Vec = dict


# ---------------------------------------------------------------------------
# sparse vector helpers


class _Columns:
    """Memoized column access ``A|j>`` for one oracle."""

    def __init__(self, o: SparseOracle):
        self.o = o
        self.cache: dict[int, list[tuple[int, complex]]] = {}

    def __call__(self, j: int):
        col = self.cache.get(j)
        if col is None:
            col = self.o.column(j)
            self.cache[j] = col
        return col


def _matvec(cols: _Columns, v: Vec, scale: float = 1.0) -> Vec:
    out: Vec = {}
    inv = 1.0 / scale
    for j, a in v.items():
        if a == 0:
            continue
        for r, val in cols(j):
            out[r] = out.get(r, 0j) + val * a * inv
    return out


def _axpy(acc: Vec, c: complex, v: Vec) -> None:
    if c == 0:
        return
    for k, a in v.items():
        acc[k] = acc.get(k, 0j) + c * a


def _lincomb(a: complex, u: Vec, b: complex, v: Vec) -> Vec:
    out: Vec = {k: a * x for k, x in u.items()}
    for k, x in v.items():
        out[k] = out.get(k, 0j) + b * x
    return out


def path_log2_cost(s: int, m: int) -> float:
    return m * math.log2(s) if s > 1 else 0.0


def _check_path_cap(s: int, m: int) -> None:
    cost = path_log2_cost(s, m)
    if cost > PATH_LOG2_CAP:
        raise CapExceeded(f"path recursion needs m*log2(s) = {cost:.1f} > {PATH_LOG2_CAP}")


def _power_column(o: SparseOracle, j: int, m: int, cols: _Columns | None = None) -> Vec:
    cols = cols or _Columns(o)
    v: Vec = {j: 1.0 + 0j}
    for _ in range(m):
        v = _matvec(cols, v)
    return v


def _in_projector(k: int, dim: int, projector: Projector) -> bool:
    return bool(projector.contains(k, dim))


# ---------------------------------------------------------------------------
# path recursion


def exact_entry_path(o: SparseOracle, i: int, j: int, m: int) -> complex:
    """Exact ``[A^m]_{ij}`` by the memoized path recursion over neighbor lists."""
    if m < 0:
        raise ValueError("power must be non-negative")
    _check_path_cap(o.sparsity, m)
    return complex(_power_column(o, j, m).get(i, 0j))


def exact_lm_path(o: SparseOracle, i: int, j: int, m1: int, m2: int,
                  projector: Projector | None = None) -> complex:
    """Exact ``<i|A^{m1} pi A^{m2}|j>``.

    ``A^{m2}|j>`` is peeled from the right and ``<i|A^{m1}`` from the left
    (for Hermitian ``A`` this is the conjugate of ``A^{m1}|i>``); the two meet
    on the projector's range.
    """
    if m1 < 0 or m2 < 0:
        raise ValueError("powers must be non-negative")
    _check_path_cap(o.sparsity, max(m1, m2))
    projector = projector or Projector.first_half()
    cols = _Columns(o)
    right = _power_column(o, j, m2, cols)
    left = _power_column(o, i, m1, cols)
    total = 0j
    for k, a in right.items():
        if _in_projector(k, o.dim, projector):
            total += np.conj(left.get(k, 0j)) * a
    return complex(total)


def poly_log2_cost(s: int, dim: int, degree: int) -> float:
    """``log2`` of the work of memoized propagation: ``min(N, s^k)`` indices per power."""
    width = math.log2(dim) if s > 1 else 0.0
    reach = min(path_log2_cost(s, degree), width)
    return reach + math.log2(max(1, degree)) + math.log2(max(1, s))


def _poly_cost_ok(o: SparseOracle, degree: int) -> None:
    cost = poly_log2_cost(o.sparsity, o.dim, degree)
    if cost > PATH_LOG2_CAP:
        raise CapExceeded(f"polynomial propagation cost 2^{cost:.1f} exceeds the work cap")


def choose_basis(p: PolynomialSpec, basis: str = "auto") -> str:
    """Monomial or Chebyshev evaluation, whichever has the smaller coefficient l1 norm."""
    if basis in ("monomial", "chebyshev"):
        return basis
    if p.degree <= 1:
        return "monomial"
    if p.cheb is None and p.degree > 60:
        return "monomial"
    mono = float(np.sum(np.abs(p.alphas())))
    cheb = float(np.sum(np.abs(p.chebyshev_coefficients())))
    return "chebyshev" if cheb < mono else "monomial"


def poly_apply_vec(cols: _Columns, p: PolynomialSpec, v: Vec, scale: float = 1.0,
                   basis: str = "auto") -> Vec:
    """``p(A/scale) v`` on a sparse vector."""
    if choose_basis(p, basis) == "monomial":
        alphas = p.alphas()
        acc: Vec = {k: alphas[-1] * a for k, a in v.items()}
        for c in alphas[-2::-1]:
            acc = _matvec(cols, acc, scale)
            _axpy(acc, c, v)
        return acc
    cheb = p.chebyshev_coefficients()
    acc = {k: cheb[0] * a for k, a in v.items()}
    if len(cheb) == 1:
        return acc
    prev, cur = v, _matvec(cols, v, scale)
    _axpy(acc, cheb[1], cur)
    for c in cheb[2:]:
        prev, cur = cur, _lincomb(2.0, _matvec(cols, cur, scale), -1.0, prev)
        _axpy(acc, c, cur)
    return acc


def exact_entry_poly(o: SparseOracle, p: PolynomialSpec, i: int, j: int,
                     scale: float = 1.0, basis: str = "auto") -> complex:
    """Exact ``<i|p(A/scale)|j>`` from all the powers ``A^k|j>``."""
    _poly_cost_ok(o, p.degree)
    col = poly_apply_vec(_Columns(o), p, {j: 1.0 + 0j}, scale, basis)
    return complex(col.get(i, 0j))


def exact_lm_poly(o: SparseOracle, p: PolynomialSpec, i: int,
                  projector: Projector | None = None, scale: float = 1.0,
                  basis: str = "auto", normalized: bool = False) -> float:
    """``||pi p(A/scale)|i>||^2`` (optionally divided by ``||p(A/scale)|i>||^2``)."""
    _poly_cost_ok(o, p.degree)
    projector = projector or Projector.first_half()
    col = poly_apply_vec(_Columns(o), p, {i: 1.0 + 0j}, scale, basis)
    num = sum(abs(a) ** 2 for k, a in col.items() if _in_projector(k, o.dim, projector))
    if not normalized:
        return float(num)
    den = sum(abs(a) ** 2 for a in col.values())
    if den < 1e-12:
        raise ValueError("p(A)|i> has (near-)zero norm; normalized measurement undefined")
    return float(num / den)


# ---------------------------------------------------------------------------
# super-sparse matrices


def _restriction(ssm: SuperSparseMatrix, extra: tuple[int, ...]):
    if ssm.k * ssm.k > SUPERSPARSE_CAP:
        raise CapExceeded(f"k^2 = {ssm.k ** 2} exceeds the work cap")
    support = sorted(set(ssm.support()) | set(extra))
    pos = {g: n for n, g in enumerate(support)}
    b = np.zeros((len(support), len(support)), dtype=complex)
    for r, c, v in ssm.entries:
        b[pos[r], pos[c]] = v
    return support, pos, b


def _poly_apply_dense(b: np.ndarray, p: PolynomialSpec, v: np.ndarray, basis: str) -> np.ndarray:
    if choose_basis(p, basis) == "monomial":
        alphas = p.alphas()
        acc = alphas[-1] * v
        for c in alphas[-2::-1]:
            acc = b @ acc + c * v
        return acc
    cheb = p.chebyshev_coefficients()
    acc = cheb[0] * v
    if len(cheb) == 1:
        return acc
    prev, cur = v, b @ v
    acc = acc + cheb[1] * cur
    for c in cheb[2:]:
        prev, cur = cur, 2.0 * (b @ cur) - prev
        acc = acc + c * cur
    return acc


def supersparse_entry(ssm: SuperSparseMatrix, poly: PolynomialSpec, i: int, j: int,
                      basis: str = "auto") -> complex:
    """Exact ``<i|poly(A)|j>`` on the support of a super-sparse matrix.

    Off the support ``A`` vanishes, so ``poly(A)`` acts there as ``alpha_0``;
    on the support it is the polynomial of the restricted ``|I| x |I|`` block.
    """
    if not (0 <= i < ssm.dim and 0 <= j < ssm.dim):
        raise IndexError("basis index out of range")
    _, pos, b = _restriction(ssm, (i, j))
    e = np.zeros(len(pos), dtype=complex)
    e[pos[j]] = 1.0
    return complex(_poly_apply_dense(b, poly, e, basis)[pos[i]])


def supersparse_lm(ssm: SuperSparseMatrix, poly: PolynomialSpec, i: int,
                   projector: Projector | None = None, basis: str = "auto") -> float:
    """Exact ``<i|poly(A)^dagger pi poly(A)|i>`` on a super-sparse matrix."""
    if not 0 <= i < ssm.dim:
        raise IndexError("basis index out of range")
    projector = projector or Projector.first_half()
    support, pos, b = _restriction(ssm, (i,))
    e = np.zeros(len(pos), dtype=complex)
    e[pos[i]] = 1.0
    col = _poly_apply_dense(b, poly, e, basis)
    mask = np.array([_in_projector(g, ssm.dim, projector) for g in support], dtype=bool)
    return float(np.sum(np.abs(col[mask]) ** 2))


# ---------------------------------------------------------------------------
# super-sparse Pauli operators


def closure_bound(op: PauliOperator) -> int:
    """Size ``2^rank`` of the phase-free closure of the terms; at most ``min(2^L, 4^n)``.

    Any polynomial in ``op`` is supported on this closure.
    """
    return 1 << span_rank(op.xs, op.zs, op.n_qubits)


def closure_size(op: PauliOperator) -> int:
    """Exact closure size by enumeration (for cross-checking :func:`closure_bound`)."""
    gens = [s for _, s in op.terms]
    return len(subgroup_closure(gens, op.n_qubits))


def _pauli_of(p: PauliAccess | PauliOperator) -> PauliOperator:
    return p.operator if isinstance(p, PauliAccess) else p


def pauli_supersparse_apply(p: PauliAccess | PauliOperator, poly: PolynomialSpec,
                            basis: str = "auto", cap: int = CLOSURE_CAP) -> PauliOperator:
    """Explicit Pauli expansion of ``poly(A)``.

    Every power of ``A`` lives in the span of the subgroup generated by its
    ``L`` strings, so no intermediate has more than ``2^rank <= min(2^L, 4^n)`` terms.
    """
    op = _pauli_of(p)
    bound = closure_bound(op)
    if bound > cap:
        raise CapExceeded(f"closure bound {bound} exceeds the cap {cap}")
    n = op.n_qubits
    ident = PauliOperator.identity(n)
    if choose_basis(poly, basis) == "monomial":
        alphas = poly.alphas()
        acc = ident.scale(alphas[-1])
        for c in alphas[-2::-1]:
            acc = acc @ op + ident.scale(c)
        return acc
    cheb = poly.chebyshev_coefficients()
    acc = ident.scale(cheb[0])
    if len(cheb) == 1:
        return acc
    prev, cur = ident, op
    acc = acc + cur.scale(cheb[1])
    for c in cheb[2:]:
        prev, cur = cur, (op @ cur).scale(2.0) - prev
        acc = acc + cur.scale(c)
    return acc


def pauli_supersparse_entry(p: PauliAccess | PauliOperator, poly: PolynomialSpec,
                            i: int, j: int, basis: str = "auto") -> complex:
    return pauli_supersparse_apply(p, poly, basis).entry(i, j)


def pauli_lm_from_operator(b: PauliOperator, i: int, projector: Projector | None = None) -> float:
    """``<i|B^dagger pi B|i>`` for an explicit Pauli operator ``B``.

    Equal to the double sum over term pairs ``conj(b_l) b_l' <i|P_l pi P_l'|i>``;
    the pairs only meet when the strings share their flip pattern, so the sum
    is evaluated through the column ``B|i>`` grouped by flip pattern.
    """
    projector = projector or Projector.first_half()
    col = b.apply_basis(i)
    dim = 1 << b.n_qubits
    return float(sum(abs(a) ** 2 for k, a in col.items() if _in_projector(k, dim, projector)))


def pauli_supersparse_lm(p: PauliAccess | PauliOperator, poly: PolynomialSpec, i: int,
                         projector: Projector | None = None, basis: str = "auto") -> float:
    return pauli_lm_from_operator(pauli_supersparse_apply(p, poly, basis), i, projector)


__all__ = [
    "exact_entry_path", "exact_lm_path", "exact_entry_poly", "exact_lm_poly",
    "supersparse_entry", "supersparse_lm", "pauli_supersparse_apply",
    "pauli_supersparse_entry", "pauli_supersparse_lm", "pauli_lm_from_operator",
    "closure_bound", "closure_size", "choose_basis", "path_log2_cost",
]
