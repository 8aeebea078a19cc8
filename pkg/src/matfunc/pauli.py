"""Pauli strings as bit masks and sparse complex combinations of them.

A string on ``n`` qubits is stored as two ``n``-bit masks.  Qubit ``q`` lives at
bit ``n - 1 - q`` so that qubit 0 is the most significant bit of a basis index.
The masks ``(x, z)`` denote the Hermitian tensor product of single-qubit
factors ``I, X, Z, Y`` selected by ``(x_q, z_q) = (0,0), (1,0), (0,1), (1,1)``.
Writing ``X^x Z^z`` for the phase-free product, the string equals
``i^{|x & z|} X^x Z^z``; all other phases are carried by coefficients.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import MAX_PAULI_QUBITS, QUBIT_CAP, CapExceeded
from .gates import Gate

DROP_TOL = 1e-14
_PHASES = np.array([1.0, 1.0j, -1.0, -1.0j])
_CHAR = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _CHAR.items()}


def _popcount(v: int) -> int:
    return int(v).bit_count()


@dataclass(frozen=True, slots=True, order=False)
class PauliString:
    """Phase-free Pauli word on ``n_qubits`` qubits."""

    n_qubits: int
    x_bits: int
    z_bits: int

    def __post_init__(self):
        if self.n_qubits <= 0:
            raise ValueError("n_qubits must be positive")
        if self.n_qubits > MAX_PAULI_QUBITS:
            raise ValueError(f"at most {MAX_PAULI_QUBITS} qubits are supported")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_bits < limit and 0 <= self.z_bits < limit):
            raise ValueError("mask has bits beyond n_qubits")

    @classmethod
    def from_word(cls, word: str) -> "PauliString":
        n = len(word)
        x = z = 0
        for q, ch in enumerate(word.upper()):
            try:
                bx, bz = _BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r}") from None
            shift = n - 1 - q
            x |= bx << shift
            z |= bz << shift
        return cls(n, x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @property
    def word(self) -> str:
        n = self.n_qubits
        return "".join(
            _CHAR[((self.x_bits >> (n - 1 - q)) & 1, (self.z_bits >> (n - 1 - q)) & 1)]
            for q in range(n)
        )

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def sort_key(self) -> tuple[int, int]:
        return (self.z_bits, self.x_bits)

    def __repr__(self) -> str:
        return f"PauliString({self.word!r})"


def _check_pair(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")


def product_exponent(x1, z1, x2, z2):
    """Exponent k (mod 4) with ``P(x1,z1) P(x2,z2) = i^k P(x1^x2, z1^z2)``.

    Works on Python ints or on int64 numpy arrays.
    """
    if isinstance(x1, (int, np.integer)) and isinstance(x2, (int, np.integer)):
        x3, z3 = x1 ^ x2, z1 ^ z2
        k = (_popcount(x1 & z1) + _popcount(x2 & z2) + 2 * _popcount(z1 & x2)
             - _popcount(x3 & z3))
        return k % 4
    bc = np.bitwise_count
    x3 = np.bitwise_xor(x1, x2)
    z3 = np.bitwise_xor(z1, z2)
    k = (bc(x1 & z1).astype(np.int64) + bc(x2 & z2) + 2 * bc(z1 & x2).astype(np.int64)
         - bc(x3 & z3))
    return np.mod(k, 4)


def multiply(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Matrix product ``p q`` as ``(phase, r)`` with ``phase`` in {±1, ±i}."""
    _check_pair(p, q)
    k = product_exponent(p.x_bits, p.z_bits, q.x_bits, q.z_bits)
    r = PauliString(p.n_qubits, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits)
    return complex(_PHASES[k]), r


def string_entry(p: PauliString, i: int, j: int) -> complex:
    """``<i|P|j>`` in O(n) bit operations."""
    dim = 1 << p.n_qubits
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexError(f"basis index out of range for {p.n_qubits} qubits")
    if i != j ^ p.x_bits:
        return 0.0j
    k = _popcount(p.x_bits & p.z_bits) + 2 * _popcount(p.z_bits & j)
    return complex(_PHASES[k % 4])


def string_apply(x: np.ndarray, z: np.ndarray, cols: np.ndarray):
    """Vectorized action of strings on basis states.

    Returns ``(rows, phase_exponent)`` with ``P(x,z)|col> = i^k |row>``.
    """
    rows = np.bitwise_xor(cols, x)
    k = np.bitwise_count(x & z).astype(np.int64) + 2 * np.bitwise_count(z & cols)
    return rows, np.mod(k, 4)


class PauliOperator:
    """Immutable sparse combination ``sum_l a_l P_l`` in canonical order.

    Terms are stored as parallel arrays ``xs``, ``zs`` (int64 masks) and
    ``coeffs`` (complex128), sorted lexicographically on ``(z, x)`` with
    duplicates merged and numerical dust below ``1e-14 * lambda`` dropped.
    """

    __slots__ = ("n_qubits", "xs", "zs", "coeffs", "_norm")

    def __init__(self, n_qubits: int, xs, zs, coeffs, *, canonical: bool = False):
        if n_qubits <= 0 or n_qubits > MAX_PAULI_QUBITS:
            raise ValueError(f"n_qubits must lie in [1, {MAX_PAULI_QUBITS}]")
        xs = np.asarray(xs, dtype=np.int64).reshape(-1)
        zs = np.asarray(zs, dtype=np.int64).reshape(-1)
        coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        if not (len(xs) == len(zs) == len(coeffs)):
            raise ValueError("term arrays differ in length")
        if not canonical:
            xs, zs, coeffs = _canonicalize(n_qubits, xs, zs, coeffs)
        for arr in (xs, zs, coeffs):
            arr.setflags(write=False)
        self.n_qubits = n_qubits
        self.xs = xs
        self.zs = zs
        self.coeffs = coeffs
        self._norm = float(np.abs(coeffs).sum())

    # construction -------------------------------------------------------

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[complex, PauliString]]) -> "PauliOperator":
        terms = list(terms)
        for _, s in terms:
            if s.n_qubits != n:
                raise ValueError("term qubit count mismatch")
        return cls(n, [s.x_bits for _, s in terms], [s.z_bits for _, s in terms],
                   [c for c, _ in terms])

    @classmethod
    def from_words(cls, pairs: Iterable[tuple[complex, str]]) -> "PauliOperator":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("need at least one term to infer the qubit count")
        strings = [(c, PauliString.from_word(w)) for c, w in pairs]
        return cls.from_terms(strings[0][1].n_qubits, strings)

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliOperator":
        return cls(n, [0], [0], [coeff])

    @classmethod
    def zero(cls, n: int) -> "PauliOperator":
        return cls(n, [], [], [], canonical=True)

    # accessors -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> list[tuple[complex, PauliString]]:
        n = self.n_qubits
        return [(complex(c), PauliString(n, int(x), int(z)))
                for c, x, z in zip(self.coeffs, self.xs, self.zs)]

    @property
    def pauli_norm(self) -> float:
        """lambda = sum of coefficient magnitudes."""
        return self._norm

    def coefficient(self, s: PauliString | str) -> complex:
        if isinstance(s, str):
            s = PauliString.from_word(s)
        hit = np.nonzero((self.xs == s.x_bits) & (self.zs == s.z_bits))[0]
        return complex(self.coeffs[hit[0]]) if len(hit) else 0.0j

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol * max(1.0, self._norm)))

    # algebra ---------------------------------------------------------------

    def __add__(self, other: "PauliOperator") -> "PauliOperator":
        _same_n(self, other)
        return PauliOperator(self.n_qubits, np.concatenate([self.xs, other.xs]),
                             np.concatenate([self.zs, other.zs]),
                             np.concatenate([self.coeffs, other.coeffs]))

    def __sub__(self, other: "PauliOperator") -> "PauliOperator":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "PauliOperator":
        if c == 0:
            return PauliOperator.zero(self.n_qubits)
        return PauliOperator(self.n_qubits, self.xs.copy(), self.zs.copy(), self.coeffs * c,
                             canonical=True)

    def adjoint(self) -> "PauliOperator":
        # every string is Hermitian, so only coefficients conjugate
        return PauliOperator(self.n_qubits, self.xs.copy(), self.zs.copy(),
                             np.conj(self.coeffs), canonical=True)

    def __matmul__(self, other: "PauliOperator") -> "PauliOperator":
        _same_n(self, other)
        if len(self) == 0 or len(other) == 0:
            return PauliOperator.zero(self.n_qubits)
        x1, x2 = np.meshgrid(self.xs, other.xs, indexing="ij")
        z1, z2 = np.meshgrid(self.zs, other.zs, indexing="ij")
        k = product_exponent(x1, z1, x2, z2)
        c = np.outer(self.coeffs, other.coeffs) * _PHASES[k]
        return PauliOperator(self.n_qubits, (x1 ^ x2).ravel(), (z1 ^ z2).ravel(), c.ravel())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n_qubits == other.n_qubits and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.zs, other.zs)
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.n_qubits, self.xs.tobytes(), self.zs.tobytes(),
                     self.coeffs.tobytes()))

    def allclose(self, other: "PauliOperator", atol: float = 1e-12) -> bool:
        diff = self - other
        return bool(np.all(np.abs(diff.coeffs) <= atol))

    def __repr__(self) -> str:
        body = " + ".join(f"({complex(c):.6g}){s.word}" for c, s in self.terms[:8])
        more = "" if len(self) <= 8 else f" + ... ({len(self)} terms)"
        return f"PauliOperator(n={self.n_qubits}: {body or '0'}{more})"

    # evaluation ------------------------------------------------------------

    def entry(self, i: int, j: int) -> complex:
        """``<i|A|j>`` summed over the matching terms."""
        dim = 1 << self.n_qubits
        if not (0 <= i < dim and 0 <= j < dim):
            raise IndexError("basis index out of range")
        hit = self.xs == (i ^ j)
        if not hit.any():
            return 0.0j
        x, z = self.xs[hit], self.zs[hit]
        k = np.bitwise_count(x & z).astype(np.int64) + 2 * np.bitwise_count(z & j)
        return complex(np.sum(self.coeffs[hit] * _PHASES[np.mod(k, 4)]))

    def apply_basis(self, j: int) -> dict[int, complex]:
        """Sparse column ``A|j>`` as a dict basis index -> amplitude."""
        rows, k = string_apply(self.xs, self.zs, np.int64(j))
        amps = self.coeffs * _PHASES[k]
        out: dict[int, complex] = {}
        for r, a in zip(rows.tolist(), amps.tolist()):
            out[r] = out.get(r, 0.0) + a
        return out

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n_qubits,
                "terms": [{"re": c.real, "im": c.imag, "word": s.word} for c, s in self.terms]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "PauliOperator":
        if isinstance(obj, str):
            obj = json.loads(obj)
        n = int(obj["n"])
        terms = []
        for t in obj["terms"]:
            s = PauliString.from_word(t["word"])
            if s.n_qubits != n:
                raise ValueError(f"word {t['word']!r} does not have {n} qubits")
            terms.append((complex(t["re"], t.get("im", 0.0)), s))
        if not terms:
            return cls.zero(n)
        return cls.from_terms(n, terms)


def _same_n(a: PauliOperator, b: PauliOperator) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def _canonicalize(n, xs, zs, coeffs):
    limit = 1 << n
    if len(xs) and (xs.min() < 0 or zs.min() < 0 or xs.max() >= limit or zs.max() >= limit):
        raise ValueError("mask has bits beyond n_qubits")
    if len(xs) == 0:
        return xs, zs, coeffs
    order = np.lexsort((xs, zs))
    xs, zs, coeffs = xs[order], zs[order], coeffs[order]
    new = np.ones(len(xs), dtype=bool)
    new[1:] = (xs[1:] != xs[:-1]) | (zs[1:] != zs[:-1])
    starts = np.flatnonzero(new)
    summed = np.add.reduceat(coeffs, starts)
    xs, zs = xs[starts], zs[starts]
    mags = np.abs(summed)
    lam = mags.sum()
    keep = mags >= DROP_TOL * lam if lam > 0 else np.zeros(len(mags), dtype=bool)
    return xs[keep].copy(), zs[keep].copy(), summed[keep].copy()


# ---------------------------------------------------------------------------
# constructions


def tensor(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Kronecker product with ``a`` on the leading qubits."""
    nb = b.n_qubits
    xa, xb = np.meshgrid(a.xs, b.xs, indexing="ij")
    za, zb = np.meshgrid(a.zs, b.zs, indexing="ij")
    c = np.outer(a.coeffs, b.coeffs)
    return PauliOperator(a.n_qubits + nb, ((xa << nb) | xb).ravel(),
                         ((za << nb) | zb).ravel(), c.ravel())


def tensor_all(ops: Sequence[PauliOperator]) -> PauliOperator:
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return out


_ONE_QUBIT_PROJ = {
    (0, 0): [(0.5, "I"), (0.5, "Z")],
    (1, 1): [(0.5, "I"), (-0.5, "Z")],
    (0, 1): [(0.5, "X"), (0.5j, "Y")],
    (1, 0): [(0.5, "X"), (-0.5j, "Y")],
}


def decompose_projector(i: int, j: int, n: int) -> PauliOperator:
    """Pauli expansion of ``|i><j|`` on ``n`` qubits (``2**n`` terms of size ``2**-n``)."""
    dim = 1 << n
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexError(f"indices ({i}, {j}) out of range for {n} qubits")
    factors = []
    for q in range(n):
        bi = (i >> (n - 1 - q)) & 1
        bj = (j >> (n - 1 - q)) & 1
        factors.append(PauliOperator.from_words(_ONE_QUBIT_PROJ[(bi, bj)]))
    return tensor_all(factors)


def embed(local: PauliOperator, qubits: Sequence[int], n: int) -> PauliOperator:
    """Place an operator on ``len(qubits)`` qubits onto the listed qubits of ``n``."""
    k = local.n_qubits
    if len(qubits) != k:
        raise ValueError("qubit list length must match the local operator")
    if len(set(qubits)) != k or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"qubits {tuple(qubits)} invalid for {n} qubits")

    def spread(masks):
        out = np.zeros_like(masks)
        for pos, q in enumerate(qubits):
            bit = (masks >> (k - 1 - pos)) & 1
            out |= bit << (n - 1 - q)
        return out

    return PauliOperator(n, spread(local.xs), spread(local.zs), local.coeffs.copy())


_SQ = 1.0 / np.sqrt(2.0)
_LOCAL_GATES = {
    "I": PauliOperator.from_words([(1.0, "I")]),
    "X": PauliOperator.from_words([(1.0, "X")]),
    "Z": PauliOperator.from_words([(1.0, "Z")]),
    "H": PauliOperator.from_words([(_SQ, "X"), (_SQ, "Z")]),
    # |0><0| (x) 1 + |1><1| (x) X
    "CNOT": PauliOperator.from_words([(0.5, "II"), (0.5, "ZI"), (0.5, "IX"), (-0.5, "ZX")]),
    # 1 - |11><11| (x) (1 - X), expanded
    "TOFFOLI": PauliOperator.from_words([
        (0.75, "III"), (0.25, "ZII"), (0.25, "IZI"), (-0.25, "ZZI"),
        (0.25, "IIX"), (-0.25, "ZIX"), (-0.25, "IZX"), (0.25, "ZZX"),
    ]),
}


def decompose_gate(g: Gate, n: int) -> PauliOperator:
    """Pauli expansion of a gate embedded on ``n`` qubits."""
    if any(q >= n for q in g.qubits):
        raise ValueError(f"gate {g.name}{g.qubits} does not fit on {n} qubits")
    return embed(_LOCAL_GATES[g.name], g.qubits, n)


def subgroup_closure(generators: Sequence[PauliString], n: int | None = None) -> set[PauliString]:
    """All phase-free products of generator subsets.

    Strings commute up to sign, so the closure is the span of the generators
    over GF(2) in the symplectic picture; its size is at most ``2**len(generators)``.
    """
    gens = list(generators)
    if not gens:
        if n is None:
            raise ValueError("need n when the generator list is empty")
        return {PauliString.identity(n)}
    nq = gens[0].n_qubits
    for g in gens:
        if g.n_qubits != nq:
            raise ValueError("qubit count mismatch among generators")
    seen = {(0, 0)}
    for g in gens:
        key = (g.x_bits, g.z_bits)
        if key in seen:
            continue
        seen |= {(x ^ g.x_bits, z ^ g.z_bits) for x, z in seen}
    return {PauliString(nq, x, z) for x, z in seen}


def span_rank(xs: Sequence[int], zs: Sequence[int], n: int) -> int:
    """GF(2) rank of the symplectic vectors ``(x, z)``; the closure has ``2**rank`` strings."""
    basis: dict[int, int] = {}
    for x, z in zip(xs, zs):
        v = (int(x) << n) | int(z)
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def to_dense(a: PauliOperator, cap: int = QUBIT_CAP) -> np.ndarray:
    """Dense ``2**n`` matrix of the operator."""
    n = a.n_qubits
    if n > cap:
        raise CapExceeded(f"{n} qubits exceeds the dense cap of {cap}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim, dtype=np.int64)
    for c, x, z in zip(a.coeffs, a.xs, a.zs):
        rows, k = string_apply(x, z, cols)
        out[rows, cols] += c * _PHASES[k]
    return out


def string_matrix(s: PauliString) -> np.ndarray:
    return to_dense(PauliOperator.from_terms(s.n_qubits, [(1.0, s)]), cap=MAX_PAULI_QUBITS)


def all_strings(n: int) -> Iterable[PauliString]:
    for x, z in itertools.product(range(1 << n), repeat=2):
        yield PauliString(n, x, z)


def z_projector(n: int, qubit: int, value: int) -> PauliOperator:
    """``|value><value|`` on ``qubit`` tensored with identity: ``(1 +- Z_q)/2``."""
    sign = 0.5 if value == 0 else -0.5
    local = PauliOperator.from_words([(0.5, "I"), (sign, "Z")])
    return embed(local, [qubit], n)
