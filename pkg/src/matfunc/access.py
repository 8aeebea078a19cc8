"""Matrix access models: sparse oracles, Pauli access, super-sparse lists, dense arrays.

Algorithms trust the declared metadata (sparsity, norms).  ``audit_oracle``
checks the declarations exhaustively when the dimension is small enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import dense as dense_oracle
from .config import CapExceeded, dense_cap
from .pauli import PauliOperator, to_dense

RowNeighbors = Callable[[int, int], "int | None"]
ColNeighbors = Callable[[int, int], "int | None"]
Entry = Callable[[int, int], complex]


@dataclass(frozen=True)
class Metadata:
    """Declared properties of a matrix; ``None`` means unknown."""

    s: int | None = None
    one_norm: float | None = None
    pauli_norm: float | None = None
    op_norm: float | None = None
    kappa: float | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_json(cls, obj: dict | None) -> "Metadata":
        obj = obj or {}
        return cls(**{k: obj.get(k) for k in ("s", "one_norm", "pauli_norm", "op_norm", "kappa")})

    def replace(self, **kw) -> "Metadata":
        d = dict(self.__dict__)
        d.update(kw)
        return Metadata(**d)


@dataclass(frozen=True)
class SparseOracle:
    """Sparse access: neighbor oracles for rows and columns plus an entry oracle.

    ``row_neighbors(i, k)`` is the column of the k-th non-zero in row ``i`` and
    ``col_neighbors(l, j)`` the row of the l-th non-zero in column ``j``; both
    return ``None`` past the end of the list.
    """

    dim: int
    sparsity: int
    row_neighbors: RowNeighbors
    col_neighbors: ColNeighbors
    entry: Entry
    meta: Metadata = field(default_factory=Metadata)

    def __post_init__(self):
        if self.dim <= 0 or self.sparsity <= 0:
            raise ValueError("dim and sparsity must be positive")

    def row(self, i: int) -> list[tuple[int, complex]]:
        out = []
        for k in range(self.sparsity):
            c = self.row_neighbors(i, k)
            if c is not None:
                out.append((c, self.entry(i, c)))
        return out

    def column(self, j: int) -> list[tuple[int, complex]]:
        out = []
        for l in range(self.sparsity):
            r = self.col_neighbors(l, j)
            if r is not None:
                out.append((r, self.entry(r, j)))
        return out

    def to_dense(self) -> np.ndarray:
        if self.dim > dense_cap():
            raise CapExceeded(f"dimension {self.dim} exceeds the dense cap {dense_cap()}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            for c, v in self.row(i):
                out[i, c] = v
        return out

    @classmethod
    def from_dense(cls, d: np.ndarray, meta: Metadata | None = None) -> "SparseOracle":
        d = np.asarray(d, dtype=complex)
        n = d.shape[0]
        rows = [np.flatnonzero(d[i]) for i in range(n)]
        cols = [np.flatnonzero(d[:, j]) for j in range(n)]
        s = max(1, max(len(r) for r in rows), max(len(c) for c in cols))
        return cls._from_lists(n, s, rows, cols, lambda i, j: complex(d[i, j]), meta)

    @classmethod
    def _from_lists(cls, n, s, rows, cols, entry, meta) -> "SparseOracle":
        rows = [tuple(int(c) for c in r) for r in rows]
        cols = [tuple(int(r) for r in c) for c in cols]

        def rn(i, k):
            r = rows[i]
            return r[k] if k < len(r) else None

        def cn(l, j):
            c = cols[j]
            return c[l] if l < len(c) else None

        meta = meta or Metadata()
        if meta.s is None:
            meta = meta.replace(s=s)
        return cls(n, s, rn, cn, entry, meta)


@dataclass(frozen=True)
class PauliAccess:
    """Pauli-coefficient access with an l1 sampler over the terms."""

    operator: PauliOperator
    cumulative_weights: np.ndarray = field(init=False, repr=False)
    meta: Metadata = field(default_factory=Metadata)

    def __post_init__(self):
        op = self.operator
        lam = op.pauli_norm
        if lam > 0:
            cw = np.cumsum(np.abs(op.coeffs)) / lam
            cw[-1] = 1.0
        else:
            cw = np.zeros(0)
        cw.setflags(write=False)
        object.__setattr__(self, "cumulative_weights", cw)
        if self.meta.pauli_norm is None:
            object.__setattr__(self, "meta", self.meta.replace(pauli_norm=lam))

    @property
    def n_qubits(self) -> int:
        return self.operator.n_qubits

    @property
    def dim(self) -> int:
        return 1 << self.operator.n_qubits

    @property
    def lam(self) -> float:
        return self.operator.pauli_norm

    @property
    def n_terms(self) -> int:
        return len(self.operator)

    def signs(self) -> np.ndarray:
        c = self.operator.coeffs
        return c / np.abs(c)

    def sample_indices(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.lam <= 0:
            raise ValueError("cannot sample from the zero operator")
        u = rng.random(size)
        idx = np.searchsorted(self.cumulative_weights, u, side="right")
        return np.minimum(idx, self.n_terms - 1)


def sample_term(p: PauliAccess, rng: np.random.Generator) -> tuple[int, complex]:
    """Index ``l`` with probability ``|a_l| / lambda`` and its sign ``a_l / |a_l|``."""
    idx = int(p.sample_indices(rng, None))
    c = complex(p.operator.coeffs[idx])
    return idx, c / abs(c)


@dataclass(frozen=True)
class SuperSparseMatrix:
    """Explicit list of all non-zero entries of a Hermitian matrix."""

    dim: int
    entries: tuple[tuple[int, int, complex], ...]
    meta: Metadata = field(default_factory=Metadata)

    def __post_init__(self):
        ents = tuple((int(i), int(j), complex(v)) for i, j, v in self.entries)
        object.__setattr__(self, "entries", ents)
        seen = {}
        for i, j, v in ents:
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise IndexError(f"entry ({i}, {j}) outside dimension {self.dim}")
            if (i, j) in seen:
                raise ValueError(f"duplicate entry ({i}, {j})")
            seen[(i, j)] = v
        for (i, j), v in seen.items():
            w = seen.get((j, i))
            if w is None or abs(w - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
                raise ValueError(f"entry ({i}, {j}) lacks its Hermitian partner")

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[tuple[int, int, complex]],
                     close: bool = True, meta: Metadata | None = None) -> "SuperSparseMatrix":
        """Build from entries, adding the Hermitian partners when ``close``."""
        table: dict[tuple[int, int], complex] = {}
        for i, j, v in entries:
            table[(int(i), int(j))] = complex(v)
            if close:
                table.setdefault((int(j), int(i)), complex(np.conj(v)))
        return cls(dim, tuple((i, j, v) for (i, j), v in sorted(table.items())),
                   meta or Metadata())

    @property
    def k(self) -> int:
        return len(self.entries)

    def support(self) -> list[int]:
        return sorted({i for i, _, _ in self.entries} | {j for _, j, _ in self.entries})

    def to_dense(self) -> np.ndarray:
        if self.dim > dense_cap():
            raise CapExceeded(f"dimension {self.dim} exceeds the dense cap {dense_cap()}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, j, v in self.entries:
            out[i, j] = v
        return out

    def to_oracle(self) -> SparseOracle:
        rows: dict[int, list[int]] = {}
        cols: dict[int, list[int]] = {}
        table = {}
        for i, j, v in self.entries:
            rows.setdefault(i, []).append(j)
            cols.setdefault(j, []).append(i)
            table[(i, j)] = v
        s = max([len(r) for r in rows.values()] + [1])

        def rn(i, k):
            r = rows.get(i, ())
            return r[k] if k < len(r) else None

        def cn(l, j):
            c = cols.get(j, ())
            return c[l] if l < len(c) else None

        return SparseOracle(self.dim, s, rn, cn, lambda i, j: table.get((i, j), 0j),
                            self.meta.replace(s=s) if self.meta.s is None else self.meta)


def pauli_to_sparse_oracle(p: PauliAccess | PauliOperator) -> SparseOracle:
    """Sparse access to a Pauli-given matrix; row sparsity at most L."""
    op = p.operator if isinstance(p, PauliAccess) else p
    ux = tuple(int(x) for x in np.unique(op.xs))
    s = max(1, len(ux))

    def rn(i, k):
        return i ^ ux[k] if k < len(ux) else None

    # Hermitian, so the column lists mirror the rows
    def cn(l, j):
        return j ^ ux[l] if l < len(ux) else None

    meta = p.meta if isinstance(p, PauliAccess) else Metadata(pauli_norm=op.pauli_norm)
    return SparseOracle(1 << op.n_qubits, s, rn, cn, op.entry, meta.replace(s=s))


def column_abs_sum(o: SparseOracle, j: int) -> float:
    return float(sum(abs(v) for _, v in o.column(j)))


def induced_one_norm(m) -> float:
    """Max column absolute sum."""
    if isinstance(m, SuperSparseMatrix):
        sums: dict[int, float] = {}
        for _, j, v in m.entries:
            sums[j] = sums.get(j, 0.0) + abs(v)
        return max(sums.values(), default=0.0)
    if isinstance(m, SparseOracle):
        if m.dim > dense_cap():
            raise CapExceeded("exhaustive column scan exceeds the dense cap")
        return max(column_abs_sum(m, j) for j in range(m.dim))
    if isinstance(m, PauliOperator):
        m = to_dense(m)
    d = np.asarray(m)
    return float(np.max(np.sum(np.abs(d), axis=0))) if d.size else 0.0


def operator_norm(d: np.ndarray) -> float:
    return dense_oracle.operator_norm(d)


def condition_number(d: np.ndarray) -> float:
    return dense_oracle.condition_number(d)


@dataclass
class AuditReport:
    max_row: int
    max_col: int
    hermitian: bool
    declared_s: int
    ok: bool
    problems: list[str]


def audit_oracle(o: SparseOracle, rng: np.random.Generator | None = None,
                 exhaustive: bool = True, tol: float = 1e-12) -> AuditReport:
    """Check declared sparsity and Hermiticity of an oracle.

    Exhaustive mode scans every row and column (dimension must be within the
    dense cap); fast mode samples ``min(N^2, 10^4)`` random pairs for Hermiticity.
    """
    problems = []
    if exhaustive and o.dim > dense_cap():
        raise CapExceeded("exhaustive audit exceeds the dense cap")
    max_row = max_col = 0
    hermitian = True
    if exhaustive:
        for i in range(o.dim):
            row = o.row(i)
            max_row = max(max_row, len(row))
            max_col = max(max_col, len(o.column(i)))
            for c, v in row:
                if abs(o.entry(c, i) - np.conj(v)) > tol * max(1.0, abs(v)):
                    hermitian = False
    else:
        rng = rng or np.random.default_rng(0)
        pairs = min(o.dim * o.dim, 10_000)
        for i, j in rng.integers(0, o.dim, size=(pairs, 2)):
            a, b = o.entry(int(i), int(j)), o.entry(int(j), int(i))
            if abs(a - np.conj(b)) > tol * max(1.0, abs(a)):
                hermitian = False
                break
    if max(max_row, max_col) > o.sparsity:
        problems.append(f"observed occupancy {max(max_row, max_col)} exceeds s={o.sparsity}")
    if not hermitian:
        problems.append("not Hermitian")
    return AuditReport(max_row, max_col, hermitian, o.sparsity, not problems, problems)
