"""Monte Carlo path estimators for entries and local measurements.

Each sample draws a degree ``d`` (with a phase) from a degree law satisfying
``f(A) = W E[phase (A/b)^d]`` and then an unbiased single-path estimate of
``(A/b)^d``, whose modulus is at most one:

* sparse access walks ``d`` steps from column ``j``, picking row ``k`` with
  probability ``|A_kj| / c_j`` (``c_j`` the column absolute sum) and
  multiplying the weight by ``c_j sign(A_kj) / b``;
* Pauli access draws ``d`` term indices ``l`` with probability ``|a_l|/lambda``
  and folds the signed string product.

Values are therefore bounded by ``W``, which fixes the Hoeffding sample count.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ..access import PauliAccess, SparseOracle, induced_one_norm
from ..config import CapExceeded
from ..pauli import product_exponent, string_apply
from ..polynomials import PolynomialSpec
from ..projector import Projector
from .sampling import (MAX_SAMPLES, DegreeLaw, FragmentLaw, hoeffding_half_width,
                       hoeffding_samples, run_blocks)
from .types import Estimate, PreconditionError

_PHASES = np.array([1.0, 1.0j, -1.0, -1.0j])
Law = DegreeLaw | FragmentLaw


@dataclass
class MCConfig:
    eps: float = 0.05
    delta: float = 0.05
    seed: int = 0
    workers: int = 1
    max_samples: int = MAX_SAMPLES
    stream: int = 0
    # fixed sample count; the half-width is then the Hoeffding bound for that count
    samples: int | None = None

    def plan(self, bound: float, complex_valued: bool = True) -> tuple[int, float]:
        """Sample count and the half-width it certifies."""
        if self.samples is not None:
            n = int(self.samples)
            return n, hoeffding_half_width(bound, n, self.delta, complex_valued)
        return hoeffding_samples(bound, self.eps, self.delta, complex_valued), self.eps


# ---------------------------------------------------------------------------
# sparse walks


@dataclass
class _ColumnTable:
    """Per-column sampling data, filled lazily and shared across blocks."""

    o: SparseOracle
    b: float
    data: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, j: int):
        hit = self.data.get(j)
        if hit is not None:
            return hit
        col = self.o.column(j)
        if col:
            rows = np.array([r for r, _ in col], dtype=np.int64)
            vals = np.array([v for _, v in col], dtype=complex)
            mags = np.abs(vals)
            keep = mags > 0
            rows, vals, mags = rows[keep], vals[keep], mags[keep]
        if not col or len(rows) == 0:
            hit = (np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0, dtype=complex), 0.0)
        else:
            c = float(mags.sum())
            cum = np.cumsum(mags) / c
            cum[-1] = 1.0
            hit = (rows, cum, (vals / mags) * (c / self.b), c)
        with self.lock:
            self.data.setdefault(j, hit)
        return hit


def _walk(table: _ColumnTable, start: int, degrees: np.ndarray,
          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints and weights of ``len(degrees)`` walks of the given lengths from ``start``."""
    size = len(degrees)
    cur = np.full(size, start, dtype=np.int64)
    wt = np.ones(size, dtype=complex)
    remaining = degrees.astype(np.int64).copy()
    steps = int(remaining.max()) if size else 0
    for _ in range(steps):
        u = rng.random(size)
        active = np.flatnonzero(remaining > 0)
        if len(active) == 0:
            break
        cols = cur[active]
        for col in np.unique(cols):
            sel = active[cols == col]
            rows, cum, steps_w, c = table.get(int(col))
            if c == 0:
                wt[sel] = 0.0
                remaining[sel] = 0
                continue
            idx = np.minimum(np.searchsorted(cum, u[sel], side="right"), len(cum) - 1)
            cur[sel] = rows[idx]
            wt[sel] *= steps_w[idx]
        remaining[active] -= 1
    return cur, wt


def _one_norm(o: SparseOracle) -> float:
    b = o.meta.one_norm
    if b is None:
        try:
            b = induced_one_norm(o)
        except CapExceeded:
            raise PreconditionError("sparse Monte Carlo needs a declared 1-norm") from None
    if b < 0:
        raise PreconditionError("1-norm must be non-negative")
    return float(b)


def _check_samples(n: int, cfg: MCConfig) -> None:
    if n > cfg.max_samples:
        raise CapExceeded(f"Monte Carlo needs {n} samples (cap {cfg.max_samples})")


def _constant_entry(law: Law, poly_const: complex, i: int, j: int, algo: str, t0: float) -> Estimate:
    val = poly_const if i == j else 0j
    return Estimate(val, 0.0, 0, algo, time.perf_counter() - t0)


def _law_for(poly: PolynomialSpec | Law, b: float) -> Law:
    if isinstance(poly, (DegreeLaw, FragmentLaw)):
        return poly
    return DegreeLaw.from_polynomial(poly, b)


def _constant_value(law: Law) -> complex:
    if isinstance(law, FragmentLaw):
        return 1.0 + 0j
    if law.W == 0:
        return 0j
    return complex(law.W * law.phases[0])


def mc_entry_sparse(o: SparseOracle, poly: PolynomialSpec | FragmentLaw, i: int, j: int,
                    cfg: MCConfig | None = None) -> Estimate:
    """Unbiased path-integral estimate of ``<i|poly(A)|j>`` under sparse access."""
    cfg = cfg or MCConfig()
    t0 = time.perf_counter()
    b = _one_norm(o)
    law = _law_for(poly, b)
    if law.is_constant or b == 0:
        c = _constant_value(law) if law.is_constant else _degree0(poly)
        return _constant_entry(law, c, i, j, "mc_sparse", t0)
    n, hw = cfg.plan(law.W)
    _check_samples(n, cfg)
    table = _ColumnTable(o, law.b)

    def sampler(rng, size):
        d, ph = law.sample(rng, size)
        end, wt = _walk(table, j, d, rng)
        return law.W * ph * wt * (end == i)

    val = run_blocks(n, sampler, cfg.seed, cfg.stream, cfg.workers)
    return Estimate(val, hw, n, "mc_sparse", time.perf_counter() - t0,
                    details={"W": law.W, "b": law.b})


def _degree0(poly) -> complex:
    if isinstance(poly, FragmentLaw):
        return 1.0 + 0j
    return complex(poly.alphas()[0])


# ---------------------------------------------------------------------------
# Pauli products


def _pauli_products(p: PauliAccess, degrees: np.ndarray, rng: np.random.Generator):
    """Random signed string products ``prod_l sign_l P_l`` of the given lengths.

    Returns ``(x, z, k, sign)`` with the product equal to ``sign i^k P(x, z)``.
    """
    size = len(degrees)
    dmax = int(degrees.max()) if size else 0
    op = p.operator
    xs, zs = op.xs.astype(np.int64), op.zs.astype(np.int64)
    signs = p.signs()
    x = np.zeros(size, dtype=np.int64)
    z = np.zeros(size, dtype=np.int64)
    k = np.zeros(size, dtype=np.int64)
    sign = np.ones(size, dtype=complex)
    if dmax == 0:
        return x, z, k, sign
    idx = p.sample_indices(rng, (size, dmax))
    for c in range(dmax):
        live = np.flatnonzero(degrees > c)
        if len(live) == 0:
            break
        t = idx[live, c]
        k[live] += product_exponent(x[live], z[live], xs[t], zs[t])
        x[live] ^= xs[t]
        z[live] ^= zs[t]
        sign[live] *= signs[t]
    return x, z, np.mod(k, 4), sign


def mc_entry_pauli(p: PauliAccess, poly: PolynomialSpec | FragmentLaw, i: int, j: int,
                   cfg: MCConfig | None = None) -> Estimate:
    """Unbiased estimate of ``<i|poly(A)|j>`` by sampling signed Pauli products."""
    cfg = cfg or MCConfig()
    t0 = time.perf_counter()
    lam = p.lam
    if lam <= 0:
        raise PreconditionError("Pauli Monte Carlo needs a non-zero operator")
    law = _law_for(poly, lam)
    if law.is_constant:
        return _constant_entry(law, _constant_value(law), i, j, "mc_pauli", t0)
    n, hw = cfg.plan(law.W)
    _check_samples(n, cfg)
    col = np.int64(j)

    def sampler(rng, size):
        d, ph = law.sample(rng, size)
        x, z, k, sign = _pauli_products(p, d, rng)
        rows, k2 = string_apply(x, z, col)
        return law.W * ph * sign * _PHASES[np.mod(k + k2, 4)] * (rows == i)

    val = run_blocks(n, sampler, cfg.seed, cfg.stream, cfg.workers)
    return Estimate(val, hw, n, "mc_pauli", time.perf_counter() - t0,
                    details={"W": law.W, "b": law.b})


# ---------------------------------------------------------------------------
# local measurements


def _lm_constant(law: Law, i: int, dim: int, projector: Projector, algo: str, t0: float) -> Estimate:
    c = _constant_value(law)
    val = abs(c) ** 2 * float(bool(projector.contains(i, dim)))
    return Estimate(val, 0.0, 0, algo, time.perf_counter() - t0)


def mc_lm(access: SparseOracle | PauliAccess, poly: PolynomialSpec | FragmentLaw, i: int,
          cfg: MCConfig | None = None, projector: Projector | None = None) -> Estimate:
    """Estimate ``<i|poly(A)^dagger pi poly(A)|i>`` from two independent sampled paths.

    Sparse form: two walks from ``i`` contribute ``conj(w1) w2`` when they end
    on the same index inside ``pi``.  Pauli form: ``pi = (1 + (-1)^v Z_q)/2`` is
    sampled as the identity or ``(-1)^v Z_q`` with probability one half each.
    Values are bounded by ``W^2``; the estimate is real.
    """
    cfg = cfg or MCConfig()
    projector = projector or Projector.first_half()
    t0 = time.perf_counter()
    if isinstance(access, PauliAccess):
        algo, b, dim = "mc_pauli", access.lam, access.dim
        if b <= 0:
            raise PreconditionError("Pauli Monte Carlo needs a non-zero operator")
    else:
        algo, b, dim = "mc_sparse", _one_norm(access), access.dim
    law = _law_for(poly, b)
    if law.is_constant or b == 0:
        if not law.is_constant:
            law = DegreeLaw.from_polynomial(PolynomialSpec((_degree0(poly),)), 1.0)
        return _lm_constant(law, i, dim, projector, algo, t0)
    W2 = law.W * law.W
    n, hw = cfg.plan(W2, complex_valued=False)
    _check_samples(n, cfg)

    if isinstance(access, PauliAccess):
        n_q = access.n_qubits
        q, v = projector.qubit(n_q) if not projector.is_identity else (0, 0)
        zbit = np.int64(1 << (n_q - 1 - q))
        coin_p = 0.0 if projector.is_identity else 0.5
        start = np.int64(i)

        def sampler(rng, size):
            d1, ph1 = law.sample(rng, size)
            d2, ph2 = law.sample(rng, size)
            x1, z1, k1, s1 = _pauli_products(access, d1, rng)
            x2, z2, k2, s2 = _pauli_products(access, d2, rng)
            r1, e1 = string_apply(x1, z1, start)
            r2, e2 = string_apply(x2, z2, start)
            a1 = ph1 * s1 * _PHASES[np.mod(k1 + e1, 4)]
            a2 = ph2 * s2 * _PHASES[np.mod(k2 + e2, 4)]
            coin = rng.random(size) < coin_p
            zsign = np.where((r2 & zbit) != 0, -1.0, 1.0) * (-1.0) ** v
            pi = np.where(coin, zsign, 1.0)
            return (W2 * np.conj(a1) * a2 * pi * (r1 == r2)).real
    else:
        table = _ColumnTable(access, law.b)

        def sampler(rng, size):
            d1, ph1 = law.sample(rng, size)
            d2, ph2 = law.sample(rng, size)
            e1, w1 = _walk(table, i, d1, rng)
            e2, w2 = _walk(table, i, d2, rng)
            inside = np.asarray(projector.contains(e1, dim), dtype=bool)
            return (W2 * np.conj(ph1 * w1) * ph2 * w2 * ((e1 == e2) & inside)).real

    val = run_blocks(n, sampler, cfg.seed, cfg.stream, cfg.workers)
    return Estimate(val.real, hw, n, algo, time.perf_counter() - t0,
                    details={"W": law.W, "b": law.b})
