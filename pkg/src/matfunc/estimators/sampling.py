"""Random streams, sample-count rules and degree laws for the Monte Carlo estimators.

Samples are grouped into fixed-size blocks.  Block ``b`` of stream ``s`` draws
from its own Philox generator keyed by ``(seed, s, b)``, so the values do not
depend on how blocks are spread over workers.  Block sums are reduced in block
order, which makes results bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..polynomials import PolynomialSpec

BLOCK = 2048
MAX_SAMPLES = 50_000_000


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def hoeffding_samples(bound: float, eps: float, delta: float, complex_valued: bool = True) -> int:
    """Samples for an ``eps`` additive estimate of a mean of values with ``|X| <= bound``.

    Complex values are split into real and imaginary parts, each with budget
    ``eps / sqrt 2`` and failure ``delta / 2``: ``ceil(4 B^2 ln(4/delta) / eps^2)``.
    A real mean needs ``ceil(2 B^2 ln(2/delta) / eps^2)``.
    """
    if bound <= 0:
        return 0
    if complex_valued:
        n = 4.0 * bound * bound * math.log(4.0 / delta) / (eps * eps)
    else:
        n = 2.0 * bound * bound * math.log(2.0 / delta) / (eps * eps)
    if not math.isfinite(n):
        return MAX_SAMPLES + 1
    return max(1, math.ceil(n))


def hoeffding_half_width(bound: float, n: int, delta: float, complex_valued: bool = True) -> float:
    """Inverse of :func:`hoeffding_samples`: the ``eps`` that ``n`` samples guarantee."""
    if bound <= 0:
        return 0.0
    if n <= 0:
        return math.inf
    c = 4.0 * math.log(4.0 / delta) if complex_valued else 2.0 * math.log(2.0 / delta)
    return bound * math.sqrt(c / n)


def run_blocks(n: int, sampler: Callable[[np.random.Generator, int], np.ndarray],
               seed: int, stream: int = 0, workers: int = 1) -> complex:
    """Mean of ``n`` samples drawn block by block; deterministic in ``(seed, stream)``."""
    if n <= 0:
        return 0j
    sizes = [BLOCK] * (n // BLOCK)
    if n % BLOCK:
        sizes.append(n % BLOCK)

    def one(b: int) -> complex:
        vals = sampler(block_rng(seed, stream, b), sizes[b])
        return complex(np.sum(vals))

    if workers <= 1 or len(sizes) == 1:
        sums = [one(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(one, range(len(sizes))))
    total = 0j
    for s in sums:
        total += s
    return total / n


@dataclass(frozen=True)
class DegreeLaw:
    """Random degree ``d`` and phase with ``f(A) = W * E[phase * (A/b)^d]``."""

    degrees: np.ndarray
    probs: np.ndarray
    phases: np.ndarray
    W: float
    b: float

    @classmethod
    def from_polynomial(cls, p: PolynomialSpec, b: float) -> "DegreeLaw":
        alphas = p.alphas()
        degs = np.arange(len(alphas))
        mags = np.abs(alphas) * float(b) ** degs
        keep = mags > 0
        W = float(mags.sum())
        if W == 0:
            return cls(np.zeros(1, dtype=int), np.ones(1), np.zeros(1, dtype=complex), 0.0, b)
        if not math.isfinite(W):
            raise OverflowError("polynomial l1 weight overflows double precision")
        return cls(degs[keep], mags[keep] / W, alphas[keep] / np.abs(alphas[keep]), W, b)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def is_constant(self) -> bool:
        return self.max_degree == 0

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        idx = np.minimum(np.searchsorted(cum, rng.random(size), side="right"), len(cum) - 1)
        return self.degrees[idx], self.phases[idx]


@dataclass(frozen=True)
class FragmentLaw:
    """Degree law of ``(sum_{k<=K} (i t A / r)^k / k!)^r`` with ``A`` normalized by ``b``.

    Each of the ``r`` fragments draws its own order ``k`` with probability
    proportional to ``(t_hat/r)^k / k!`` (``t_hat = b |t|``); the degree is the
    sum and the phase ``(i sign t)^d``.
    """

    t: float
    b: float
    r: int
    K: int

    @property
    def t_hat(self) -> float:
        return self.b * abs(self.t)

    @property
    def W(self) -> float:
        x = self.t_hat / self.r
        return float(sum(x**k / math.factorial(k) for k in range(self.K + 1)) ** self.r)

    @property
    def max_degree(self) -> int:
        return self.r * self.K

    @property
    def is_constant(self) -> bool:
        return self.t == 0 or self.K == 0

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        x = self.t_hat / self.r
        w = np.array([x**k / math.factorial(k) for k in range(self.K + 1)])
        cum = np.cumsum(w / w.sum())
        cum[-1] = 1.0
        u = rng.random((size, self.r))
        ks = np.minimum(np.searchsorted(cum, u, side="right"), self.K)
        d = ks.sum(axis=1)
        unit = 1j if self.t >= 0 else -1j
        return d, unit ** (d % 4)
