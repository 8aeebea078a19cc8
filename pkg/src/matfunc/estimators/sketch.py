"""Importance-sampling sketch of a Pauli operator followed by exact evaluation."""

from __future__ import annotations

import math
import time

import numpy as np

from ..access import PauliAccess
from ..config import CLOSURE_CAP, CapExceeded
from ..pauli import PauliOperator
from ..polynomials import PolynomialSpec
from ..projector import Projector
from .exact import closure_bound, pauli_lm_from_operator, pauli_supersparse_apply
from .types import Estimate, PreconditionError


def sketch_size(lam: float, eps_prime: float, delta: float, dim: int) -> int:
    """``m = ceil(8 lambda^2 / eps'^2 ln(2N / delta))``."""
    if eps_prime <= 0:
        raise ValueError("eps' must be positive")
    return max(1, math.ceil(8.0 * lam * lam / (eps_prime * eps_prime) * math.log(2.0 * dim / delta)))


def sketch_pauli(p: PauliAccess, eps_prime: float, delta: float, rng: np.random.Generator,
                 m: int | None = None) -> PauliAccess:
    """Average of ``m`` draws ``sign(a_l) lambda P_l`` with ``P(l) = |a_l| / lambda``.

    Unbiased for ``A``; ``||sketch - A|| <= eps'`` with probability at least ``1 - delta``
    when ``m`` follows :func:`sketch_size`.
    """
    lam = p.lam
    if lam <= 0:
        raise PreconditionError("cannot sketch the zero operator")
    m = m if m is not None else sketch_size(lam, eps_prime, delta, p.dim)
    idx = p.sample_indices(rng, m)
    counts = np.bincount(idx, minlength=p.n_terms)
    hit = np.flatnonzero(counts)
    op = p.operator
    coeffs = p.signs()[hit] * lam * counts[hit] / m
    sk = PauliOperator(op.n_qubits, op.xs[hit], op.zs[hit], coeffs)
    return PauliAccess(sk, p.meta.replace(pauli_norm=sk.pauli_norm))


def lipschitz_bound(poly: PolynomialSpec) -> float:
    """``sum_k k |alpha_k|``: bounds ``||p(A) - p(B)|| / ||A - B||`` when ``||A||, ||B|| <= 1``.

    Follows from ``A^k - B^k = sum_l A^l (A - B) B^{k-1-l}``.
    """
    a = np.abs(poly.alphas())
    return float(np.sum(np.arange(len(a)) * a))


def sketch_then_eval(p: PauliAccess, poly: PolynomialSpec, eps: float, delta: float,
                     rng: np.random.Generator, i: int, j: int | None = None,
                     projector: Projector | None = None, lm: bool = False,
                     cap: int = CLOSURE_CAP) -> Estimate:
    """Sketch ``A`` to operator-norm accuracy ``eps'`` and evaluate ``poly`` on the sketch exactly.

    The budget is ``eps' = eps / L`` for entries and ``eps / (2 S L)`` for local
    measurements, with ``L`` from :func:`lipschitz_bound` and ``S = sum |alpha_k|``
    bounding ``||p||`` on the unit ball.  The declared ``lambda_A = 1 - eta`` must
    leave room ``eta > eps'``, so the sketch keeps norm at most one; when the
    budget is looser than that, ``eps'`` is reduced to ``eta / 2``.
    """
    t0 = time.perf_counter()
    lam = p.meta.pauli_norm if p.meta.pauli_norm is not None else p.lam
    L = lipschitz_bound(poly)
    S = float(np.sum(np.abs(poly.alphas())))
    if L == 0:
        c = complex(poly.alphas()[0])
        if lm:
            val = abs(c) ** 2 * float(bool((projector or Projector.first_half()).contains(i, p.dim)))
        else:
            val = c if i == j else 0j
        return Estimate(val, 0.0, 0, "sketch", time.perf_counter() - t0)
    eps_prime = eps / (2.0 * S * L) if lm else eps / L
    eta = 1.0 - lam
    if not eta > 0:
        raise PreconditionError(f"sketch needs lambda_A < 1 (lambda_A = {lam:g})")
    # a tighter sketch is always admissible; it keeps the sketch inside the unit ball
    eps_prime = min(eps_prime, eta / 2.0)
    m = sketch_size(p.lam, eps_prime, delta, p.dim)
    sk = sketch_pauli(p, eps_prime, delta, rng, m)
    bound = closure_bound(sk.operator)
    if bound > cap:
        raise CapExceeded(f"budget infeasible: sketch closure bound {bound} exceeds the cap {cap}")
    b = pauli_supersparse_apply(sk, poly, cap=cap)
    if lm:
        val = pauli_lm_from_operator(b, i, projector)
    else:
        val = b.entry(i, j)
    return Estimate(val, eps, m, "sketch", time.perf_counter() - t0,
                    details={"eps_prime": eps_prime, "lipschitz": L, "sketch_terms": len(sk.operator)})
