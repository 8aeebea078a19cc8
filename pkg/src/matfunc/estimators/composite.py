"""Function-level estimators built from the polynomial ones.

A :class:`Plan` pairs a polynomial (or a Taylor fragment law) with the
sup-norm error of approximating the target function on the spectrum, the
factor by which ``A`` is rescaled first, and a bound on ``||f(A)||`` used to
carry approximation error into local measurements.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from ..access import PauliAccess, SparseOracle, SuperSparseMatrix, induced_one_norm, pauli_to_sparse_oracle
from ..config import CLOSURE_CAP, CapExceeded
from ..polynomials import (PolynomialSpec, anger_jacobi_poly, inverse_poly, monomial,
                           taylor_fragment_spec, taylor_remainder)
from ..projector import Projector
from . import exact
from .montecarlo import MCConfig, mc_entry_pauli, mc_entry_sparse, mc_lm
from .sampling import FragmentLaw
from .sketch import sketch_then_eval
from .types import Estimate, PreconditionError

Access = SparseOracle | PauliAccess | SuperSparseMatrix


@dataclass(frozen=True)
class Plan:
    poly: PolynomialSpec | FragmentLaw
    approx: float = 0.0
    scale: float = 1.0
    fnorm: float = 1.0
    label: str = ""


# ---------------------------------------------------------------------------
# access helpers


def scaled_access(access: Access, c: float) -> Access:
    """The same matrix divided by ``c`` (declared norms rescaled too)."""
    if c == 1.0:
        return access
    if c <= 0:
        raise ValueError("scale must be positive")
    meta = access.meta
    meta = meta.replace(**{k: getattr(meta, k) / c for k in ("one_norm", "pauli_norm", "op_norm")
                           if getattr(meta, k) is not None})
    if isinstance(access, PauliAccess):
        return PauliAccess(access.operator.scale(1.0 / c), meta)
    if isinstance(access, SuperSparseMatrix):
        return SuperSparseMatrix(access.dim, tuple((i, j, v / c) for i, j, v in access.entries), meta)
    entry = access.entry
    return SparseOracle(access.dim, access.sparsity, access.row_neighbors, access.col_neighbors,
                        lambda i, j: entry(i, j) / c, meta)


def as_oracle(access: Access) -> SparseOracle:
    if isinstance(access, SparseOracle):
        return access
    if isinstance(access, PauliAccess):
        return pauli_to_sparse_oracle(access)
    return access.to_oracle()


def norm_upper_bound(access: Access) -> float:
    """Smallest declared (or cheaply computed) upper bound on ``||A||``."""
    meta = access.meta
    cands = [v for v in (meta.op_norm, meta.one_norm, meta.pauli_norm) if v is not None]
    if isinstance(access, PauliAccess):
        cands.append(access.lam)
    elif isinstance(access, SuperSparseMatrix):
        cands.append(induced_one_norm(access))
    if not cands:
        try:
            cands.append(induced_one_norm(access))
        except CapExceeded:
            raise PreconditionError("no declared norm bound for this matrix") from None
    return float(min(cands))


def mc_normalizer(access: Access) -> float:
    if isinstance(access, PauliAccess):
        return access.lam
    o = as_oracle(access)
    if o.meta.one_norm is not None:
        return float(o.meta.one_norm)
    try:
        return induced_one_norm(o)
    except CapExceeded:
        raise PreconditionError("sparse Monte Carlo needs a declared 1-norm") from None


# ---------------------------------------------------------------------------
# polynomial-level dispatch


def _with_scale(access: Access, plan: Plan) -> Access:
    return scaled_access(access, plan.scale)


def run_entry(access: Access, plan: Plan, i: int, j: int, algorithm: str,
              cfg: MCConfig, rng_seed: int | None = None) -> Estimate:
    """Entry estimate of ``plan.poly`` on ``A / plan.scale`` with the approximation error added."""
    t0 = time.perf_counter()
    poly = plan.poly
    a = _with_scale(access, plan)
    if algorithm == "exact_path":
        val = exact.exact_entry_poly(as_oracle(a), poly, i, j)
        e = Estimate(val, 0.0, 0, algorithm)
    elif algorithm == "mc_sparse":
        e = mc_entry_sparse(as_oracle(a), poly, i, j, cfg)
    elif algorithm == "mc_pauli":
        e = mc_entry_pauli(_need_pauli(a), poly, i, j, cfg)
    elif algorithm == "supersparse_cb":
        e = Estimate(exact.supersparse_entry(_need_ssm(a), poly, i, j), 0.0, 0, algorithm)
    elif algorithm == "supersparse_pauli":
        e = Estimate(exact.pauli_supersparse_entry(_need_pauli(a), poly, i, j), 0.0, 0, algorithm)
    elif algorithm == "sketch":
        rng = np.random.Generator(np.random.Philox(cfg.seed if rng_seed is None else rng_seed))
        e = sketch_then_eval(_need_pauli(a), poly, cfg.eps, cfg.delta, rng, i, j)
    else:
        raise ValueError(f"algorithm {algorithm!r} does not evaluate polynomials")
    e.half_width += plan.approx
    e.wall_time = time.perf_counter() - t0
    return e


def run_lm(access: Access, plan: Plan, i: int, projector: Projector, algorithm: str,
           cfg: MCConfig) -> Estimate:
    """Local measurement of ``plan.poly``; approximation error enters as ``a (2F + a)``."""
    t0 = time.perf_counter()
    poly = plan.poly
    a = _with_scale(access, plan)
    if algorithm == "exact_path":
        e = Estimate(exact.exact_lm_poly(as_oracle(a), poly, i, projector), 0.0, 0, algorithm)
    elif algorithm == "mc_sparse":
        e = mc_lm(as_oracle(a), poly, i, cfg, projector)
    elif algorithm == "mc_pauli":
        e = mc_lm(_need_pauli(a), poly, i, cfg, projector)
    elif algorithm == "supersparse_cb":
        e = Estimate(exact.supersparse_lm(_need_ssm(a), poly, i, projector), 0.0, 0, algorithm)
    elif algorithm == "supersparse_pauli":
        e = Estimate(exact.pauli_supersparse_lm(_need_pauli(a), poly, i, projector), 0.0, 0, algorithm)
    elif algorithm == "sketch":
        rng = np.random.Generator(np.random.Philox(cfg.seed))
        e = sketch_then_eval(_need_pauli(a), poly, cfg.eps, cfg.delta, rng, i,
                             projector=projector, lm=True)
    else:
        raise ValueError(f"algorithm {algorithm!r} does not evaluate polynomials")
    e.value = complex(e.value.real)
    e.half_width += plan.approx * (2.0 * plan.fnorm + plan.approx)
    e.wall_time = time.perf_counter() - t0
    return e


def _need_pauli(a: Access) -> PauliAccess:
    if not isinstance(a, PauliAccess):
        raise PreconditionError("this algorithm needs Pauli access")
    return a


def _need_ssm(a: Access) -> SuperSparseMatrix:
    if not isinstance(a, SuperSparseMatrix):
        raise PreconditionError("this algorithm needs a super-sparse entry list")
    return a


# ---------------------------------------------------------------------------
# norm decay


def decay_threshold(eps: float, eta: float, lm: bool = False) -> float:
    """``log eps / log(1 - eta)`` (halved for local measurements)."""
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie in (0, 1)")
    t = math.log(eps) / math.log(1.0 - eta)
    return t / 2.0 if lm else t


def _check_eta(access: Access, eta: float | None) -> float:
    if eta is None:
        raise PreconditionError("norm decay needs the spectral gap eta")
    declared = access.meta.op_norm
    if declared is not None and declared > 1.0 - eta + 1e-12:
        raise PreconditionError(f"declared ||A|| = {declared:g} exceeds 1 - eta = {1 - eta:g}")
    return eta


def norm_decay_entry(access: Access, m: int, eps: float, eta: float | None, i: int, j: int,
                     cfg: MCConfig | None = None) -> Estimate:
    """``0`` with bound ``(1-eta)^m`` past the decay threshold, else an exact or sampled value."""
    t0 = time.perf_counter()
    eta = _check_eta(access, eta)
    cfg = cfg or MCConfig(eps=eps)
    if m > decay_threshold(eps, eta):
        return Estimate(0.0, (1.0 - eta) ** m, 0, "norm_decay", time.perf_counter() - t0,
                        details={"threshold": decay_threshold(eps, eta)})
    if isinstance(access, PauliAccess):
        e = mc_entry_pauli(access, monomial(m), i, j, replace(cfg, eps=eps))
    elif isinstance(access, SuperSparseMatrix):
        e = Estimate(exact.supersparse_entry(access, monomial(m), i, j), 0.0, 0, "norm_decay")
    else:
        e = Estimate(exact.exact_entry_poly(access, monomial(m), i, j), 0.0, 0, "norm_decay")
    e.algorithm = "norm_decay"
    e.details["delegate"] = "mc_pauli" if isinstance(access, PauliAccess) else "exact"
    e.wall_time = time.perf_counter() - t0
    return e


def norm_decay_lm(access: Access, m: int, eps: float, eta: float | None, i: int,
                  projector: Projector | None = None, cfg: MCConfig | None = None) -> Estimate:
    """LM variant: threshold ``log eps / (2 log(1-eta))``, bound ``(1-eta)^{2m}``."""
    t0 = time.perf_counter()
    eta = _check_eta(access, eta)
    projector = projector or Projector.first_half()
    cfg = cfg or MCConfig(eps=eps)
    if m > decay_threshold(eps, eta, lm=True):
        return Estimate(0.0, (1.0 - eta) ** (2 * m), 0, "norm_decay", time.perf_counter() - t0,
                        details={"threshold": decay_threshold(eps, eta, lm=True)})
    if isinstance(access, PauliAccess):
        e = mc_lm(access, monomial(m), i, replace(cfg, eps=eps), projector)
    elif isinstance(access, SuperSparseMatrix):
        e = Estimate(exact.supersparse_lm(access, monomial(m), i, projector), 0.0, 0, "norm_decay")
    else:
        e = Estimate(exact.exact_lm_poly(access, monomial(m), i, projector), 0.0, 0, "norm_decay")
    e.algorithm = "norm_decay"
    e.wall_time = time.perf_counter() - t0
    return e


# ---------------------------------------------------------------------------
# plans for the four function families


def lm_approx_budget(fnorm: float, budget: float) -> float:
    """Largest ``a`` with ``a (2 F + a) <= budget``."""
    return -fnorm + math.sqrt(fnorm * fnorm + budget)


def inverse_plan(kappa: float, approx: float) -> Plan:
    """``inverse_poly(kappa, approx)``; valid when the spectrum lies in ``[-1,-1/kappa] u [1/kappa,1]``."""
    p = inverse_poly(kappa, min(approx, 0.5))
    return Plan(p, approx, 1.0, kappa, p.label)


def timeevo_exact_plan(access: Access, t: float, approx: float) -> Plan:
    """Anger-Jacobi polynomial of ``A / gamma`` at time ``gamma t``; error at most ``approx``."""
    gamma = norm_upper_bound(access)
    if gamma == 0 or t == 0:
        return Plan(PolynomialSpec((1,)), 0.0, 1.0, 1.0, "identity")
    eps_aj = min(approx / 2.0, 0.3)
    p = anger_jacobi_poly(gamma * t, eps_aj)
    err = max(2.0 * eps_aj, p.certified_error or 0.0)
    return Plan(p, err, gamma, 1.0, p.label)


def timeevo_mc_plan(access: Access, t: float, approx: float) -> Plan:
    """Taylor fragments with normalizer ``b`` (``||A||_1`` or ``lambda_A``)."""
    b = mc_normalizer(access)
    if b == 0 or t == 0:
        return Plan(PolynomialSpec((1,)), 0.0, 1.0, 1.0, "identity")
    r, K = taylor_fragment_spec(t, b, min(approx, 0.5))
    law = FragmentLaw(t, b, r, K)
    return Plan(law, taylor_remainder(b * abs(t), r, K), 1.0, 1.0, f"fragments[r={r},K={K}]")


def _target_done(e: Estimate, algorithm: str) -> Estimate:
    e.algorithm = algorithm
    return e


def inverse_entry(access: Access, kappa: float, eps: float, i: int, j: int,
                  algorithm: str = "exact_path", cfg: MCConfig | None = None) -> Estimate:
    """``[A^{-1}]_{ij}`` from ``inverse_poly(kappa, eps/2)`` and an ``eps/2`` statistical budget."""
    cfg = replace(cfg or MCConfig(), eps=eps / 2.0)
    return run_entry(access, inverse_plan(kappa, eps / 2.0), i, j, algorithm, cfg)


def inverse_lm(access: Access, kappa: float, eps: float, i: int,
               projector: Projector | None = None, algorithm: str = "exact_path",
               cfg: MCConfig | None = None) -> Estimate:
    """LM of ``A^{-1}|i>``; approximation budget ``a`` with ``a (2 kappa + a) <= eps/2``."""
    cfg = replace(cfg or MCConfig(), eps=eps / 2.0)
    plan = inverse_plan(kappa, lm_approx_budget(kappa, eps / 2.0))
    return run_lm(access, plan, i, projector or Projector.first_half(), algorithm, cfg)


def _timeevo_plan(access: Access, t: float, approx: float, algorithm: str) -> Plan:
    if algorithm in ("mc_sparse", "mc_pauli"):
        return timeevo_mc_plan(access, t, approx)
    return timeevo_exact_plan(access, t, approx)


def timeevo_entry(access: Access, t: float, eps: float, i: int, j: int,
                  algorithm: str = "exact_path", cfg: MCConfig | None = None) -> Estimate:
    """``<i|e^{iAt}|j>``: Taylor-fragment sampling (MC algorithms) or Anger-Jacobi (exact ones)."""
    if t == 0:
        return Estimate(1.0 if i == j else 0.0, 0.0, 0, algorithm)
    cfg = replace(cfg or MCConfig(), eps=eps / 2.0)
    plan = _timeevo_plan(access, t, eps / 2.0, algorithm)
    return run_entry(access, plan, i, j, algorithm, cfg)


def timeevo_lm(access: Access, t: float, eps: float, i: int, projector: Projector | None = None,
               algorithm: str = "exact_path", cfg: MCConfig | None = None) -> Estimate:
    projector = projector or Projector.first_half()
    if t == 0:
        dim = access.dim
        return Estimate(float(bool(projector.contains(i, dim))), 0.0, 0, algorithm)
    cfg = replace(cfg or MCConfig(), eps=eps / 2.0)
    plan = _timeevo_plan(access, t, lm_approx_budget(1.0, eps / 2.0), algorithm)
    return run_lm(access, plan, i, projector, algorithm, cfg)


# ---------------------------------------------------------------------------
# normalized local measurement


def ratio_half_width(num: float, hn: float, den: float, hd: float) -> float:
    """First-order bound on ``|N/D - n/d|`` given ``|N - n| <= hn`` and ``|D - d| <= hd``."""
    if den - hd <= 0:
        raise PreconditionError("normalization estimate is not bounded away from zero")
    return (hn + abs(num / den) * hd) / (den - hd)


def normalized_lm(access: Access, plan: Plan, i: int, projector: Projector, algorithm: str,
                  cfg: MCConfig) -> Estimate:
    """``<i|f^dagger pi f|i> / <i|f^dagger f|i>`` as a ratio of two estimates.

    The denominator is the ``(i, i)`` entry of ``conj(f) f``.  Each estimate gets
    half of the failure probability; the reported half-width propagates both
    errors to first order and refuses when the denominator could be zero.
    """
    t0 = time.perf_counter()
    half = replace(cfg, delta=cfg.delta / 2.0, stream=cfg.stream)
    num = run_lm(access, plan, i, projector, algorithm, half)
    if algorithm in ("exact_path", "supersparse_cb", "supersparse_pauli"):
        den = run_lm(access, plan, i, _ALL, algorithm, half)
    elif isinstance(plan.poly, PolynomialSpec):
        q = plan.poly.conj().times(plan.poly)
        den = run_entry(access, Plan(q, 0.0, plan.scale), i, i, algorithm,
                        replace(half, stream=cfg.stream + 1))
        den.half_width += plan.approx * (2.0 * plan.fnorm + plan.approx)
    else:
        den = run_lm(access, plan, i, _ALL, algorithm, replace(half, stream=cfg.stream + 1))
    n, d = num.value.real, den.value.real
    hw = ratio_half_width(n, num.half_width, d, den.half_width)
    return Estimate(n / d, hw, num.samples_used + den.samples_used, algorithm,
                    time.perf_counter() - t0,
                    details={"numerator": n, "denominator": d})


_ALL = Projector.identity()
