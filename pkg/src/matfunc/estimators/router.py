"""Regime selection and the top-level ``estimate`` entry point."""

from __future__ import annotations

import math
import time
from dataclasses import replace

from ..access import PauliAccess, SparseOracle, SuperSparseMatrix
from ..config import CLOSURE_CAP, PATH_LOG2_CAP, SUPERSPARSE_CAP
from ..polynomials import FunctionSpec, PolynomialSpec, anger_jacobi_order, inverse_exponent
from . import composite
from .composite import Access, Plan
from .exact import closure_bound, path_log2_cost, poly_log2_cost
from .montecarlo import MCConfig
from .sampling import MAX_SAMPLES, DegreeLaw, hoeffding_samples
from .types import Estimate, EstimateRequest, HardRegime, PreconditionError, decide

_ROWS = {
    ("monomial", "sparse"): "A^m, sparse access: BQP-complete for ||A||_1 <= c with c = 1 (constant s, ||A||_1 <= 2)",
    ("monomial", "pauli"): "A^m, Pauli access: BQP-complete for lambda_A <= c with c = 1",
    ("chebyshev", "sparse"): "T_m(A), sparse access: BQP-complete for c = 1",
    ("chebyshev", "pauli"): "T_m(A), Pauli access: BQP-complete for c = 1",
    ("inverse", "sparse"): "A^-1, sparse access: BQP-complete for c, k = O(1/polylog N)",
    ("inverse", "pauli"): "A^-1, Pauli access: BQP-complete for c, k = O(1/polylog N)",
    ("timeevo", "sparse"): "e^{-iAt}, sparse access: BQP-complete for c, k = O(1/polylog N)",
    ("timeevo", "pauli"): "e^{-iAt}, Pauli access: BQP-complete for c, k = O(1/polylog N)",
}


def table_row(kind: str, access: Access) -> str:
    model = "pauli" if isinstance(access, PauliAccess) else "sparse"
    return _ROWS.get((kind, model), f"{kind}, {model} access: no classical regime applies")


def _kind(fn) -> str:
    return fn.kind if isinstance(fn, FunctionSpec) else "polynomial"


def function_degree(fn, eps: float, access: Access) -> int:
    """Degree of the polynomial the exact algorithms would evaluate."""
    if isinstance(fn, PolynomialSpec):
        return fn.degree
    if fn.kind in ("monomial", "chebyshev"):
        return fn.m
    if fn.kind == "inverse":
        return 2 * inverse_exponent(fn.kappa, min(eps / 2.0, 0.5)) - 1
    if fn.t == 0:
        return 0
    gamma = composite.norm_upper_bound(access)
    return 2 * anger_jacobi_order(gamma * fn.t, min(eps / 4.0, 0.3)) + 1


def _sparsity(access: Access) -> int:
    if isinstance(access, PauliAccess):
        return max(1, len(set(access.operator.xs.tolist())))
    if isinstance(access, SuperSparseMatrix):
        return max(1, access.to_oracle().sparsity)
    return access.meta.s or access.sparsity


def _mc_weight(fn, eps: float, access: Access, b: float) -> float:
    if isinstance(fn, FunctionSpec) and fn.kind == "timeevo":
        if fn.t == 0 or b == 0:
            return 1.0
        return composite.timeevo_mc_plan(access, fn.t, eps / 2.0).poly.W
    if isinstance(fn, FunctionSpec) and fn.kind == "inverse":
        # sum_i C(b, i) b^{2i-1} grows like 2^b; avoid building huge coefficients
        k = inverse_exponent(fn.kappa, min(eps / 2.0, 0.5))
        return math.inf if k > 60 else float(sum(math.comb(k, i) * b ** (2 * i - 1) for i in range(1, k + 1)))
    poly = fn if isinstance(fn, PolynomialSpec) else fn.polynomial()
    try:
        return DegreeLaw.from_polynomial(poly, b).W
    except OverflowError:
        return math.inf


def route(access: Access, req: EstimateRequest) -> str:
    """Deterministic algorithm choice from declared metadata.

    Rules, in order: super-sparse forms use the closure algorithms; declared
    ``lambda_A <= 1`` (Pauli) or ``||A||_1 <= 1`` (sparse) use Monte Carlo when the
    sample count is within the cap; declared ``||A|| <= 1 - eta`` with a
    monomial uses norm decay; a path recursion with ``degree * log2(s)`` within
    the cap is exact; anything else raises :class:`HardRegime` naming the
    matching row of the results table.
    """
    fn, eps = req.function, req.eps
    kind = _kind(fn)
    meta = access.meta
    lm = req.target.kind != "entry"
    # 1. super-sparse forms
    if isinstance(access, SuperSparseMatrix) and access.k * access.k <= SUPERSPARSE_CAP:
        return "supersparse_cb"
    if isinstance(access, PauliAccess) and closure_bound(access.operator) <= CLOSURE_CAP:
        return "supersparse_pauli"
    # 2. Monte Carlo under unit normalization
    if isinstance(access, PauliAccess):
        b = meta.pauli_norm if meta.pauli_norm is not None else access.lam
        mc = "mc_pauli"
    else:
        b = meta.one_norm
        mc = "mc_sparse"
    if b is not None and b <= 1.0:
        W = _mc_weight(fn, eps, access, b)
        bound = W * W if lm else W
        if hoeffding_samples(bound, eps / 2.0, req.delta, not lm) <= MAX_SAMPLES:
            return mc
    # 3. norm decay for monomials with a spectral gap
    eta = req.eta
    if eta is None and meta.op_norm is not None and meta.op_norm < 1.0:
        eta = 1.0 - meta.op_norm
    if kind == "monomial" and eta is not None and 0 < eta < 1:
        thr = composite.decay_threshold(eps, eta, lm)
        if fn.m > thr:
            return "norm_decay"
        # below the threshold the sparse delegate is exact propagation, the Pauli one sampling
        if isinstance(access, PauliAccess):
            W = access.lam ** fn.m
            if hoeffding_samples(W * W if lm else W, eps, req.delta, not lm) <= MAX_SAMPLES:
                return "norm_decay"
        elif poly_log2_cost(_sparsity(access), access.dim, fn.m) <= PATH_LOG2_CAP:
            return "norm_decay"
    # 4. exact path recursion
    degree = function_degree(fn, eps, access)
    if path_log2_cost(_sparsity(access), degree) <= PATH_LOG2_CAP:
        return "exact_path"
    raise HardRegime(f"hard regime per the results table: {table_row(kind, access)}")


def _plan(access: Access, req: EstimateRequest, algorithm: str, lm: bool) -> tuple[Plan, float]:
    """Polynomial plan and the statistical budget left for the estimator."""
    fn, eps = req.function, req.eps
    if isinstance(fn, PolynomialSpec):
        return Plan(fn, 0.0, 1.0, float(sum(abs(fn.alphas())))), eps
    if fn.kind in ("monomial", "chebyshev"):
        p = fn.polynomial()
        return Plan(p, 0.0, 1.0, 1.0), eps
    if fn.kind == "inverse":
        approx = composite.lm_approx_budget(fn.kappa, eps / 2.0) if lm else eps / 2.0
        return composite.inverse_plan(fn.kappa, approx), eps / 2.0
    approx = composite.lm_approx_budget(1.0, eps / 2.0) if lm else eps / 2.0
    if fn.t == 0:
        return Plan(PolynomialSpec((1,)), 0.0, 1.0, 1.0), eps
    if algorithm in ("mc_sparse", "mc_pauli"):
        return composite.timeevo_mc_plan(access, fn.t, approx), eps / 2.0
    return composite.timeevo_exact_plan(access, fn.t, approx), eps / 2.0


def estimate(access: Access, req: EstimateRequest) -> Estimate:
    """Run the requested (or routed) algorithm and attach a decision when ``g`` is given."""
    t0 = time.perf_counter()
    algorithm = req.algorithm if req.algorithm != "auto" else route(access, req)
    tgt = req.target
    dim = access.dim
    for idx in (tgt.i, tgt.j):
        if idx is not None and not 0 <= idx < dim:
            raise IndexError(f"index {idx} outside dimension {dim}")
    cfg = MCConfig(eps=req.eps, delta=req.delta, seed=req.seed, workers=req.workers)
    if algorithm == "norm_decay":
        e = _norm_decay(access, req, cfg)
    else:
        lm = tgt.kind != "entry"
        plan, stat = _plan(access, req, algorithm, lm)
        cfg = replace(cfg, eps=stat)
        if tgt.kind == "entry":
            e = composite.run_entry(access, plan, tgt.i, tgt.j, algorithm, cfg)
        elif tgt.kind == "lm":
            e = composite.run_lm(access, plan, tgt.i, tgt.projector, algorithm, cfg)
        else:
            e = composite.normalized_lm(access, plan, tgt.i, tgt.projector, algorithm, cfg)
    e.algorithm = algorithm
    e.wall_time = time.perf_counter() - t0
    if req.g is not None:
        e.decision = decide(e, req.g, req.eps)
    return e


def _norm_decay(access: Access, req: EstimateRequest, cfg: MCConfig) -> Estimate:
    fn = req.function
    if not (isinstance(fn, FunctionSpec) and fn.kind == "monomial"):
        raise PreconditionError("norm decay applies to monomials only")
    eta = req.eta
    if eta is None and access.meta.op_norm is not None and access.meta.op_norm < 1.0:
        eta = 1.0 - access.meta.op_norm
    tgt = req.target
    if tgt.kind == "entry":
        return composite.norm_decay_entry(access, fn.m, req.eps, eta, tgt.i, tgt.j, cfg)
    if tgt.kind == "lm":
        return composite.norm_decay_lm(access, fn.m, req.eps, eta, tgt.i, tgt.projector, cfg)
    raise PreconditionError("norm decay does not cover normalized measurements")
