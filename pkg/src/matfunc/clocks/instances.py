"""Circuit-to-matrix clock constructions with analytically predicted answers.

Compact encoding: the clock is an ``M``-level register and a basis index is
``clock * 2^d + data`` for ``d`` data qubits.  Unary encoding: one qubit per
clock step (qubit ``k`` set means step ``k``), clock qubits leading, used for
the Pauli form only.

Families
--------
``janzing``          entry ``[f(A)]_{jj}`` with ``A = (W + W^dagger)/2``, ``W = sum_l T_l (x) V_l``
``walk-lm``          local measurement of ``A^m |0>`` on a flag copied mid-cycle
``cheby-ballistic``  local measurement of ``T_{T+1}(A)|0>``; exact ballistic transport
``peres``            entry of ``e^{-itA}`` for the perfect-transfer clock Hamiltonian
``hhl``              normalized local measurement of ``A'^{-1}|0>``, ``A = 1 - U e^{-1/T}``
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..access import Metadata, PauliAccess, SparseOracle, SuperSparseMatrix
from ..config import QUBIT_CAP, CapExceeded, dense_cap
from ..estimators.types import Target
from ..gates import Gate
from ..pauli import PauliOperator, decompose_gate, decompose_projector, embed
from ..polynomials import FunctionSpec, PolynomialSpec
from ..projector import Projector
from .circuit import Circuit, acceptance_probability, gate_column, statevector

FAMILIES = ("janzing", "walk-lm", "cheby-ballistic", "peres", "hhl")

Entries = dict  # (row, col) -> complex


# ---------------------------------------------------------------------------
# instance container


@dataclass(frozen=True, eq=False)
class ClockInstance:
    """One generated instance: matrix, target, function and predicted value."""

    family: str
    circuit: Circuit
    scale: float
    dim: int
    entries: tuple[tuple[int, int, complex], ...] = field(repr=False)
    function: FunctionSpec
    target: Target
    predicted: complex
    formula: str
    meta: Metadata
    info: dict = field(default_factory=dict)
    encoding: str = "compact"
    pauli: PauliAccess | None = field(default=None, repr=False)
    unary_target: Target | None = None
    g: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if not cmath.isfinite(self.predicted):
            raise ValueError("predicted value must be finite")
        if self.encoding not in ("compact", "unary"):
            raise ValueError("encoding must be compact or unary")
        if self.encoding == "unary" and self.pauli is None:
            raise CapExceeded("unary encoding exceeds the qubit cap for this circuit")

    # access forms ------------------------------------------------------------

    def oracle(self) -> SparseOracle:
        return _oracle_from_entries(self.dim, self.entries, self.meta)

    def supersparse(self) -> SuperSparseMatrix:
        return SuperSparseMatrix(self.dim, self.entries, self.meta)

    def dense(self) -> np.ndarray:
        if self.dim > dense_cap():
            raise CapExceeded(f"dimension {self.dim} exceeds the dense cap {dense_cap()}")
        d = np.zeros((self.dim, self.dim), dtype=complex)
        for i, j, v in self.entries:
            d[i, j] = v
        return d

    def access(self):
        """The access form selected by ``encoding``."""
        if self.encoding == "unary":
            return PauliAccess(self.pauli.operator, meta=self.pauli_meta())
        return self.oracle()

    def active_target(self) -> Target:
        return self.unary_target if self.encoding == "unary" else self.target

    @property
    def active_dim(self) -> int:
        return self.pauli.dim if self.encoding == "unary" else self.dim

    # serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        """Instance envelope; the payload is the family spec it rebuilds from."""
        unary = self.encoding == "unary"
        payload = {"family": self.family, "circuit": self.circuit.to_json(),
                   "encoding": self.encoding, "scale": self.scale}
        if self.family == "janzing":
            payload["m"] = self.function.m if self.function.kind == "monomial" else None
        meta = self.pauli_meta() if unary else self.meta
        return {
            "model": "pauli" if unary else "sparse",
            "N": self.active_dim,
            "payload": payload,
            "meta": meta.to_json(),
            "function": self.function.to_json(),
            "target": self.active_target().to_json(),
            "predicted": {"re": self.predicted.real, "im": self.predicted.imag},
            "formula": self.formula,
            "g": self.g,
            "eps": self.eps,
            "info": _jsonable(self.info),
        }

    def pauli_meta(self) -> Metadata:
        # norms of the compact block do not carry over to invalid one-hot clock states
        return Metadata(pauli_norm=self.pauli.lam)

    @classmethod
    def from_json(cls, obj: dict, check: bool = False) -> "ClockInstance":
        """Rebuild from an envelope (or a bare payload); the stored ``predicted`` is kept.

        With ``check`` the rebuilt prediction must match the stored one exactly.
        """
        spec = obj.get("payload", obj)
        inst = build_instance(spec["family"], Circuit.from_json(spec["circuit"]),
                              scale=float(spec.get("scale", 1.0)),
                              encoding=spec.get("encoding", "compact"), m=spec.get("m"))
        stored = obj.get("predicted")
        if stored is not None:
            pred = complex(stored["re"], stored["im"])
            if check and pred != inst.predicted:
                raise ValueError("stored prediction differs from the rebuilt instance")
            inst = _replace(inst, predicted=pred)
        return inst


def _replace(inst: ClockInstance, **kw) -> ClockInstance:
    d = {f: getattr(inst, f) for f in inst.__dataclass_fields__}
    d.update(kw)
    return ClockInstance(**d)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# matrix assembly


def _transition_entries(transitions, n_data: int) -> Entries:
    """``sum w |b><a| (x) V`` over ``(a, b, gate, w)`` in the compact encoding."""
    D = 1 << n_data
    out: Entries = {}
    for a, b, gate, w in transitions:
        for col in range(D):
            for row, v in gate_column(gate, col, n_data):
                key = (b * D + row, a * D + col)
                out[key] = out.get(key, 0.0) + w * v
    return out


def _hermitian_part(w: Entries, factor: float) -> Entries:
    """``factor (W + W^dagger)``."""
    out: Entries = {}
    for (r, c), v in w.items():
        out[(r, c)] = out.get((r, c), 0.0) + factor * v
        out[(c, r)] = out.get((c, r), 0.0) + factor * np.conj(v)
    return out


def _finish(entries: Entries) -> tuple[tuple[int, int, complex], ...]:
    return tuple((r, c, complex(v)) for (r, c), v in sorted(entries.items()) if v != 0)


def _oracle_from_entries(dim: int, entries, meta: Metadata) -> SparseOracle:
    rows: dict[int, list[int]] = {}
    cols: dict[int, list[int]] = {}
    table: dict[tuple[int, int], complex] = {}
    for r, c, v in entries:
        rows.setdefault(r, []).append(c)
        cols.setdefault(c, []).append(r)
        table[(r, c)] = v
    s = max([len(x) for x in rows.values()] + [len(x) for x in cols.values()] + [1])

    def rn(i, k):
        lst = rows.get(i, ())
        return lst[k] if k < len(lst) else None

    def cn(l, j):
        lst = cols.get(j, ())
        return lst[l] if l < len(lst) else None

    return SparseOracle(dim, s, rn, cn, lambda i, j: table.get((i, j), 0j), meta)


def _declared(entries, op_norm: float | None = None, kappa: float | None = None) -> Metadata:
    colsum: dict[int, float] = {}
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for r, c, v in entries:
        colsum[c] = colsum.get(c, 0.0) + abs(v)
        rows[r] = rows.get(r, 0) + 1
        cols[c] = cols.get(c, 0) + 1
    s = max(list(rows.values()) + list(cols.values()) + [1])
    return Metadata(s=s, one_norm=max(colsum.values(), default=0.0), op_norm=op_norm, kappa=kappa)


def _unary_operator(transitions, n_clock: int, n_data: int, factor: float,
                    hermitian_sum: bool = True) -> PauliOperator | None:
    """Pauli form of ``factor (W + W^dagger)`` with a one-hot clock of ``n_clock`` qubits."""
    n = n_clock + n_data
    if n > QUBIT_CAP:
        return None
    hop = decompose_projector(0b01, 0b10, 2)
    w = PauliOperator.zero(n)
    for a, b, gate, wt in transitions:
        clock = embed(hop, [a, b], n)
        data = decompose_gate(gate.shifted(n_clock), n)
        w = w + (clock @ data).scale(wt)
    out = (w + w.adjoint()).scale(factor) if hermitian_sum else w.scale(factor)
    return out


def _unary_start(n_clock: int, n_data: int, data: int = 0) -> int:
    return (1 << (n_clock + n_data - 1)) | data


# ---------------------------------------------------------------------------
# spectral helpers


def theta_plus(M: int) -> np.ndarray:
    return np.cos(2.0 * np.pi * np.arange(M) / M)


def theta_minus(M: int) -> np.ndarray:
    return np.cos(np.pi * (2 * np.arange(M) + 1) / M)


def janzing_E0(M: int, m: int) -> float:
    """``E_0 = (1/M)(1 + 2 sum_{l=1}^{(M-1)/2} cos(2 pi l / M)^m)``."""
    ls = np.arange(1, (M - 1) // 2 + 1)
    return float((1.0 + 2.0 * np.sum(np.cos(2.0 * np.pi * ls / M) ** m)) / M)


def cycle_power_sum(M: int, k: int) -> Fraction:
    """Exact ``(1/M) sum_{l<M} cos(2 pi l / M)^k = 2^-k sum_{j : M | 2j-k} C(k, j)``."""
    total = sum(math.comb(k, j) for j in range(k + 1) if (2 * j - k) % M == 0)
    return Fraction(total, 1 << k)


def hardness_criterion(f: PolynomialSpec | FunctionSpec, M: int):
    """``(1/M)|f^o(1) + 2 sum_{l=1}^{(M-1)/2} f^o(cos(2 pi l/M))|`` for the odd part ``f^o``.

    By the symmetry ``l -> M - l`` this is ``|(1/M) sum_{l<M} f^o(theta_l)|``,
    which the exact power sums turn into a rational number when ``f`` has
    exact coefficients (a float otherwise).
    """
    if M < 3 or M % 2 == 0:
        raise ValueError("M must be odd and at least 3")
    if isinstance(f, FunctionSpec):
        f = f.polynomial()
    odd = f.odd_part()
    if odd.is_exact:
        val = sum((Fraction(c) * cycle_power_sum(M, k) for k, c in enumerate(odd.coefficients) if c),
                  Fraction(0))
        return abs(val)
    val = sum(complex(c) * float(cycle_power_sum(M, k)) for k, c in enumerate(odd.coefficients) if c)
    return abs(val)


def spectral_diagonal(f: FunctionSpec, M: int, p1: float, scale: float = 1.0) -> complex:
    """``[f(sA)]_{jj}`` for the Janzing matrix from its clock spectrum.

    The start state splits into the ``+1`` (weight ``1 - p1``) and ``-1``
    (weight ``p1``) eigenspaces of ``C^dagger Z C``; on them ``A`` has the
    uniform spectra ``cos(2 pi l/M)`` and ``cos(pi(2l+1)/M)`` respectively.
    """
    plus = np.mean(np.asarray(f.scalar(scale * theta_plus(M)), dtype=complex))
    minus = np.mean(np.asarray(f.scalar(scale * theta_minus(M)), dtype=complex))
    return complex((1.0 - p1) * plus + p1 * minus)


# ---------------------------------------------------------------------------
# clock walk (walk-lm family)


def walk_chain(M: int) -> np.ndarray:
    """Transition matrix of the walk induced by ``A = (W + W^dagger)/2`` on the ``M``-cycle."""
    P = np.zeros((M, M))
    for l in range(M):
        P[(l + 1) % M, l] += 0.5
        P[(l - 1) % M, l] += 0.5
    return P


def walk_distribution(M: int, m: int, start: int = 0) -> list[Fraction]:
    """Exact ``p_m`` after ``m`` steps of the half/half walk on the ``M``-cycle."""
    p = [Fraction(0)] * M
    p[start] = Fraction(1)
    half = Fraction(1, 2)
    for _ in range(m):
        q = [Fraction(0)] * M
        for l, v in enumerate(p):
            if v:
                q[(l + 1) % M] += half * v
                q[(l - 1) % M] += half * v
        p = q
    return p


def mixing_distance(M: int, m: int) -> Fraction:
    """``||p_m - u||_1`` exactly."""
    u = Fraction(1, M)
    return sum((abs(v - u) for v in walk_distribution(M, m)), Fraction(0))


def mixing_bound(M: int, m: int) -> float:
    """``(1/2) exp(-pi^2 m / (2 M^2))``."""
    return 0.5 * math.exp(-math.pi ** 2 * m / (2.0 * M * M))


def mixing_constant(target: float = 1e-2) -> float:
    """Smallest ``c`` with ``mixing_bound(M, c M^2) <= target``, rounded up to a whole number."""
    return float(math.ceil(2.0 * math.log(0.5 / target) / math.pi ** 2))


# ---------------------------------------------------------------------------
# constructions


def _check_T(c: Circuit) -> None:
    if c.r + 1 > QUBIT_CAP:
        raise CapExceeded(f"{c.r} circuit qubits exceed the cap")


def janzing_entry_instance(c: Circuit, f: FunctionSpec | None = None, scale: float = 1.0,
                           encoding: str = "compact") -> ClockInstance:
    """``scale * A`` with ``A = (W + W^dagger)/2`` and ``M = 2T + 1`` clock steps.

    ``V_0..V_{M-1}`` are ``U_1..U_T``, ``Z`` on the output qubit, ``U_T..U_1``,
    so one trip round the clock applies ``C^dagger Z C``.  The target is the
    diagonal entry at clock 0 with data ``|0...0>``.
    """
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    _check_T(c)
    T, r = c.T, c.r
    M = 2 * T + 1
    f = f or FunctionSpec.monomial(M ** 3)
    seq = list(c.gates) + [Gate("Z", (0,))] + list(c.inverse_gates())
    trans = [(l, (l + 1) % M, g, 1.0) for l, g in enumerate(seq)]
    entries = _finish(_hermitian_part(_transition_entries(trans, r), 0.5 * scale))
    p1 = acceptance_probability(c)
    pred = spectral_diagonal(f, M, p1, scale)
    if f.kind == "monomial" and f.m % 2 == 1:
        formula = "(1-2|a1|^2) E0 scale^m"
        pred = complex((1.0 - 2.0 * p1) * janzing_E0(M, f.m) * scale ** f.m)
    elif f.kind == "chebyshev" and f.m == M and scale == 1.0:
        formula = "(1-2|a1|^2) T_M(theta+) with T_M(theta+) = 1"
        pred = complex(1.0 - 2.0 * p1)
    else:
        formula = "(1-p1) mean f(s theta+) + p1 mean f(s theta-)"
    pauli = None
    unary_target = None
    op = _unary_operator(trans, M, r, 0.5 * scale)
    if op is not None:
        pauli = PauliAccess(op)
        j = _unary_start(M, r)
        unary_target = Target.entry(j, j)
    info = {"T": T, "M": M, "alpha1_sq": p1, "E0": janzing_E0(M, f.m) if f.kind == "monomial" else None}
    return ClockInstance("janzing", c, scale, M << r, entries, f, Target.entry(0, 0), pred, formula,
                         _declared(entries, op_norm=scale), info, encoding, pauli, unary_target,
                         g=0.0, eps=1.0 / (4 * M))


def monomial_walk_lm_instance(c: Circuit, c_mix: float | None = None,
                              encoding: str = "compact") -> ClockInstance:
    """Walk instance with ``M = 3(T+1)`` steps and ``m = ceil(c M^2)``.

    Data register: flag qubit 0 plus the circuit on qubits ``1..r``.  Steps:
    ``U_1..U_T``, CNOT(1 -> flag), ``T + 1`` idle steps, CNOT(1 -> flag),
    ``U_T..U_1``.  The cycle product is the identity, so ``A^m |0>`` spreads
    over the clock with the walk probabilities ``p_m(l)`` and the flag reads 1
    with probability ``|alpha_1|^2`` exactly on the ``T + 2`` steps between the CNOTs.
    """
    _check_T(c)
    T, r = c.T, c.r
    M = 3 * (T + 1)
    c_mix = mixing_constant() if c_mix is None else c_mix
    m = math.ceil(c_mix * M * M)
    body = [g.shifted(1) for g in c.gates]
    seq = body + [Gate("CNOT", (1, 0))] + [Gate("I", (0,))] * (T + 1) + [Gate("CNOT", (1, 0))] \
        + list(reversed(body))
    assert len(seq) == M
    trans = [(l, (l + 1) % M, g, 1.0) for l, g in enumerate(seq)]
    entries = _finish(_hermitian_part(_transition_entries(trans, r + 1), 0.5))
    p1 = acceptance_probability(c)
    p = walk_distribution(M, m)
    window = sum((p[l] ** 2 for l in range(T + 1, 2 * T + 3)), Fraction(0))
    total = sum((v ** 2 for v in p), Fraction(0))
    pred = p1 * float(window)
    proj = Projector.bit(r, 1)
    pauli, unary_target = None, None
    op = _unary_operator(trans, M, r + 1, 0.5)
    if op is not None:
        pauli = PauliAccess(op)
        unary_target = Target.lm(_unary_start(M, r + 1), proj)
    info = {"T": T, "M": M, "m": m, "c": c_mix, "alpha1_sq": p1,
            "window_sum_p2": float(window), "sum_p2": float(total),
            "normalized_predicted": p1 * float(window / total)}
    return ClockInstance("walk-lm", c, 1.0, M << (r + 1), entries, FunctionSpec.monomial(m),
                         Target.lm(0, proj), complex(pred), "|a1|^2 sum_{T+1<=l<=2T+2} p_m(l)^2",
                         _declared(entries, op_norm=1.0), info, encoding, pauli, unary_target)


def chebyshev_ballistic_instance(c: Circuit, encoding: str = "compact") -> ClockInstance:
    """``T_{T+1}(A)`` on the ``M = 2T + 2`` clock: ``U_1..U_T``, CNOT, CNOT, ``U_T..U_1``.

    ``W`` is unitary, ``T_k(A) = (W^k + W^-k)/2`` and both halves land on clock
    ``T + 1`` with data ``CNOT C|0>``, so the output state is normalized and
    its flag reads 1 with probability ``|alpha_1|^2``.
    """
    _check_T(c)
    T, r = c.T, c.r
    M = 2 * T + 2
    body = [g.shifted(1) for g in c.gates]
    seq = body + [Gate("CNOT", (1, 0)), Gate("CNOT", (1, 0))] + list(reversed(body))
    trans = [(l, (l + 1) % M, g, 1.0) for l, g in enumerate(seq)]
    entries = _finish(_hermitian_part(_transition_entries(trans, r + 1), 0.5))
    p1 = acceptance_probability(c)
    proj = Projector.bit(r, 1)
    pauli, unary_target = None, None
    op = _unary_operator(trans, M, r + 1, 0.5)
    if op is not None:
        pauli = PauliAccess(op)
        unary_target = Target.lm(_unary_start(M, r + 1), proj)
    info = {"T": T, "M": M, "alpha1_sq": p1, "normalized_predicted": p1}
    return ClockInstance("cheby-ballistic", c, 1.0, M << (r + 1), entries,
                         FunctionSpec.chebyshev(T + 1), Target.lm(0, proj), complex(p1),
                         "|a1|^2", _declared(entries, op_norm=1.0), info, encoding, pauli,
                         unary_target)


def peres_weights(tau: int) -> list[float]:
    return [math.sqrt(j * (tau + 1 - j)) / (4.0 * tau) for j in range(1, tau + 1)]


def peres_amplitudes(t: float, tau: int) -> tuple[complex, complex]:
    """Clock amplitudes of ``e^{-itA}|step_0>`` on steps 0 and ``tau``: ``cos^tau``, ``(-i sin)^tau``."""
    a = t / (4.0 * tau)
    return complex(math.cos(a) ** tau), complex((-1j * math.sin(a)) ** tau)


def peres_amplitudes_stated(t: float, tau: int) -> tuple[complex, complex]:
    """The closed forms as commonly written: ``cos(t/4tau)^tau`` and ``(i sin(t/4tau))^tau``."""
    a = t / (4.0 * tau)
    return complex(math.cos(a) ** tau), complex((1j * math.sin(a)) ** tau)


def peres_timeevo_instance(c: Circuit, scale: float = 1.0, encoding: str = "compact") -> ClockInstance:
    """Clock Hamiltonian for ``C' = C^dagger CNOT(out -> anc) C`` with ``tau = 2T + 1`` steps.

    ``A = (1/4 tau) sum_j sqrt(j(tau+1-j)) (T_j (x) V_j + h.c.)`` is ``J_x / (2 tau)``
    on the clock, so ``e^{-i 2 pi tau A}`` moves step 0 to step ``tau`` with
    amplitude ``(-i)^tau``.  The target entry is ``<step_tau, anc=1, 0|e^{-itA}|step_0, 0>``
    with ``t = 2 pi tau / scale`` on ``scale * A``.
    """
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    _check_T(c)
    T, r = c.T, c.r
    tau = 2 * T + 1
    body = [g.shifted(1) for g in c.gates]
    seq = body + [Gate("CNOT", (1, 0))] + list(reversed(body))
    w = peres_weights(tau)
    trans = [(j - 1, j, seq[j - 1], w[j - 1]) for j in range(1, tau + 1)]
    entries = _finish(_hermitian_part(_transition_entries(trans, r + 1), scale))
    D = 1 << (r + 1)
    k = tau * D + (1 << r)
    t = 2.0 * math.pi * tau / scale
    amp = statevector(Circuit(r + 1, tuple(seq)))[1 << r]
    p1 = acceptance_probability(c)
    pred = (-1j) ** tau * amp
    pauli, unary_target = None, None
    op = _unary_operator(trans, tau + 1, r + 1, scale)
    if op is not None:
        pauli = PauliAccess(op)
        n = tau + 1 + r + 1
        unary_target = Target.entry((1 << (n - 1 - tau)) | (1 << r), _unary_start(tau + 1, r + 1))
    c0, ct = peres_amplitudes(2.0 * math.pi * tau, tau)
    s0, st = peres_amplitudes_stated(2.0 * math.pi * tau, tau)
    info = {"T": T, "tau": tau, "t": t, "alpha1_sq": p1, "alpha1_abs": math.sqrt(p1),
            "stated_prediction_abs": math.sqrt(p1), "c0": c0, "c_tau": ct,
            "c_tau_stated": st}
    return ClockInstance("peres", c, scale, (tau + 1) * D, entries, FunctionSpec.timeevo(-t),
                         Target.entry(k, 0), complex(pred), "(-i)^tau <anc=1,0|C'|0,0> = (-i)^tau |a1|^2",
                         _declared(entries, op_norm=0.25 * scale), info, encoding, pauli,
                         unary_target)


def hhl_constants(T: int) -> dict:
    """Closed forms for the inverse construction with idle length ``T`` (cycle ``3T``)."""
    e = math.e
    g2 = math.exp(-2.0 / T)
    return {
        "normalized_factor": math.exp(-2) * (1 - math.exp(-2)) / (1 - math.exp(-6)),
        "normalized_factor_stated": math.exp(-2) / (1 - math.exp(-2) - math.exp(-4)),
        "lm_factor": (e ** 3 / (e ** 3 - 1)) ** 2 * math.exp(-2) * (1 - math.exp(-2)) / (1 - g2),
        "inverse_norm": (e ** 3 / (e ** 3 - 1)) * math.sqrt((1 - math.exp(-6)) / (1 - g2)),
    }


def hhl_inverse_instance(c: Circuit, encoding: str = "compact") -> ClockInstance:
    """``A = 1 - U e^{-1/T}`` on a ``3T``-step cycle, symmetrized as ``A'/2``.

    The circuit is extended by CNOT(out -> flag), giving ``T = T_c + 1`` compute
    steps; the cycle is compute, ``T - 1`` idle steps, uncompute, one idle step,
    so the flag is set on exactly ``T`` clock positions.  ``A' = [[0, A], [A^dagger, 0]]``
    and ``(A'/2)^{-1}|0>`` equals ``2 A^{-1}|0>`` in the second block.
    """
    if encoding != "compact":
        raise ValueError("the inverse construction has a compact encoding only")
    _check_T(c)
    r = c.r
    body = [g.shifted(1) for g in c.gates] + [Gate("CNOT", (1, 0))]
    T = len(body)
    L = 3 * T
    seq = body + [Gate("I", (0,))] * (T - 1) + list(reversed(body)) + [Gate("I", (0,))]
    assert len(seq) == L
    gamma = math.exp(-1.0 / T)
    u = _transition_entries([(l, (l + 1) % L, g, 1.0) for l, g in enumerate(seq)], r + 1)
    N = L << (r + 1)
    a: Entries = {(k, k): 1.0 for k in range(N)}
    for key, v in u.items():
        a[key] = a.get(key, 0.0) - gamma * v
    big: Entries = {}
    for (row, col), v in a.items():
        big[(row, N + col)] = 0.5 * v
        big[(N + col, row)] = 0.5 * np.conj(v)
    entries = _finish(big)
    p1 = acceptance_probability(c)
    k = hhl_constants(T)
    kappa = (1 + gamma) / (1 - gamma)
    proj = Projector.bit(r, 1)
    info = {"T_circuit": c.T, "T": T, "cycle": L, "gamma": gamma, "alpha1_sq": p1,
            "stated_prediction": p1 * k["normalized_factor_stated"],
            "lm_A": p1 * k["lm_factor"], "lm_instance": 4.0 * p1 * k["lm_factor"],
            "inverse_norm_A": k["inverse_norm"], "kappa": kappa}
    return ClockInstance("hhl", c, 1.0, 2 * N, entries, FunctionSpec.inverse(kappa),
                         Target.nlm(0, proj), complex(p1 * k["normalized_factor"]),
                         "|a1|^2 e^-2 (1-e^-2) / (1-e^-6)",
                         _declared(entries, op_norm=(1 + gamma) / 2, kappa=kappa), info, encoding)


def build_instance(family: str, c: Circuit, scale: float = 1.0, encoding: str = "compact",
                   m: int | None = None) -> ClockInstance:
    """Dispatch on the family tag."""
    if family == "janzing":
        f = FunctionSpec.monomial(m) if m is not None else None
        return janzing_entry_instance(c, f, scale, encoding)
    if family == "walk-lm":
        return monomial_walk_lm_instance(c, encoding=encoding)
    if family == "cheby-ballistic":
        return chebyshev_ballistic_instance(c, encoding)
    if family == "peres":
        return peres_timeevo_instance(c, scale, encoding)
    if family == "hhl":
        return hhl_inverse_instance(c, encoding)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def predicted_dense_value(inst: ClockInstance, d: np.ndarray | None = None):
    """Quantity the prediction refers to, from the dense oracle."""
    from .. import dense as oracle

    d = inst.dense() if d is None else d
    f = inst.function
    tgt = inst.target
    if inst.family == "hhl":
        return oracle.exact_normalized_lm(d, lambda x: 1.0 / x, tgt.i, tgt.projector)
    fn = f.scalar
    if tgt.kind == "entry":
        return oracle.exact_entry(d, fn, tgt.i, tgt.j)
    if tgt.kind == "lm":
        return oracle.exact_lm(d, fn, tgt.i, tgt.projector)
    return oracle.exact_normalized_lm(d, fn, tgt.i, tgt.projector)


__all__: Sequence[str] = (
    "ClockInstance", "FAMILIES", "build_instance", "chebyshev_ballistic_instance",
    "cycle_power_sum", "hardness_criterion", "hhl_constants", "hhl_inverse_instance",
    "janzing_E0", "janzing_entry_instance", "mixing_bound", "mixing_constant",
    "mixing_distance", "monomial_walk_lm_instance", "peres_amplitudes",
    "peres_amplitudes_stated", "peres_timeevo_instance", "peres_weights",
    "predicted_dense_value", "spectral_diagonal", "theta_minus", "theta_plus",
    "walk_chain", "walk_distribution",
)
