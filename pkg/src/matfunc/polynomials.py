"""Scalar function families and their polynomial representations.

A :class:`PolynomialSpec` stores monomial coefficients ``alpha_0 .. alpha_m``.
Coefficients are kept exact (``int`` / ``Fraction``) whenever the construction
allows it, because the inverse approximation and high-degree Chebyshev
polynomials have monomial coefficients far beyond double precision.  For
numerical evaluation a PolynomialSpec converts itself once to the Chebyshev basis and
uses Clenshaw's recurrence, which is stable on ``[-1, 1]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Sequence

import numpy as np

from .config import DEGREE_CAP, CapExceeded

EXACT_CHEBYSHEV_DEGREE = 40
GRID_POINTS = 10_000


class ConditioningWarning(UserWarning):
    """Monomial coefficients were rounded from a badly conditioned conversion."""


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


def _to_complex(c) -> complex:
    if isinstance(c, Fraction):
        return complex(float(c))
    return complex(c)


@lru_cache(maxsize=None)
def _chebyshev_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Integer monomial coefficients of ``T_0 .. T_m``."""
    rows = [(1,), (0, 1)]
    for n in range(1, m):
        prev, cur = rows[n - 1], rows[n]
        nxt = [0] * (n + 2)
        for k, c in enumerate(cur):
            nxt[k + 1] += 2 * c
        for k, c in enumerate(prev):
            nxt[k] -= c
        rows.append(tuple(nxt))
    return tuple(rows[: m + 1])


def _exact_parts(c) -> tuple[Fraction, Fraction]:
    if _is_exact(c):
        return Fraction(c), Fraction(0)
    z = complex(c)
    return Fraction(z.real), Fraction(z.imag)


def monomial_to_chebyshev(coeffs: Sequence) -> list[complex]:
    """Chebyshev coefficients of ``sum alpha_k x^k`` (exact, then rounded).

    Uses ``x^k = 2^{1-k} sum_j C(k, j) T_{|k-2j|}`` with half weight on ``T_0``.
    Float inputs are converted to their exact binary fractions first.
    """
    m = len(coeffs) - 1
    re = [Fraction(0)] * (m + 1)
    im = [Fraction(0)] * (m + 1)
    for k, c in enumerate(coeffs):
        cr, ci = _exact_parts(c)
        if cr == 0 and ci == 0:
            continue
        denom = Fraction(1, 1 << k)
        for j in range(k // 2 + 1):
            w = math.comb(k, j) * denom
            d = k - 2 * j
            if d > 0:
                w = 2 * w
            re[d] += cr * w
            im[d] += ci * w
    return [complex(float(a), float(b)) for a, b in zip(re, im)]


def clenshaw(cheb: np.ndarray, x):
    """Evaluate ``sum c_k T_k(x)`` for scalar or array ``x``."""
    x = np.asarray(x, dtype=complex)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for c in cheb[:0:-1]:
        b1, b2 = c + 2.0 * x * b1 - b2, b1
    return cheb[0] + x * b1 - b2


@dataclass(frozen=True)
class PolynomialSpec:
    """``f(x) = sum_r alpha_r x^r`` in the monomial basis.

    ``cheb`` optionally supplies the Chebyshev-basis coefficients when the
    construction produced them directly; otherwise they are derived on demand.
    """

    coefficients: tuple
    cheb: tuple | None = field(default=None, compare=False, repr=False)
    label: str = field(default="", compare=False)
    certified_error: float | None = field(default=None, compare=False)

    def __post_init__(self):
        coeffs = list(self.coefficients)
        if not coeffs:
            coeffs = [0]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        for c in coeffs:
            if not isinstance(c, Number):
                raise TypeError(f"coefficient {c!r} is not a number")
        object.__setattr__(self, "coefficients", tuple(coeffs))
        if self.cheb is not None:
            cheb = list(self.cheb)
            while len(cheb) > len(coeffs):
                cheb.pop()
            object.__setattr__(self, "cheb", tuple(complex(c) for c in cheb))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coefficients)

    def alphas(self) -> np.ndarray:
        """Monomial coefficients as complex floats (may overflow to inf for huge degree)."""
        return np.array([_to_complex(c) for c in self.coefficients], dtype=complex)

    def chebyshev_coefficients(self) -> np.ndarray:
        if self.cheb is None:
            object.__setattr__(self, "cheb", tuple(monomial_to_chebyshev(self.coefficients)))
        return np.array(self.cheb, dtype=complex)

    def __call__(self, x):
        return eval_scalar(self, x)

    def is_real(self) -> bool:
        return all(_to_complex(c).imag == 0 for c in self.coefficients)

    def odd_part(self) -> "PolynomialSpec":
        return PolynomialSpec(tuple(c if k % 2 else 0 for k, c in enumerate(self.coefficients)))

    def conj(self) -> "PolynomialSpec":
        if self.is_real():
            return self
        cheb = None if self.cheb is None else tuple(np.conj(self.cheb))
        return PolynomialSpec(tuple(_to_complex(c).conjugate() for c in self.coefficients),
                              cheb, self.label)

    def times(self, other: "PolynomialSpec") -> "PolynomialSpec":
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return PolynomialSpec(tuple(out))

    def to_json(self) -> dict:
        cs = [_to_complex(c) for c in self.coefficients]
        return {"coefficients": [[c.real, c.imag] for c in cs]}

    @classmethod
    def from_json(cls, obj: dict) -> "PolynomialSpec":
        return cls(tuple(complex(re, im) if im else float(re) for re, im in obj["coefficients"]))


def monomial(m: int, scale=1) -> PolynomialSpec:
    if m < 0:
        raise ValueError("degree must be non-negative")
    return PolynomialSpec(tuple([0] * m + [scale]), label=f"x^{m}")


def chebyshev_poly(m: int) -> PolynomialSpec:
    """Exact integer coefficients of ``T_m`` from the three-term recurrence."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    if m + 1 > DEGREE_CAP:
        raise CapExceeded(f"degree {m} exceeds the cap")
    cheb = [0.0] * m + [1.0]
    return PolynomialSpec(_chebyshev_table(m)[m], tuple(cheb), f"T_{m}")


def eval_scalar(p: PolynomialSpec, x):
    """Evaluate ``p`` at scalar or array ``x``.

    Low-degree exact polynomials use Horner on complex floats; otherwise the
    Chebyshev form is evaluated with Clenshaw, which is the stable choice when
    monomial coefficients are large.
    """
    scalar = np.ndim(x) == 0
    if p.degree <= 12 and p.cheb is None:
        xs = np.asarray(x, dtype=complex)
        acc = np.zeros_like(xs)
        for c in reversed(p.coefficients):
            acc = acc * xs + _to_complex(c)
    else:
        acc = clenshaw(p.chebyshev_coefficients(), x)
    return complex(acc) if scalar else acc


def l1_rescaled_norm(p: PolynomialSpec, b: float) -> float:
    """``sum_r |alpha_r b^r|`` (exact sum, rounded once)."""
    if b < 0:
        raise ValueError("b must be non-negative")
    if p.is_exact and isinstance(b, (int, Fraction)):
        return float(sum(abs(Fraction(c)) * Fraction(b) ** r for r, c in enumerate(p.coefficients)))
    return math.fsum(abs(_to_complex(c)) * float(b) ** r for r, c in enumerate(p.coefficients))


def grid_error(p: PolynomialSpec, f, domain: Sequence[tuple[float, float]],
               points: int = GRID_POINTS) -> float:
    """Max ``|p(x) - f(x)|`` over ``points`` grid points split across ``domain``."""
    per = max(2, points // len(domain))
    xs = np.concatenate([np.linspace(a, b, per) for a, b in domain])
    return float(np.max(np.abs(eval_scalar(p, xs) - f(xs))))


def inverse_poly(kappa: float, eps: float, degree_cap: int = DEGREE_CAP) -> PolynomialSpec:
    """``g(x) = (1 - (1 - x^2)^b) / x`` with ``b = ceil(kappa^2 ln(kappa / eps))``.

    ``g`` is odd of degree ``2b - 1``; its coefficients are the signed binomials
    ``(-1)^{i+1} C(b, i)`` on ``x^{2i-1}``.  The returned spec carries the max
    error against ``1/x`` measured on a grid over ``[-1, -1/kappa] u [1/kappa, 1]``.
    """
    if not kappa > 1:
        raise ValueError("kappa must exceed 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    b = math.ceil(kappa * kappa * math.log(kappa / eps))
    b = max(b, 1)
    if 2 * b > degree_cap:
        raise CapExceeded(f"inverse approximation needs {2 * b} coefficients (cap {degree_cap})")
    coeffs = [0] * (2 * b)
    for i in range(1, b + 1):
        coeffs[2 * i - 1] = (-1) ** (i + 1) * math.comb(b, i)
    p = PolynomialSpec(tuple(coeffs), label=f"inv[kappa={kappa:g},eps={eps:g},b={b}]")
    lo = 1.0 / kappa
    err = grid_error(p, lambda x: 1.0 / x, [(-1.0, -lo), (lo, 1.0)])
    return PolynomialSpec(p.coefficients, p.cheb, p.label, err)


def inverse_exponent(kappa: float, eps: float) -> int:
    return max(1, math.ceil(kappa * kappa * math.log(kappa / eps)))


# ---------------------------------------------------------------------------
# Bessel functions and the Anger-Jacobi expansion


def bessel_j(k: int, x: float) -> float:
    """``J_k(x)`` from its power series, summed in exact rational arithmetic.

    Terms ``(-1)^m (x/2)^{2m+k} / (m! (m+k)!)`` are accumulated exactly and the
    sum is rounded once, so the alternating cancellation at ``|x|`` up to 20
    costs no precision.  Summation stops once the terms have decreased below
    ``1e-40`` relative to the running magnitude scale.
    """
    if k < 0 or int(k) != k:
        raise ValueError("order must be a non-negative integer")
    k = int(k)
    if x == 0:
        return 1.0 if k == 0 else 0.0
    h = Fraction(x) / 2
    h2 = h * h
    term = h**k / math.factorial(k)
    total = term
    biggest = abs(term)
    m = 0
    while True:
        m += 1
        term = -term * h2 / (m * (m + k))
        total += term
        a = abs(term)
        if a > biggest:
            biggest = a
        if m > h2 and a < biggest * Fraction(1, 10**40) + Fraction(1, 10**300):
            break
    return float(total)


def anger_jacobi_order(t: float, eps: float) -> int:
    """Smallest ``R`` whose explicit tail bound ``sum_{k>R} 2 (|t|/2)^k / k!`` is at most ``2 eps``."""
    a = abs(t) / 2.0
    r = 0
    while True:
        # tail after r: sum_{k>r} 2 a^k/k!, summed until terms are negligible
        tail = 0.0
        term = a ** (r + 1) / math.factorial(r + 1) if r + 1 < 170 else 0.0
        k = r + 1
        while term > 0 and (term > 1e-18 * max(tail, 1e-300) or k <= 2 * a + 2):
            tail += 2.0 * term
            k += 1
            term = term * a / k
        if tail <= 2.0 * eps:
            return r
        r += 1


def anger_jacobi_poly(t: float, eps: float) -> PolynomialSpec:
    """Truncated ``e^{ixt} ~ J_0(t) + 2 sum_{k=1}^R i^k J_k(t) T_k(x)``.

    The spec carries the Chebyshev coefficients directly; the monomial
    coefficients come from the integer Chebyshev table (exact up to degree 40,
    floating beyond with a conditioning warning).
    """
    if t == 0:
        raise ValueError("t = 0 is the identity function; handle it in the caller")
    if not 0 < eps < 1 / math.e:
        raise ValueError("eps must lie in (0, 1/e)")
    r = anger_jacobi_order(t, eps)
    if r + 1 > DEGREE_CAP:
        raise CapExceeded("Anger-Jacobi degree exceeds the cap")
    cheb = [complex(bessel_j(0, t))]
    for k in range(1, r + 1):
        cheb.append(2.0 * (1j**k) * bessel_j(k, t))
    table = _chebyshev_table(max(r, 1))
    mono = [0j] * (r + 1)
    for k, c in enumerate(cheb):
        for d, coef in enumerate(table[k]):
            if coef:
                mono[d] += c * coef
    if r > EXACT_CHEBYSHEV_DEGREE:
        warnings.warn(f"monomial form of degree {r} is badly conditioned (coefficients up to 4^{r})",
                      ConditioningWarning, stacklevel=2)
    p = PolynomialSpec(tuple(mono), tuple(cheb), f"anger_jacobi[t={t:g},eps={eps:g},R={r}]")
    err = grid_error(p, lambda x: np.exp(1j * x * t), [(-1.0, 1.0)])
    return PolynomialSpec(p.coefficients, p.cheb, p.label, err)


# ---------------------------------------------------------------------------
# Taylor fragments for time evolution


def taylor_fragment_spec(t: float, gamma: float, eps: float) -> tuple[int, int]:
    """Fragment count ``r`` and truncation order ``K`` for ``e^{iAt} = (e^{iAt/r})^r``.

    ``r = ceil(gamma |t| / ln 2)`` and ``K`` is the smallest order with
    ``r (t_hat/r)^{K+1} / (K+1)! e^{t_hat/r} <= eps`` where ``t_hat = gamma |t|``.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    that = gamma * abs(t)
    r = max(1, math.ceil(that / math.log(2.0)))
    return r, taylor_order(that, r, eps)


def taylor_remainder(that: float, r: int, k: int) -> float:
    x = that / r
    return r * x ** (k + 1) / math.factorial(k + 1) * math.exp(x)


def taylor_order(that: float, r: int, eps: float) -> int:
    k = 0
    while taylor_remainder(that, r, k) > eps:
        k += 1
    return k


def taylor_fragment_poly(t: float, r: int, k: int) -> PolynomialSpec:
    """``(sum_{j<=K} (i t x / r)^j / j!)^r`` expanded in the monomial basis."""
    base = PolynomialSpec(tuple((1j * t / r) ** j / math.factorial(j) for j in range(k + 1)))
    out = PolynomialSpec((1,))
    for _ in range(r):
        out = out.times(base)
    return out


# ---------------------------------------------------------------------------
# function families


KINDS = ("monomial", "chebyshev", "inverse", "timeevo")


@dataclass(frozen=True)
class FunctionSpec:
    """One of the four studied function families."""

    kind: str
    m: int | None = None
    t: float | None = None
    kappa: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind in ("monomial", "chebyshev"):
            if self.m is None or int(self.m) != self.m or self.m < 0:
                raise ValueError("monomial/chebyshev need an integer m >= 0")
        if self.kind == "inverse":
            if self.kappa is None or not self.kappa > 1:
                raise ValueError("inverse needs kappa > 1")
        if self.kind == "timeevo" and self.t is None:
            raise ValueError("timeevo needs t")
        if self.eps is not None and self.kind == "timeevo" and not 0 < self.eps < 1 / math.e:
            raise ValueError("timeevo eps must lie in (0, 1/e)")

    @classmethod
    def monomial(cls, m: int) -> "FunctionSpec":
        return cls("monomial", m=m)

    @classmethod
    def chebyshev(cls, m: int) -> "FunctionSpec":
        return cls("chebyshev", m=m)

    @classmethod
    def inverse(cls, kappa: float, eps: float | None = None) -> "FunctionSpec":
        return cls("inverse", kappa=kappa, eps=eps)

    @classmethod
    def timeevo(cls, t: float, eps: float | None = None) -> "FunctionSpec":
        return cls("timeevo", t=t, eps=eps)

    def scalar(self, x):
        """The exact scalar function (inverse is truncated at ``|x| < 1/kappa`` to 1/x there too)."""
        x = np.asarray(x)
        if self.kind == "monomial":
            return x.astype(complex) ** self.m
        if self.kind == "chebyshev":
            return chebyshev_value(self.m, x)
        if self.kind == "inverse":
            return 1.0 / x.astype(complex)
        return np.exp(1j * self.t * x.astype(complex))

    def polynomial(self, eps: float | None = None) -> PolynomialSpec:
        eps = eps if eps is not None else self.eps
        if self.kind == "monomial":
            return monomial(self.m)
        if self.kind == "chebyshev":
            return chebyshev_poly(self.m)
        if eps is None:
            raise ValueError(f"{self.kind} needs a precision to build its polynomial")
        if self.kind == "inverse":
            return inverse_poly(self.kappa, eps)
        if self.t == 0:
            return PolynomialSpec((1,))
        return anger_jacobi_poly(self.t, eps)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for k in ("m", "t", "kappa", "eps"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FunctionSpec":
        return cls(obj["kind"], obj.get("m"), obj.get("t"), obj.get("kappa"), obj.get("eps"))

    @classmethod
    def parse(cls, text: str) -> "FunctionSpec":
        """Parse ``monomial:m=5``, ``chebyshev:m=3``, ``inverse:kappa=2``, ``timeevo:t=1``."""
        kind, _, rest = text.partition(":")
        kw = {}
        for part in filter(None, rest.split(",")):
            key, _, val = part.partition("=")
            key = key.strip()
            if key == "m":
                kw["m"] = int(val)
            elif key in ("t", "kappa", "eps"):
                kw[key] = float(val)
            else:
                raise ValueError(f"unknown function parameter {key!r}")
        return cls(kind.strip(), **kw)


def chebyshev_value(m: int, x):
    """``T_m(x)`` through the recurrence (vectorized)."""
    x = np.asarray(x, dtype=complex)
    if m == 0:
        return np.ones_like(x)
    prev, cur = np.ones_like(x), x
    for _ in range(1, m):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur
