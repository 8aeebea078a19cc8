"""Request and result types shared by every estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..polynomials import FunctionSpec, PolynomialSpec
from ..projector import Projector

ALGORITHMS = ("auto", "exact_path", "mc_sparse", "mc_pauli", "supersparse_cb",
              "supersparse_pauli", "sketch", "norm_decay")


class HardRegime(RuntimeError):
    """No classical algorithm applies; the message names the matching regime."""


class PreconditionError(ValueError):
    """A declared precondition of an estimator does not hold."""


class Decision(str, Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Target:
    """``entry`` (i, j), ``lm`` (i) or ``nlm`` (i), with an optional projector."""

    kind: str
    i: int
    j: int | None = None
    projector: Projector = field(default_factory=Projector.first_half)

    def __post_init__(self):
        if self.kind not in ("entry", "lm", "nlm"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "entry" and self.j is None:
            raise ValueError("entry target needs both indices")

    @classmethod
    def entry(cls, i: int, j: int) -> "Target":
        return cls("entry", i, j)

    @classmethod
    def lm(cls, i: int, projector: Projector | None = None) -> "Target":
        return cls("lm", i, None, projector or Projector.first_half())

    @classmethod
    def nlm(cls, i: int, projector: Projector | None = None) -> "Target":
        return cls("nlm", i, None, projector or Projector.first_half())

    @classmethod
    def parse(cls, text: str, projector: Projector | None = None) -> "Target":
        """``entry:i,j`` | ``lm:i`` | ``nlm:i``."""
        kind, _, rest = text.partition(":")
        parts = [int(p) for p in rest.split(",") if p.strip()]
        if kind == "entry":
            if len(parts) != 2:
                raise ValueError("entry target needs two indices: entry:i,j")
            return cls.entry(*parts)
        if kind in ("lm", "nlm"):
            if len(parts) != 1:
                raise ValueError(f"{kind} target needs one index: {kind}:i")
            return cls(kind, parts[0], None, projector or Projector.first_half())
        raise ValueError(f"unknown target {text!r}")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "i": self.i}
        if self.j is not None:
            out["j"] = self.j
        out["projector"] = self.projector.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Target":
        return cls(obj["kind"], int(obj["i"]), obj.get("j"), Projector.from_json(obj.get("projector")))


@dataclass(frozen=True)
class EstimateRequest:
    target: Target
    function: FunctionSpec | PolynomialSpec
    eps: float = 0.05
    delta: float = 0.05
    g: float | None = None
    seed: int = 0
    algorithm: str = "auto"
    workers: int = 1
    eta: float | None = None
    timeevo_branch: str = "auto"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class Estimate:
    """Estimated value with its claimed additive error bound."""

    value: complex
    half_width: float
    samples_used: int
    algorithm: str
    wall_time: float = 0.0
    decision: Decision | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.value = complex(self.value)
        if not (self.half_width >= 0 or math.isinf(self.half_width)):
            raise ValueError("half_width must be non-negative")

    def to_json(self, include_time: bool = False) -> dict:
        out = {"value": {"re": self.value.real, "im": self.value.imag},
               "half_width": self.half_width, "samples": self.samples_used,
               "algorithm": self.algorithm}
        if self.decision is not None:
            out["decision"] = self.decision.value
        if include_time:
            out["wall_time"] = self.wall_time
        return out


def decide(e: Estimate, g: float, eps: float | None = None) -> Decision:
    """YES if the whole interval lies at or above ``g``, NO if at or below, else UNDECIDED.

    Only the real part is compared (the decision problems concern real values).
    ``eps`` is accepted for symmetry with the promise-gap notation; the test
    uses the estimate's own half-width.
    """
    v = e.value.real
    if v - e.half_width >= g:
        return Decision.YES
    if v + e.half_width <= g:
        return Decision.NO
    return Decision.UNDECIDED
