"""Instance envelopes: ``{"model", "N", "payload", "meta"}`` plus optional defaults.

Models
------
``sparse``       payload is a generator family spec (callables do not serialize)
``pauli``        payload is a Pauli operator ``{"n", "terms"}`` or a unary family spec
``supersparse``  payload is ``{"entries": [[i, j, re, im], ...]}``
``dense``        payload is ``{"re": [[...]], "im": [[...]]}`` (``im`` optional)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .access import Metadata, PauliAccess, SparseOracle, SuperSparseMatrix
from .clocks.instances import ClockInstance
from .config import CapExceeded, dense_cap
from .estimators.types import Target
from .pauli import PauliOperator, to_dense
from .polynomials import FunctionSpec

MODELS = ("sparse", "pauli", "supersparse", "dense")


@dataclass(frozen=True)
class LoadedInstance:
    """An access form plus whatever defaults the envelope carried."""

    model: str
    access: object
    target: Target | None = None
    function: FunctionSpec | None = None
    predicted: complex | None = None
    g: float | None = None
    clock: ClockInstance | None = None
    envelope: dict | None = None

    @property
    def dim(self) -> int:
        return self.access.dim

    def dense(self) -> np.ndarray:
        """Dense matrix for the oracle; raises :class:`CapExceeded` above the cap."""
        if self.dim > dense_cap():
            raise CapExceeded(f"dimension {self.dim} exceeds the dense cap {dense_cap()}")
        a = self.access
        if self.clock is not None and self.model == "sparse":
            return self.clock.dense()
        if isinstance(a, PauliAccess):
            return to_dense(a.operator, cap=max(1, dense_cap().bit_length() - 1))
        return a.to_dense()


def _predicted(obj: dict) -> complex | None:
    p = obj.get("predicted")
    return None if p is None else complex(p["re"], p["im"])


def load_instance(obj: dict) -> LoadedInstance:
    """Build the access form described by an envelope."""
    model = obj.get("model")
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    payload = obj.get("payload")
    if payload is None:
        raise ValueError("envelope has no payload")
    meta = Metadata.from_json(obj.get("meta"))
    target = Target.from_json(obj["target"]) if obj.get("target") else None
    function = FunctionSpec.from_json(obj["function"]) if obj.get("function") else None
    predicted, g = _predicted(obj), obj.get("g")
    if isinstance(payload, dict) and "family" in payload:
        inst = ClockInstance.from_json(obj)
        want = "pauli" if inst.encoding == "unary" else "sparse"
        if model != want:
            raise ValueError(f"family payload with {inst.encoding} encoding needs model {want!r}")
        return LoadedInstance(model, inst.access(), target or inst.active_target(),
                              function or inst.function, inst.predicted,
                              g if "g" in obj else inst.g, inst, obj)
    if model == "sparse":
        raise ValueError("sparse instances serialize only as generator families")
    if model == "pauli":
        access = PauliAccess(PauliOperator.from_json(payload), meta=meta)
    elif model == "supersparse":
        ents = [(int(e[0]), int(e[1]), complex(e[2], e[3] if len(e) > 3 else 0.0))
                for e in payload["entries"]]
        access = SuperSparseMatrix(int(obj["N"]), tuple(ents), meta)
    else:
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload.get("im", np.zeros_like(re)), dtype=float)
        access = SparseOracle.from_dense(re + 1j * im, meta)
    if int(obj.get("N", access.dim)) != access.dim:
        raise ValueError(f"declared N={obj['N']} differs from the payload dimension {access.dim}")
    return LoadedInstance(model, access, target, function, predicted, g, None, obj)


def pauli_envelope(op: PauliOperator, meta: Metadata | None = None, **extra) -> dict:
    a = PauliAccess(op, meta=meta or Metadata())
    return {"model": "pauli", "N": a.dim, "payload": op.to_json(), "meta": a.meta.to_json(), **extra}


def supersparse_envelope(m: SuperSparseMatrix, **extra) -> dict:
    ents = [[i, j, v.real, v.imag] for i, j, v in m.entries]
    return {"model": "supersparse", "N": m.dim, "payload": {"entries": ents},
            "meta": m.meta.to_json(), **extra}


def dense_envelope(d: np.ndarray, meta: Metadata | None = None, **extra) -> dict:
    d = np.asarray(d, dtype=complex)
    return {"model": "dense", "N": d.shape[0],
            "payload": {"re": d.real.tolist(), "im": d.imag.tolist()},
            "meta": (meta or Metadata()).to_json(), **extra}


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_text(text: str, path: str | Path | None) -> None:
    """Write to ``path`` or stdout when ``path`` is ``None`` or ``-``."""
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
