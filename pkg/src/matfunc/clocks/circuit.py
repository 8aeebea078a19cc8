"""Small circuits over {H, Toffoli, CNOT} and an exact statevector simulator."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..config import QUBIT_CAP, CapExceeded
from ..gates import CIRCUIT_GATES, Gate, apply_gate

_SQRT_HALF = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Circuit:
    """``r`` qubits and an ordered gate list; qubit 0 is the output qubit."""

    r: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        gates = tuple(g if isinstance(g, Gate) else Gate.from_json(g) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        if self.r < 1:
            raise ValueError("a circuit needs at least one qubit")
        if not gates:
            raise ValueError("a circuit needs at least one gate")
        for g in gates:
            if g.name not in CIRCUIT_GATES:
                raise ValueError(f"gate {g.name} is not in the circuit gate set {CIRCUIT_GATES}")
            if max(g.qubits) >= self.r:
                raise ValueError(f"gate {g.name}{g.qubits} exceeds {self.r} qubits")

    @property
    def T(self) -> int:
        return len(self.gates)

    def inverse_gates(self) -> tuple[Gate, ...]:
        # every gate in the set is self-inverse
        return tuple(reversed(self.gates))

    def shifted(self, offset: int, extra: int = 0) -> "Circuit":
        return Circuit(self.r + offset + extra, tuple(g.shifted(offset) for g in self.gates))

    def to_json(self) -> dict:
        return {"r": self.r, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        """Accepts ``{"r": .., "gates": [...]}`` or a bare gate list (``r`` inferred)."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, dict):
            gates = tuple(Gate.from_json(g) for g in obj["gates"])
            r = obj.get("r")
        else:
            gates = tuple(Gate.from_json(g) for g in obj)
            r = None
        if r is None:
            r = max(max(g.qubits) for g in gates) + 1
        return cls(int(r), gates)


def statevector(c: Circuit, x: int = 0) -> np.ndarray:
    """Exact ``C|x>`` on ``r`` qubits."""
    if c.r > QUBIT_CAP:
        raise CapExceeded(f"{c.r} qubits exceeds the statevector cap {QUBIT_CAP}")
    dim = 1 << c.r
    if not 0 <= x < dim:
        raise IndexError("input basis state out of range")
    psi = np.zeros(dim, dtype=complex)
    psi[x] = 1.0
    for g in c.gates:
        psi = apply_gate(psi, g, c.r)
    return psi


def acceptance_probability(c: Circuit, x: int = 0) -> float:
    """``|alpha_{x,1}|^2``: weight of ``C|x>`` with output qubit 0 equal to 1."""
    psi = statevector(c, x)
    return float(np.sum(np.abs(psi[len(psi) // 2:]) ** 2))


def circuit_unitary(c: Circuit) -> np.ndarray:
    if c.r > QUBIT_CAP:
        raise CapExceeded(f"{c.r} qubits exceeds the cap {QUBIT_CAP}")
    u = np.eye(1 << c.r, dtype=complex)
    for g in c.gates:
        u = apply_gate(u, g, c.r)
    return u


def gate_column(g: Gate, b: int, n: int) -> list[tuple[int, float]]:
    """Non-zero entries ``(row, value)`` of column ``b`` of ``g`` on ``n`` qubits."""
    name = g.name
    if name == "I":
        return [(b, 1.0)]
    bit = [(b >> (n - 1 - q)) & 1 for q in g.qubits]
    if name == "H":
        q = g.qubits[0]
        mask = 1 << (n - 1 - q)
        sign = -1.0 if bit[0] else 1.0
        b0 = b & ~mask
        return [(b0, _SQRT_HALF), (b0 | mask, sign * _SQRT_HALF)]
    if name == "X":
        return [(b ^ (1 << (n - 1 - g.qubits[0])), 1.0)]
    if name == "Z":
        return [(b, -1.0 if bit[0] else 1.0)]
    if name == "CNOT":
        if bit[0]:
            return [(b ^ (1 << (n - 1 - g.qubits[1])), 1.0)]
        return [(b, 1.0)]
    if name == "TOFFOLI":
        if bit[0] and bit[1]:
            return [(b ^ (1 << (n - 1 - g.qubits[2])), 1.0)]
        return [(b, 1.0)]
    raise ValueError(f"unknown gate {name}")


def all_circuits(r: int, T: int, gate_set: Sequence[str] = ("H", "TOFFOLI")) -> Iterator[Circuit]:
    """Every circuit with ``T`` gates on ``r`` qubits over ``gate_set``.

    Toffoli controls are unordered, so each (control pair, target) appears once.
    """
    choices: list[Gate] = []
    for name in gate_set:
        name = name.upper()
        if name == "H":
            choices += [Gate("H", (q,)) for q in range(r)]
        elif name == "CNOT":
            choices += [Gate("CNOT", (a, b)) for a in range(r) for b in range(r) if a != b]
        elif name == "TOFFOLI":
            for t in range(r):
                ctrls = [q for q in range(r) if q != t]
                choices += [Gate("TOFFOLI", (a, b, t)) for a, b in itertools.combinations(ctrls, 2)]
    for seq in itertools.product(choices, repeat=T):
        yield Circuit(r, tuple(seq))


def random_circuit(rng: np.random.Generator, r: int, T: int,
                   gate_set: Sequence[str] = ("H", "TOFFOLI", "CNOT")) -> Circuit:
    """Uniform gate type (among those that fit) with uniform qubits."""
    names = [g.upper() for g in gate_set if {"H": 1, "CNOT": 2, "TOFFOLI": 3}[g.upper()] <= r]
    gates = []
    for _ in range(T):
        name = names[int(rng.integers(len(names)))]
        k = {"H": 1, "CNOT": 2, "TOFFOLI": 3}[name]
        qs = rng.permutation(r)[:k]
        gates.append(Gate(name, tuple(int(q) for q in qs)))
    return Circuit(r, tuple(gates))
