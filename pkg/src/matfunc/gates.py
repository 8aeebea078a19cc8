"""Gate descriptors for the small real gate set used by the clock constructions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQRT_HALF = 1.0 / np.sqrt(2.0)

# local matrices; for multi-qubit gates the first listed qubit is the most significant
_LOCAL = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
    "H": _SQRT_HALF * np.array([[1.0, 1.0], [1.0, -1.0]]),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
    ),
}
_toffoli = np.eye(8)
_toffoli[6:, 6:] = [[0.0, 1.0], [1.0, 0.0]]
_LOCAL["TOFFOLI"] = _toffoli

ARITY = {"I": 1, "X": 1, "Z": 1, "H": 1, "CNOT": 2, "TOFFOLI": 3}
# gates a user circuit may contain; the others appear only in padded sequences
CIRCUIT_GATES = ("H", "TOFFOLI", "CNOT")


@dataclass(frozen=True, slots=True)
class Gate:
    """A named gate acting on an ordered tuple of qubits.

    For ``CNOT`` the qubits are ``(control, target)``; for ``TOFFOLI`` they are
    ``(control_a, control_b, target)``.
    """

    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if name not in ARITY:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(self.qubits) != ARITY[name]:
            raise ValueError(f"{name} takes {ARITY[name]} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {name}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")

    def local_matrix(self) -> np.ndarray:
        return _LOCAL[self.name]

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.name, tuple(q + offset for q in self.qubits))

    def to_json(self) -> list:
        return [self.name, *self.qubits]

    @classmethod
    def from_json(cls, obj) -> "Gate":
        if isinstance(obj, dict):
            return cls(obj["gate"], tuple(obj["qubits"]))
        name, *qubits = obj
        return cls(name, tuple(qubits))


def H(q: int) -> Gate:
    return Gate("H", (q,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def Toffoli(a: int, b: int, c: int) -> Gate:
    return Gate("TOFFOLI", (a, b, c))


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to an ``n``-qubit state (or a stack of states along axis 0).

    ``state`` has shape ``(2**n,)`` or ``(2**n, k)``; qubit 0 is the most
    significant bit of the index.
    """
    if max(gate.qubits) >= n:
        raise ValueError(f"gate {gate.name}{gate.qubits} does not fit on {n} qubits")
    if gate.name == "I":
        return state.copy()
    extra = state.shape[1:]
    k = len(gate.qubits)
    psi = state.reshape((2,) * n + extra)
    u = gate.local_matrix().reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    # tensordot puts the gate axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), list(gate.qubits))
    return out.reshape(state.shape)


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    """Dense ``2**n`` matrix of ``gate`` embedded on ``n`` qubits."""
    return apply_gate(np.eye(1 << n, dtype=complex), gate, n)
