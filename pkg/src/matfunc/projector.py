"""Local-measurement projectors on basis indices.

The default projector keeps the first half of the index range, which for a
power-of-two dimension is ``|0><0|`` on the leading qubit.  Clock instances
measure a single data qubit instead, so a projector can also select the basis
states whose bit at ``shift`` equals ``value``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator, z_projector


@dataclass(frozen=True, slots=True)
class Projector:
    """Diagonal 0/1 projector.

    ``shift is None`` means "indices below N // 2"; ``shift == -1`` is the
    identity; otherwise the projector keeps indices ``k`` with
    ``(k >> shift) & 1 == value``.
    """

    shift: int | None = None
    value: int = 0

    @classmethod
    def first_half(cls) -> "Projector":
        return cls(None, 0)

    @classmethod
    def identity(cls) -> "Projector":
        return cls(-1, 0)

    @property
    def is_identity(self) -> bool:
        return self.shift == -1

    @classmethod
    def bit(cls, shift: int, value: int) -> "Projector":
        if value not in (0, 1) or shift < 0:
            raise ValueError("bit projector needs shift >= 0 and value in {0, 1}")
        return cls(shift, value)

    def contains(self, k, dim: int):
        """Membership of index ``k`` (int or int array) in the projector's range."""
        if self.shift is None:
            return k < dim // 2
        if self.shift == -1:
            return np.ones(np.shape(k), dtype=bool) if np.ndim(k) else True
        return ((k >> self.shift) & 1) == self.value

    def mask(self, dim: int) -> np.ndarray:
        return np.asarray(self.contains(np.arange(dim), dim), dtype=bool)

    def to_pauli(self, n: int) -> PauliOperator:
        if self.shift is None:
            return z_projector(n, 0, 0)
        if self.shift == -1:
            return PauliOperator.identity(n)
        if self.shift >= n:
            raise ValueError("projector bit beyond the register")
        return z_projector(n, n - 1 - self.shift, self.value)

    def qubit(self, n: int) -> tuple[int, int]:
        """``(qubit, value)`` on an ``n``-qubit register."""
        if self.shift is None:
            return 0, 0
        if self.shift == -1:
            raise ValueError("the identity projector acts on no single qubit")
        return n - 1 - self.shift, self.value

    def to_json(self) -> dict:
        return {"shift": self.shift, "value": self.value}

    @classmethod
    def from_json(cls, obj: dict | None) -> "Projector":
        if not obj:
            return cls.first_half()
        return cls(obj.get("shift"), int(obj.get("value", 0)))
