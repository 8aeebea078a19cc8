"""Work caps shared across modules.

Caps are read at call time so tests and the CLI can override them through the
environment without re-importing anything.
"""

from __future__ import annotations

import os

DEFAULT_DENSE_CAP = 4096
QUBIT_CAP = 12
# exact path recursion is refused when m * log2(s) exceeds this
PATH_LOG2_CAP = 32.0
# closure algorithms refuse above this many distinct strings / projectors
CLOSURE_CAP = 1 << 16
# super-sparse restriction refuses k^2 above this
SUPERSPARSE_CAP = 1 << 24
DEGREE_CAP = 100_000
# Pauli strings are stored in int64 masks
MAX_PAULI_QUBITS = 62


def dense_cap() -> int:
    """Largest dimension the dense oracle will materialize."""
    raw = os.environ.get("MATFUNC_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"MATFUNC_DENSE_CAP must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise ValueError("MATFUNC_DENSE_CAP must be positive")
    return cap


class CapExceeded(RuntimeError):
    """Raised when a computation would exceed a configured work cap."""
