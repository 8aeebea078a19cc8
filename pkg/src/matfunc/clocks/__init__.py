"""Clock constructions that embed a circuit's acceptance probability in a matrix function."""

from .circuit import (Circuit, acceptance_probability, all_circuits, circuit_unitary,
                      gate_column, random_circuit, statevector)
from .instances import *  # noqa: F401,F403
from .instances import __all__ as _inst_all

__all__ = ["Circuit", "acceptance_probability", "all_circuits", "circuit_unitary",
           "gate_column", "random_circuit", "statevector", *_inst_all]
