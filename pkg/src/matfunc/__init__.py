"""Classical estimation of Hermitian matrix-function entries and local measurements.

Subpackages: :mod:`matfunc.estimators` (algorithms and router),
:mod:`matfunc.clocks` (circuit-to-matrix instance generators).  The dense
oracle in :mod:`matfunc.dense` is independent of both.
"""

from .access import Metadata, PauliAccess, SparseOracle, SuperSparseMatrix
from .pauli import PauliOperator, PauliString
from .polynomials import FunctionSpec, PolynomialSpec
from .projector import Projector

__version__ = "0.1.0"

__all__ = ["FunctionSpec", "Metadata", "PauliAccess", "PauliOperator", "PauliString",
           "PolynomialSpec", "Projector", "SparseOracle", "SuperSparseMatrix", "__version__"]
