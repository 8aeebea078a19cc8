"""Classical estimators for matrix-function entries and local measurements."""

from .composite import (Plan, inverse_entry, inverse_lm, norm_decay_entry, norm_decay_lm,
                        normalized_lm, run_entry, run_lm, scaled_access, timeevo_entry, timeevo_lm)
from .exact import (closure_bound, closure_size, exact_entry_path, exact_entry_poly, exact_lm_path,
                    exact_lm_poly, pauli_supersparse_apply, pauli_supersparse_entry,
                    pauli_supersparse_lm, supersparse_entry, supersparse_lm)
from .montecarlo import MCConfig, mc_entry_pauli, mc_entry_sparse, mc_lm
from .router import estimate, route, table_row
from .sampling import DegreeLaw, FragmentLaw, hoeffding_samples
from .sketch import lipschitz_bound, sketch_pauli, sketch_size, sketch_then_eval
from .types import (ALGORITHMS, Decision, Estimate, EstimateRequest, HardRegime,
                    PreconditionError, Target, decide)

__all__ = [
    "ALGORITHMS", "Decision", "DegreeLaw", "Estimate", "EstimateRequest", "FragmentLaw",
    "HardRegime", "MCConfig", "Plan", "PreconditionError", "Target", "closure_bound",
    "closure_size", "decide", "estimate", "exact_entry_path", "exact_entry_poly",
    "exact_lm_path", "exact_lm_poly", "hoeffding_samples", "inverse_entry", "inverse_lm",
    "lipschitz_bound", "mc_entry_pauli", "mc_entry_sparse", "mc_lm", "norm_decay_entry",
    "norm_decay_lm", "normalized_lm", "pauli_supersparse_apply", "pauli_supersparse_entry",
    "pauli_supersparse_lm", "route", "run_entry", "run_lm", "scaled_access", "sketch_pauli",
    "sketch_size", "sketch_then_eval", "supersparse_entry", "supersparse_lm", "table_row",
    "timeevo_entry", "timeevo_lm",
]
