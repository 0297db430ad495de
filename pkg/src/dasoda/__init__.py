"""Double-array tries: layouts, exact and SAT-based size minimization, and
the hardness reductions behind the layout problem."""

from .double_array import DoubleArray, greedy_build, traverse, trivial_layout, validate
from .errors import (
    CapacityError,
    DasodaError,
    DecodeError,
    InputError,
    LayoutError,
    SolverEnvironmentError,
    StructuralError,
)
from .maxsat import decode, encode, optimize_size
from .sat import CnfFormula, SolveOutcome, check_model, solve_cnf
from .soda import SodaInstance, brute_force_soda, exact_build, solve_sigma2, solve_sigma3, trie_to_soda
from .trie import Trie, build_trie

__version__ = "0.1.0"
