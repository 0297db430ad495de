"""Hardness reductions as instance generators and checkers."""

from .encoding import (
    EncodedInstance,
    block_alignment_audit,
    code_exclusivity,
    decode_blocks,
    encode_scs_to_soda,
    encoded_superstring,
    encoded_to_ham_path,
    fact1,
    fact2,
    fact3,
)
from .scs import (
    RdhpInstance,
    ScsInstance,
    exact_scs,
    ham_path_to_superstring,
    overlap_merge,
    rdhp_to_scs,
    sample_rdhp,
    superstring_to_ham_path,
)
from .smc import SmcInstance, SmcWitness, brute_force_smc, coloring_to_smc, shifts_to_coloring

__all__ = [
    "EncodedInstance",
    "RdhpInstance",
    "ScsInstance",
    "SmcInstance",
    "SmcWitness",
    "block_alignment_audit",
    "brute_force_smc",
    "code_exclusivity",
    "coloring_to_smc",
    "decode_blocks",
    "encode_scs_to_soda",
    "encoded_superstring",
    "encoded_to_ham_path",
    "exact_scs",
    "fact1",
    "fact2",
    "fact3",
    "ham_path_to_superstring",
    "overlap_merge",
    "rdhp_to_scs",
    "sample_rdhp",
    "shifts_to_coloring",
    "superstring_to_ham_path",
]
