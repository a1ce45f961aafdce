"""Exact q-deformed current algebra: truncated modules, composed currents,
configuration-space cycle integrals, and universal R-matrix constructions.

Everything is computed over the exact coefficient field Q(q^(1/2)); floating
point appears only in the optional numeric torus oracle.
"""

from qcurrents.qarith import Scalar, q_int, q_factorial, q_binomial
from qcurrents.series import TruncationError, TruncatedLaurent
from qcurrents.affinerep import (
    AlgebraError,
    EvaluationRep,
    FockRep,
    TensorRep,
    check_defining_relations,
    make_evaluation_rep,
    make_fock_level1,
    tensor_rep,
)
from qcurrents.composed import (
    OperatorLaurent,
    PairSpace,
    PartitionTerm,
    composed_e,
    composed_e_partition,
    composed_f,
    composed_f_partition,
    composed_t,
    composed_t_factorized,
    lemma_pole_zero,
    partition_terms,
    pole_zero_scan,
    residue_product_check,
    t_commutator_check,
    t_factorization_check,
    total_integrals_commute,
    triple_agreement_check,
    level_vanishing_check,
)

__all__ = [
    "Scalar", "q_int", "q_factorial", "q_binomial",
    "TruncationError", "TruncatedLaurent",
    "AlgebraError", "EvaluationRep", "FockRep", "TensorRep",
    "check_defining_relations", "make_evaluation_rep", "make_fock_level1",
    "tensor_rep",
    "OperatorLaurent", "PairSpace", "PartitionTerm",
    "composed_e", "composed_e_partition", "composed_f",
    "composed_f_partition", "composed_t", "composed_t_factorized",
    "lemma_pole_zero", "partition_terms", "pole_zero_scan",
    "residue_product_check", "t_commutator_check", "t_factorization_check",
    "total_integrals_commute", "triple_agreement_check",
    "level_vanishing_check",
]

__version__ = "0.1.0"
