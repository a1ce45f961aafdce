"""Composed currents: fusion constants, partition component formulas,
pole/zero structure, residue recursion, and the tensor fields t^(n)."""

from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcurrents.affinerep import (make_fock_level1, tensor_rep, vec_add,
                                 vec_eq, vec_scale)
from qcurrents.composed import (
    PairSpace,
    PartitionTerm,
    composed_e,
    composed_e_partition,
    composed_f,
    composed_f_partition,
    composed_t,
    composed_t_factorized,
    comp1_constant,
    eft_constant,
    lemma_pole_zero,
    level_vanishing_check,
    partition_terms,
    pole_required_level,
    pole_zero_scan,
    product_pair_mode,
    residue_product_check,
    rre_constant,
    t_commutator_check,
    t_factorization_check,
    total_integrals_commute,
    triple_agreement_check,
)
from qcurrents.qarith import qp, q_int
from qcurrents.series import TruncationError

S3 = Fraction(3)       # q^(1/2) = 3, so q = 9
Q = Fraction(9)


def qn(k):
    """[k] at q = 9, as an exact Fraction."""
    return (Q**k - Q**-k) / (Q - Q**-1)


@pytest.fixture(scope="module")
def level2():
    return tensor_rep(make_fock_level1(2), make_fock_level1(2))


@pytest.fixture(scope="module")
def level3():
    return tensor_rep(tensor_rep(make_fock_level1(2), make_fock_level1(2)),
                      make_fock_level1(2))


# -- fusion constants ----------------------------------------------------------

def test_fusion_constant_values():
    dq = Q - Q**-1
    assert eft_constant(1).evaluate_s(S3) == 1
    assert eft_constant(2).evaluate_s(S3) == dq * qn(2)
    assert eft_constant(3).evaluate_s(S3) == dq**2 * qn(2) * (qn(2) * qn(3))
    # the n = 2 constant in its expanded form
    assert str(eft_constant(2)) == "q^2 - q^-2"


def test_pair_field_constant_values():
    dq = Q**-1 - Q
    assert comp1_constant(1).evaluate_s(S3) == dq
    assert comp1_constant(2).evaluate_s(S3) == dq**3 * qn(2)


def test_residue_constant_values():
    dq = Q - Q**-1
    # k = 1: the j = 0 factor reads [base][base+1] over an empty denominator
    assert rre_constant(1, 1).evaluate_s(S3) == dq * qn(1) * qn(2)
    assert rre_constant(2, 1).evaluate_s(S3) == dq * qn(2) * qn(3)
    # k = 2 picks up [base+1][base+2]/([1][2])
    assert rre_constant(1, 2).evaluate_s(S3) == \
        dq * qn(1) * qn(2) * qn(2) * qn(3) / (qn(1) * qn(2))


# -- partition component formula ----------------------------------------------

def test_partition_terms_enumeration():
    terms = partition_terms("e", 2, -1, 3)
    assert [t.parts for t in terms] == [(-4, 3), (-3, 2), (-2, 1), (-1, 0)]
    # weight q^{-2 (j-1) mu_j} = q^{-2 mu_2}
    assert [t.coefficient.evaluate_s(S3) for t in terms] == [
        Q**-6, Q**-4, Q**-2, 1]


def test_partition_terms_multiplicity_weight():
    (term,) = partition_terms("e", 3, 3, 1)
    assert term.parts == (1, 1, 1)
    # q^{-2(0+1+2)} over (3)_{q^2}! = (1+q^2)(1+q^2+q^4)
    expected = Q**-6 / ((1 + Q**2) * (1 + Q**2 + Q**4))
    assert term.coefficient.evaluate_s(S3) == expected


def test_partition_terms_f_side_mirror():
    terms = partition_terms("f", 2, -1, 2)
    # f-side weight is q^{-2 (n-j) mu_j} = q^{-2 mu_1}
    assert [(t.parts, t.coefficient.evaluate_s(S3)) for t in terms] == [
        ((-3, 2), Q**6), ((-2, 1), Q**4), ((-1, 0), Q**2)]


def test_partition_terms_rejects_bad_kind():
    with pytest.raises(ValueError):
        partition_terms("t", 2, 0, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["e", "f"]), st.integers(1, 3),
       st.integers(-6, 6), st.integers(-1, 4))
def test_partition_terms_match_brute_force(kind, n, m, max_part):
    terms = partition_terms(kind, n, m, max_part)
    got = [t.parts for t in terms]
    assert len(set(got)) == len(got)
    lo = m - (n - 1) * max_part
    expected = sorted(
        parts
        for parts in combinations_with_replacement(
            range(min(lo, max_part), max_part + 1), n)
        if sum(parts) == m)
    assert sorted(got) == expected
    for t in terms:
        assert list(t.parts) == sorted(t.parts)
        assert isinstance(t, PartitionTerm)


def test_partition_route_applies_terms():
    # the partition evaluator is the weighted sum of the enumerated words
    rep = tensor_rep(make_fock_level1(3), make_fock_level1(3))
    vac = rep.basis(0)[0]
    fam = composed_e_partition(rep, 2)
    for M in (-2, -3):
        direct = fam.mode_on_key(M, vac)
        summed = {}
        for t in partition_terms("e", 2, M, 0):
            vec = {vac: rep.one_coeff()}
            for part in reversed(t.parts):
                vec = rep.apply("e", part, vec)
                if not vec:
                    break
            summed = vec_add(summed, vec_scale(t.coefficient, vec))
        assert vec_eq(direct, summed)


# -- raw residue route vs component formula ------------------------------------

def test_level1_vanishing_both_routes():
    report = level_vanishing_check(make_fock_level1(5))
    assert report["status"] == "pass"
    assert report["parameters"]["checked"] > 100


def test_triple_agreement_level2(level2):
    report = triple_agreement_check(level2, 2, mode_window=4)
    assert report["status"] == "pass"
    assert report["parameters"]["checked"] > 200
    assert report["parameters"]["constant"] == "q^2 - q^-2"


def test_raw_vs_partition_n3(level3):
    report = triple_agreement_check(level3, 3, max_degree=2, mode_window=2)
    assert report["status"] == "pass"
    assert report["parameters"]["checked"] > 50


def test_pair_product_demands_polynomial_tail():
    rep = make_fock_level1(3)
    key = (0, ())
    with pytest.raises(TruncationError):
        product_pair_mode(rep, "e", -2, key, margin=10)


# -- pole and zero lists --------------------------------------------------------

def test_pole_zero_tables():
    assert lemma_pole_zero("e", 1, 1) == ([2], [0])
    assert lemma_pole_zero("e", 2, 1) == ([2], [-2])
    assert lemma_pole_zero("e", 1, 2) == ([4], [0])
    assert lemma_pole_zero("e", 2, 2) == ([2, 4], [-2, 0])
    assert lemma_pole_zero("f", 1, 1) == ([-2], [0])
    assert lemma_pole_zero("f", 2, 1) == ([-4], [0])
    assert lemma_pole_zero("f", 1, 2) == ([-2], [2])
    assert lemma_pole_zero("f", 2, 2) == ([-2, -4], [0, 2])
    # wider sanity: the e-side lists of (3,2)
    assert lemma_pole_zero("e", 3, 2) == ([2, 4], [-4, -2])


def test_pole_required_level():
    assert pole_required_level("e", 1, 1, 2) == 2
    assert pole_required_level("e", 2, 1, 2) == 3
    assert pole_required_level("e", 2, 2, 4) == 4
    assert pole_required_level("f", 1, 1, -2) == 2
    assert pole_required_level("f", 2, 2, -4) == 4


def test_scan_level1_fock():
    rep = make_fock_level1(8)
    r = pole_zero_scan(rep, 1, 1, kind="e", states=rep.basis(1),
                       s=[-2, -1, 0])
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == ["q^2"]
    r = pole_zero_scan(rep, 1, 1, kind="f", states=rep.basis(1),
                       s=[-2, -1, 0])
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == ["q^-2"]


def test_scan_level2_witnesses_first_pole():
    rep = tensor_rep(make_fock_level1(6), make_fock_level1(6))
    states = rep.basis(1)
    r = pole_zero_scan(rep, 1, 1, kind="e", states=states)
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == []
    r = pole_zero_scan(rep, 2, 1, kind="e", states=states)
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == ["q^2"]
    r = pole_zero_scan(rep, 1, 2, kind="f", states=states)
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == ["q^-2"]


def test_scan_level3_witnesses_second_composed_pole():
    rep = tensor_rep(tensor_rep(make_fock_level1(4), make_fock_level1(4)),
                     make_fock_level1(4))
    states = rep.basis(0) + rep.basis(1)[1:3]
    r = pole_zero_scan(rep, 2, 1, kind="e", states=states)
    assert r["status"] == "pass"
    assert r["parameters"]["level_suppressed_poles"] == []


# -- residue recursion -----------------------------------------------------------

@pytest.fixture(scope="module")
def level3w():
    # slot bound 3: wide enough for the informative delta rows of every
    # (n, m) <= (2, 1)-shaped pole
    return tensor_rep(tensor_rep(make_fock_level1(3), make_fock_level1(3)),
                      make_fock_level1(3))


def test_residue_recursion_level3(level3w):
    for kind, n, m, k in [("e", 1, 1, 1), ("e", 2, 1, 1), ("e", 1, 2, 2),
                          ("f", 1, 1, 1), ("f", 1, 2, 1), ("f", 2, 1, 2)]:
        r = residue_product_check(level3w, kind, n, m, k)
        assert r["status"] == "pass", r
        assert r["parameters"]["nonzero"] > 0, r


def test_residue_recursion_level4():
    nest3 = tensor_rep(tensor_rep(make_fock_level1(3), make_fock_level1(3)),
                       tensor_rep(make_fock_level1(3), make_fock_level1(3)))
    for kind, k in [("e", 1), ("e", 2), ("f", 2)]:
        r = residue_product_check(nest3, kind, 2, 2, k, margin=1)
        assert r["status"] == "pass", r
        assert r["parameters"]["nonzero"] > 0, r
    # the remaining pole needs one more unit of slot room
    nest4 = tensor_rep(tensor_rep(make_fock_level1(4), make_fock_level1(4)),
                       tensor_rep(make_fock_level1(4), make_fock_level1(4)))
    r = residue_product_check(nest4, "f", 2, 2, 1, margin=1)
    assert r["status"] == "pass", r
    assert r["parameters"]["nonzero"] > 0, r


def test_residue_recursion_rejects_bad_k(level3):
    with pytest.raises(ValueError):
        residue_product_check(level3, "e", 2, 1, 2)
    with pytest.raises(ValueError):
        residue_product_check(level3, "f", 1, 2, 2)


def test_starved_window_reports_itself():
    # slot bound 2 leaves no room for the informative rows: the check must
    # refuse to certify rather than pass on empty identities
    tiny = tensor_rep(tensor_rep(make_fock_level1(2), make_fock_level1(2)),
                      make_fock_level1(2))
    r = residue_product_check(tiny, "e", 2, 1, 1)
    assert r["status"] == "insufficient-truncation"
    assert r["parameters"]["nonzero"] == 0


# -- pair fields t^(n) ------------------------------------------------------------

@pytest.fixture(scope="module")
def pair22():
    slot = tensor_rep(make_fock_level1(2), make_fock_level1(2))
    other = tensor_rep(make_fock_level1(2), make_fock_level1(2))
    return PairSpace(slot, other)


def test_t_factorization(pair22):
    r = t_factorization_check(pair22, None, 1, max_degree=2, mode_window=2)
    assert r["status"] == "pass"
    assert r["parameters"]["checked"] > 200
    r = t_factorization_check(pair22, None, 2, max_degree=2, mode_window=1)
    assert r["status"] == "pass"
    assert r["parameters"]["checked"] > 10


def test_t_commutator_closes(pair22):
    r = t_commutator_check(pair22, None, 1, 1, max_degree=2, mode_window=1)
    assert r["status"] == "pass"
    assert r["parameters"]["checked"] > 300


def test_total_integrals_commute(pair22):
    r = total_integrals_commute(pair22, None, 2, max_degree=2)
    assert r["status"] == "pass"
    assert r["parameters"]["checked"] > 200


def test_pair_field_vanishes_above_slot_level():
    pair = PairSpace(make_fock_level1(3), make_fock_level1(3))
    r = total_integrals_commute(pair, None, 2, max_degree=2)
    assert r["status"] == "pass"
    assert r["parameters"]["vanishing_checked"] > 0
    tind = composed_t(pair, None, 2)
    vac = pair.basis(0)[0]
    assert tind.mode_on_key(0, vac) == {}


def test_factorized_t_reports_operator_labels(pair22):
    op = composed_t_factorized(pair22, None, 2)
    assert "t" in op.label and op.factors == 2


# -- report shape ------------------------------------------------------------------

def test_report_is_json_ready(level2):
    import json
    r = triple_agreement_check(level2, 2, max_degree=1, mode_window=2)
    assert set(r) == {"relation", "parameters", "status",
                      "witness_coefficient", "lhs", "rhs"}
    json.dumps(r)
