"""Representation layer: mode actions, derived psi currents, tensor
coproducts, relation checker, serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcurrents.affinerep import (
    AlgebraError,
    CorruptedRep,
    _gate_fock,
    check_defining_relations,
    dump_rep,
    dumps_rep,
    load_rep,
    make_evaluation_rep,
    make_fock_level1,
    parse_scalar,
    tensor_rep,
    vec_add,
    vec_eq,
    vec_scale,
    vec_sub,
)
from qcurrents.qarith import ONE, Scalar, q_int, qp, sp
from qcurrents.series import TruncationError

S3 = Fraction(3)  # concrete q^(1/2) for exact numeric cross-checks


@pytest.fixture(scope="module")
def fock():
    return make_fock_level1(degree_bound=6)


@pytest.fixture(scope="module")
def evrep():
    return make_evaluation_rep("a")


def all_pass(report):
    return [r["relation"] for r in report if r["status"] != "pass"]


# -- evaluation module --------------------------------------------------------

def test_evaluation_boson_current_bracket(evrep):
    # [a_1, e_0] = [2] q^{-1/2*0} e_1 on both basis states (level 0)
    for key in (0, 1):
        v = evrep.basis_vec(key)
        lhs = vec_sub(evrep.apply_product([("a", 1), ("e", 0)], v),
                      evrep.apply_product([("e", 0), ("a", 1)], v))
        rhs = vec_scale(q_int(2), evrep.apply("e", 1, v))
        assert vec_eq(lhs, rhs)


def test_evaluation_full_battery(evrep):
    report = check_defining_relations(evrep, mode_window=2, max_degree=2)
    assert all_pass(report) == []
    # nothing is skipped: the evaluation module never truncates
    assert all(r["skipped"] == 0 for r in report)
    assert {r["relation"] for r in report} == {
        "current-grading", "ee-exchange", "ff-exchange",
        "psi-plus-e-exchange", "psi-minus-e-exchange",
        "psi-plus-f-exchange", "psi-minus-f-exchange",
        "ef-commutator", "boson-commutator", "boson-current",
        "psi-psi-commute", "psi-cross-exchange"}


def test_evaluation_psi_is_delta_supported(evrep):
    # psi^-_{-1} = -(q - q^-1) a^-1 diag(1, -1): K^-1 cancels the boson trace
    v = evrep.apply("psi-", -1, evrep.basis_vec(0))
    (key, c), = v.items()
    assert key == 0
    assert str(c) == "(-q + q^-1)*a^-1"
    # wrong-side modes vanish identically
    assert evrep.apply("psi-", 1, evrep.basis_vec(0)) == {}
    assert evrep.apply("psi+", -2, evrep.basis_vec(1)) == {}


# -- Fock module ---------------------------------------------------------------

def test_fock_construction_gate_passes(fock):
    assert fock.level == 1
    assert len(fock.basis()) == 76
    assert fock.degree((2, (1, 1))) == 6


def test_fock_gate_rejects_corruption(fock):
    with pytest.raises(AlgebraError, match="boson"):
        _gate_fock(CorruptedRep(fock, "a", 1, qp(2)))


def test_fock_boson_commutator_on_vacuum(fock):
    v = fock.vacuum()
    braket = vec_sub(fock.apply_product([("a", 1), ("a", -1)], v),
                     fock.apply_product([("a", -1), ("a", 1)], v))
    # [a_1, a_-1] = [2][c] with c = 1
    assert vec_eq(braket, vec_scale(q_int(2), v))


def test_fock_mode_actions_match_frozen_values(fock):
    v0 = fock.vacuum()
    assert fock.apply("e", -1, v0) == {(1, ()): ONE}
    e2 = fock.apply("e", -2, v0)
    assert e2[(1, (1,))].evaluate_s(S3) == Fraction(1, 3)
    e33 = fock.apply("e", -3, fock.apply("e", -3, v0))
    assert e33[(2, (1, 1))].evaluate_s(S3) == Fraction(-41, 729)
    # operator product antisymmetry of the deepest component
    e42 = fock.apply("e", -4, fock.apply("e", -2, v0))
    e24 = fock.apply("e", -2, fock.apply("e", -4, v0))
    assert e42[(2, (1, 1))].evaluate_s(S3) == Fraction(40, 729)
    assert e24[(2, (1, 1))].evaluate_s(S3) == Fraction(-40, 729)


def test_fock_zero_is_empty_and_truncation_raises(fock):
    v0 = fock.vacuum()
    # degree would go negative: exactly zero
    assert fock.apply("e", 5, v0) == {}
    assert fock.apply("a", 3, v0) == {}
    # degree would exceed the bound: refuse, never clip
    with pytest.raises(TruncationError):
        fock.apply("f", -7, v0)
    with pytest.raises(TruncationError):
        fock.apply("a", -7, v0)
    # psi^- raises by |n|: honest refusal near the top of the window
    top = fock.basis_vec((0, (6,)))
    with pytest.raises(TruncationError):
        fock.apply("psi-", -1, top)


def test_fock_full_battery(fock):
    report = check_defining_relations(fock, mode_window=2, max_degree=2)
    assert all_pass(report) == []
    assert sum(r["tested"] for r in report) > 2000


def test_fock_tight_bound_skips_are_counted():
    # with a tight bound, deep cases overflow and are reported as skipped,
    # never converted into passing evidence
    small = make_fock_level1(degree_bound=4)
    report = check_defining_relations(small, mode_window=2, max_degree=2,
                                      relations=("boson-commutator",))
    (r,) = report
    assert r["status"] == "pass"
    assert r["skipped"] > 0


def test_fock_grading_action(fock):
    v = fock.basis_vec((1, (2, 1)))  # degree 4
    assert fock.apply_qd(v, 1) == {(1, (2, 1)): qp(4)}
    assert vec_eq(fock.apply_qd(fock.apply_qd(v, -1), 1), v)


def test_fock_psi_derived_not_stored(fock):
    lam = qp(1) - qp(-1)
    v0 = fock.vacuum()
    # psi^+_0 = K acts as q^{2m} = 1 on the vacuum
    assert vec_eq(fock.apply("psi+", 0, v0), v0)
    # psi^+_1 |0> = K lam a_1 |0> = 0
    assert fock.apply("psi+", 1, v0) == {}
    # psi^-_{-1} |0> = K^{-1}(-lam a_{-1})|0>
    assert vec_eq(fock.apply("psi-", -1, v0), {(0, (1,)): -lam})
    view = fock.psi(-1)
    assert vec_eq(view.mode(-1, v0), {(0, (1,)): -lam})
    assert not hasattr(view, "set_mode")


# -- tensor products -----------------------------------------------------------

def test_tensor_level_additive_and_batteries():
    f = make_fock_level1(degree_bound=4)
    for cop in ("1", "2", "1op"):
        t = tensor_rep(f, f, cop)
        assert t.level == 2
        report = check_defining_relations(t, mode_window=1, max_degree=1,
                                          psi_window=1)
        assert all_pass(report) == [], cop


def test_tensor_triple_nesting():
    f = make_fock_level1(degree_bound=3)
    t = tensor_rep(tensor_rep(f, f, "1"), f, "1")
    assert t.level == 3
    report = check_defining_relations(
        t, mode_window=1, max_degree=1, psi_window=1,
        relations=("ef-commutator", "boson-current", "psi-plus-e-exchange"))
    assert all_pass(report) == []


def test_tensor_refuses_ungraded_slot(fock):
    with pytest.raises(ValueError, match="graded"):
        tensor_rep(make_evaluation_rep(), fock)
    with pytest.raises(ValueError, match="graded"):
        tensor_rep(fock, make_evaluation_rep())


def test_tensor_coproduct_of_e_on_vacuum():
    f = make_fock_level1(degree_bound=4)
    t = tensor_rep(f, f, "1")
    vac = ((0, ()), (0, ()))
    lam = qp(1) - qp(-1)
    out = t.apply("e", -1, t.basis_vec(vac))
    # e_{-1} (x) 1 and (j = 0 term) psi^-_0 (x) e_{-1} with weight q^{-c1(2n)/2}
    assert vec_eq(out, {
        ((1, ()), (0, ())): ONE,
        ((0, ()), (1, ())): sp(2),     # q^{-1*(-2)/2} * K^{-1} on m=0
    })
    out2 = t.apply("e", -2, t.basis_vec(vac))
    # the j = 1 cross term now contributes through psi^-_{-1}
    assert out2[((0, (1,)), (1, ()))] == sp(-(2 * (-2) + 1)) * (-lam)


# -- relation checker mechanics -------------------------------------------------

def test_checker_reports_witness_fields(fock):
    bad = CorruptedRep(fock, "a", 1, qp(1))
    report = check_defining_relations(bad, mode_window=1, max_degree=1,
                                      relations=("boson-current",))
    (r,) = report
    assert r["status"] == "fail"
    w = r["witness"]
    assert set(w) == {"parameters", "state", "component", "lhs", "rhs"}
    assert w["lhs"] != w["rhs"]


def test_checker_localizes_corruption(fock):
    # corrupting e_0 leaves the pure boson sector alone
    bad = CorruptedRep(fock, "e", 0, Scalar(2))
    report = check_defining_relations(
        bad, mode_window=1, max_degree=1,
        relations=("boson-commutator", "ef-commutator"))
    by_name = {r["relation"]: r["status"] for r in report}
    assert by_name == {"boson-commutator": "pass", "ef-commutator": "fail"}


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6))
def test_any_boson_corruption_is_caught(num, den):
    factor = Scalar(num) / Scalar(den) * qp(1)
    fock = make_fock_level1(degree_bound=4)
    bad = CorruptedRep(fock, "a", 1, factor)
    report = check_defining_relations(bad, mode_window=1, max_degree=1,
                                      relations=("boson-commutator",))
    assert report[0]["status"] == "fail"


def test_vec_helpers():
    v1 = {"x": qp(1), "y": ONE}
    v2 = {"x": -qp(1), "z": Scalar(2)}
    assert vec_add(v1, v2) == {"y": ONE, "z": Scalar(2)}
    assert vec_sub(v1, v1) == {}
    assert vec_scale(Scalar(0), v1) == {}
    assert vec_eq({}, {"x": Scalar(0)})
    assert not vec_eq(v1, v2)


# -- serialization ---------------------------------------------------------------

def test_dump_load_round_trip(fock):
    table = load_rep(dumps_rep(fock, mode_window=2, max_degree=3))
    assert table.level == 1 and table.graded
    labels = {table.label(i): i for i in table.basis()}
    v = table.basis_vec(labels["(0, ())"])
    out = table.apply("e", -1, v)
    assert out == {labels["(1, ())"]: ONE}
    report = check_defining_relations(table, mode_window=1, max_degree=1)
    assert all_pass(report) == []


def test_dump_never_stores_partial_vectors(fock):
    payload = dump_rep(fock, kinds=("a",), mode_window=2, max_degree=1)
    # a_{-2} on the degree-1 boson state lands at degree 3 > 1: must be null
    states = payload["states"]
    i = states.index("(0, (1,))")
    assert payload["actions"]["a_-2"][str(i)] is None
    table = load_rep(payload)
    with pytest.raises(TruncationError):
        table.apply("a", -2, table.basis_vec(i))
    # unknown kinds refuse rather than pretending to vanish
    with pytest.raises(TruncationError):
        table.apply("e", 0, table.basis_vec(0))


def test_parse_scalar_round_trip():
    cases = [ONE, -ONE, Scalar(0), qp(3), -qp(-2), sp(1), sp(-5), q_int(5),
             q_int(3) / q_int(2), (qp(2) - ONE) / (qp(1) + Scalar(3)),
             Scalar(7) / Scalar(3), sp(3) / q_int(2),
             -(sp(1) + ONE) / (sp(-1) + Scalar(2))]
    for c in cases:
        assert parse_scalar(str(c)) == c
