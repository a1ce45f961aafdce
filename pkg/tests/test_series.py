"""Truncated Laurent windows, delta pairing, rational expansion, residues."""

import random

import pytest

from qcurrents.qarith import ONE, Scalar, ZERO, q_int, qp, sp
from qcurrents.series import (
    DeltaTerm,
    TruncatedLaurent,
    TruncationError,
    expand_rational,
    pair_delta,
    residue_simple_pole,
    residue_two_orderings,
    total_integral,
)


def test_default_window():
    t = TruncatedLaurent({0: ONE})
    assert (t.lo, t.hi) == (-8, 8)


def test_out_of_window_read_is_an_error():
    t = TruncatedLaurent({0: ONE}, lo=-2, hi=2)
    assert t.coeff(2) == ZERO
    assert t.coeff(0) == ONE
    with pytest.raises(TruncationError):
        t.coeff(3)
    with pytest.raises(TruncationError):
        t.coeff(-3)


def test_support_guarantees_extend_reads():
    t = TruncatedLaurent({1: ONE}, lo=0, hi=3, zero_below=True)
    assert t.coeff(-100) == ZERO
    with pytest.raises(TruncationError):
        t.coeff(4)
    p = TruncatedLaurent.polynomial({-1: ONE, 2: qp(1)})
    assert p.coeff(-50) == ZERO and p.coeff(50) == ZERO
    assert (p.lo, p.hi) == (-1, 2)


def test_construction_rejects_out_of_window_data():
    with pytest.raises(ValueError):
        TruncatedLaurent({5: ONE}, lo=0, hi=3)
    with pytest.raises(TruncationError):
        TruncatedLaurent({}, lo=2, hi=1)


def test_expand_rational_exchange_kernel():
    # (q^-2 - x) / (1 - q^-2 x), ascending, three terms
    g = expand_rational({0: qp(-2), 1: -ONE}, {0: ONE, 1: -qp(-2)},
                        "small", 2)
    assert g.coeff(0) == qp(-2)
    assert g.coeff(1) == qp(-4) - ONE
    assert g.coeff(2) == qp(-6) - qp(-2)
    assert g.zero_below and not g.zero_above


def test_expand_rational_big_direction():
    # 1/(z - a) = z^-1 + a z^-2 + ... for |z| > |a|
    a = qp(1)
    f = expand_rational({0: ONE}, {1: ONE, 0: -a}, "big", 4)
    for k in range(5):
        assert f.coeff(-1 - k) == a ** k
    assert f.zero_above and not f.zero_below


def test_expansions_multiply_soundly():
    x = expand_rational({0: ONE}, {0: ONE, 1: -ONE}, "small", 6)
    y = expand_rational({0: ONE}, {0: ONE, 1: -qp(1)}, "small", 6)
    p = x * y
    # 1/((1-z)(1-qz)): coefficient of z^n is [n+1] q^(n/2)-ish; check directly
    for n in range(p.hi + 1):
        want = ZERO
        for j in range(n + 1):
            want = want + qp(j)
        assert p.coeff(n) == want
    with pytest.raises(TruncationError):
        p.coeff(p.hi + 1)


def test_opposite_expansions_refuse_to_multiply():
    small = expand_rational({0: ONE}, {0: ONE, 1: -ONE}, "small", 6)
    big = expand_rational({0: ONE}, {0: ONE, 1: -ONE}, "big", 6)
    with pytest.raises(TruncationError):
        big * small


def test_polynomial_times_series_window():
    x = expand_rational({0: ONE}, {0: ONE, 1: -ONE}, "small", 5)
    p = TruncatedLaurent.polynomial({-1: ONE, 1: -ONE})
    y = p * x
    assert y.coeff(-1) == ONE
    assert y.coeff(0) == ONE
    for n in range(1, y.hi + 1):
        assert y.coeff(n) == ZERO
    with pytest.raises(TruncationError):
        y.coeff(y.hi + 1)


def test_two_orderings_vs_direct_residue():
    rng = random.Random(3)
    for _ in range(20):
        a = qp(rng.randint(-3, 3)) * Scalar(rng.randint(1, 4))
        k = rng.randint(0, 2)
        c = Scalar(rng.randint(1, 5))
        den = {k + 1: c, k: -c * a}  # c z^k (z - a)
        num = {e: Scalar(rng.randint(-4, 4)) * qp(rng.randint(-2, 2))
               for e in range(rng.randint(1, 3))}
        assert residue_simple_pole(num, den, a) == \
            residue_two_orderings(num, den, order=16)


def test_residue_rejects_double_pole():
    with pytest.raises(ZeroDivisionError):
        residue_simple_pole({0: ONE}, {2: ONE, 1: -Scalar(2), 0: ONE}, ONE)


def test_delta_is_paired_only():
    d = DeltaTerm(qp(2))
    with pytest.raises(TypeError):
        d.coeff(0)
    f = expand_rational({0: ONE}, {0: ONE, 1: -ONE}, "small", 6)
    with pytest.raises(TruncationError):
        d.pair(f)  # not a polynomial: pairing would need every coefficient


def test_delta_pairing_evaluates():
    a = qp(2)
    f = TruncatedLaurent.polynomial({-2: qp(1), 0: ONE, 3: Scalar(5)})
    assert pair_delta(DeltaTerm(a), f) == qp(-3) + ONE + Scalar(5) * qp(6)
    zero_poly = TruncatedLaurent.polynomial({})
    assert pair_delta(DeltaTerm(a), zero_poly) == ZERO


def test_total_integral_reads_z0():
    f = TruncatedLaurent.polynomial({-1: qp(5), 0: q_int(2), 2: ONE})
    assert total_integral(f) == q_int(2)
    g = TruncatedLaurent({0: ONE}, lo=-1, hi=1)
    assert total_integral(g) == ONE


def test_shift_and_rescale():
    f = TruncatedLaurent.polynomial({0: ONE, 1: ONE})
    g = f.shift(3)
    assert g.coeff(3) == ONE and g.coeff(4) == ONE
    h = f.rescale_arg(qp(2))  # z -> q^2 z
    assert h.coeff(0) == ONE and h.coeff(1) == qp(2)


def test_agrees_with_on_overlap():
    x = TruncatedLaurent({0: ONE, 1: qp(1)}, lo=-1, hi=2)
    y = TruncatedLaurent({0: ONE, 1: qp(1)}, lo=0, hi=5)
    assert x.agrees_with(y)
    z = TruncatedLaurent({0: ONE, 1: qp(2)}, lo=0, hi=5)
    assert not x.agrees_with(z)


def test_sum_intersects_windows():
    x = TruncatedLaurent({0: ONE}, lo=-4, hi=4)
    y = TruncatedLaurent({1: ONE}, lo=-2, hi=6)
    s = x + y
    assert (s.lo, s.hi) == (-2, 4)
    assert s.coeff(0) == ONE and s.coeff(1) == ONE
    with pytest.raises(TruncationError):
        s.coeff(5)
