"""Exact arithmetic in Q(q^(1/2)): canonical forms, q-combinatorics, numerics."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from qcurrents.qarith import (
    ONE,
    ZERO,
    ParamScalar,
    Scalar,
    exp_p_coefficients,
    p_factorial,
    p_number,
    q_binomial,
    q_factorial,
    q_int,
    qp,
    sp,
)


def scalars(max_terms=4, max_exp=6, max_coeff=5):
    """Hypothesis strategy for random nonzero-denominator Scalars."""
    coeff = st.integers(-max_coeff, max_coeff)
    exp = st.integers(-max_exp, max_exp)
    poly = st.dictionaries(exp, coeff, min_size=1, max_size=max_terms)

    def build(num, den):
        den = {e: c for e, c in den.items() if c} or {0: 1}
        return Scalar(num, den)

    return st.builds(build, poly, poly)


def test_q_int_small_values():
    assert q_int(0) == ZERO
    assert q_int(1) == ONE
    assert q_int(2) == qp(1) + qp(-1)
    assert q_int(3) == qp(2) + ONE + qp(-2)
    assert str(q_int(3)) == "q^2 + 1 + q^-2"
    for n in range(1, 9):
        assert q_int(-n) == -q_int(n)


def test_q_int_recurrence():
    # [n+1] = q[n] + q^-n  (equivalently (q+q^-1)[n] - [n-1])
    for n in range(1, 10):
        assert q_int(n + 1) == q_int(2) * q_int(n) - q_int(n - 1)


def test_q_binomial_values():
    assert q_binomial(2, 1) == qp(1) + qp(-1)
    assert str(q_binomial(2, 1)) == "q + q^-1"
    assert q_binomial(4, 2) == q_binomial(4, 2)  # determinism
    # symmetry and boundary
    for n in range(6):
        assert q_binomial(n, 0) == ONE
        for k in range(n + 1):
            assert q_binomial(n, k) == q_binomial(n, n - k)


def test_q_binomial_pascal():
    # [n;k] = q^k [n-1;k] + q^(k-n) [n-1;k-1]
    for n in range(1, 7):
        for k in range(1, n):
            lhs = q_binomial(n, k)
            rhs = qp(k) * q_binomial(n - 1, k) + qp(k - n) * q_binomial(n - 1, k - 1)
            assert lhs == rhs


def test_q_factorial_denominator_free():
    for n in range(6):
        v = q_factorial(n)
        assert v.den == {0: 1}


def test_p_number_and_limit():
    q2 = qp(1)
    assert p_number(3, q2) == ONE + q2 + q2 * q2
    # (n)_p at p = 1 degenerates to the ordinary integer n
    for n in range(8):
        assert p_number(n, ONE) == Scalar(n)
    assert p_factorial(3, ONE) == Scalar(6)


def test_exp_p_low_order_coefficients():
    p = qp(2)
    cs = exp_p_coefficients(p, 4)
    assert cs[0] == ONE
    assert cs[1] == ONE
    # x^2 coefficient is 1/(2)_p! = 1/(1+p)
    assert cs[2] == (ONE + p).inverse()
    assert cs[3] == ((ONE + p) * (ONE + p + p * p)).inverse()


def test_exp_p_inverse_identity_order5():
    # exp_p(x) * exp_{1/p}(-x) = 1, checked coefficientwise through x^5
    p = qp(2)
    a = exp_p_coefficients(p, 5)
    b = exp_p_coefficients(p.inverse(), 5)
    for n in range(6):
        total = ZERO
        for k in range(n + 1):
            sign = ONE if (n - k) % 2 == 0 else -ONE
            total = total + a[k] * b[n - k] * sign
        assert total == (ONE if n == 0 else ZERO), f"order {n}: {total}"


def test_numeric_evaluation_q2():
    for n in range(-12, 13):
        v = q_int(n).evaluate(2.0)
        m = abs(n)
        want = sum(2.0 ** (m - 1 - 2 * j) for j in range(m))
        if n < 0:
            want = -want
        assert abs(v - want) < 1e-12, n
    # a genuine fraction
    r = (qp(3) - qp(-3)) / (qp(1) - qp(-1))
    assert abs(r.evaluate(2.0) - q_int(3).evaluate(2.0)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a
    assert a * ONE == a
    if not b.is_zero():
        assert (a / b) * b == a
        assert b * b.inverse() == ONE


@settings(max_examples=200, deadline=None)
@given(scalars())
def test_subtraction_gives_literal_zero(a):
    d = a - a
    assert d.is_zero()
    assert d.num == {}
    assert d == ZERO
    assert hash(d) == hash(ZERO)


@settings(max_examples=100, deadline=None)
@given(scalars())
def test_canonical_form_invariants(a):
    assert min(a.den) == 0
    assert a.den[max(a.den)] > 0
    if a.is_zero():
        assert a.num == {} and a.den == {0: 1}
    # re-normalizing canonical data is a fixed point
    assert Scalar(dict(a.num), dict(a.den)) == a


def test_reduction_cancels_common_factor():
    num = (qp(2) - ONE) * (qp(3) + Scalar(5))
    den = (qp(2) - ONE) * (qp(1) - Scalar(7))
    assert num / den == (qp(3) + Scalar(5)) / (qp(1) - Scalar(7))


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_powers():
    x = qp(1) + ONE
    assert x ** 0 == ONE
    assert x ** 3 == x * x * x
    assert x ** -2 == (x * x).inverse()
    assert sp(1) * sp(1) == qp(1)
    assert sp(-3) == qp(-1) * sp(-1)


def test_rendering():
    assert str(ZERO) == "0"
    assert str(ONE) == "1"
    assert str(qp(1)) == "q"
    assert str(sp(1)) == "q^(1/2)"
    assert str(sp(-3)) == "q^(-3/2)"
    assert str(Scalar(2) * qp(-2)) == "2*q^-2"
    assert str(ONE / (qp(1) + ONE)) == "(1) / (q + 1)"
    assert str(-qp(1) - ONE) == "-q - 1"


def test_int_interop():
    assert q_int(2) + 1 == qp(1) + qp(-1) + ONE
    assert 1 + q_int(2) == q_int(2) + 1
    assert 2 * q_int(2) == q_int(2) + q_int(2)
    assert q_int(2) - 1 == q_int(2) + (-1)
    assert ONE / 2 + ONE / 2 == ONE


def test_param_scalar_ring_ops():
    a = ParamScalar.symbol("a", ("a",))
    one = ParamScalar.from_scalar(ONE, ("a",))
    x = qp(1) * a + a * a
    assert (x - x).is_zero()
    assert x * one == x
    assert (a + a) == Scalar(2) * a
    # symbol-set unification
    b = ParamScalar.symbol("b", ("b",))
    w = a * b + b * a
    assert w.symbols == ("a", "b")
    assert w == Scalar(2) * a * b
    # scalar division
    assert (Scalar(2) * a) / Scalar(2) == a


def test_param_scalar_random_ring_axioms():
    rng = random.Random(11)
    syms = ("a",)
    atom = ParamScalar.symbol("a", syms)

    def rand():
        out = ParamScalar.from_scalar(ZERO, syms)
        for _ in range(rng.randint(1, 3)):
            term = ParamScalar.from_scalar(Scalar(rng.randint(-4, 4)), syms)
            for _ in range(rng.randint(0, 2)):
                term = term * atom
            out = out + qp(rng.randint(-2, 2)) * term
        return out

    for _ in range(60):
        x, y, z = rand(), rand(), rand()
        assert x * (y + z) == x * y + x * z
        assert (x * y) * z == x * (y * z)
        assert x + y == y + x
