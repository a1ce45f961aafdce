"""Exact scalar arithmetic over the field Q(q^(1/2)).

A ``Scalar`` is a reduced fraction of sparse integer Laurent polynomials in
s = q^(1/2).  Working over s rather than q keeps half-integer q-powers
(ubiquitous once central charges enter current arguments) exact without any
extension bookkeeping.

Canonical form, maintained by every operation:

- numerator and denominator share no polynomial factor and no integer
  content beyond +-1;
- the denominator's lowest s-exponent is 0 and its leading (highest
  exponent) integer coefficient is positive;
- zero is represented with an empty numerator and denominator {0: 1}.

Two equal values therefore have identical dictionaries, so ``==`` and
``hash`` are structural and ``str`` is deterministic.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd as _int_gcd


def _content(d):
    g = 0
    for c in d.values():
        g = _int_gcd(g, abs(c))
        if g == 1:
            return 1
    return g or 1


def _poly_divexact(num, den_g):
    """Divide polynomial dict ``num`` by dict ``den_g`` exactly (list math)."""
    if den_g == {0: 1}:
        return dict(num)
    nlo, nhi = min(num), max(num)
    glo, ghi = min(den_g), max(den_g)
    a = [Fraction(num.get(e, 0)) for e in range(nlo, nhi + 1)]
    b = [Fraction(den_g.get(e, 0)) for e in range(glo, ghi + 1)]
    qd = len(a) - len(b)
    out = [Fraction(0)] * (qd + 1)
    lead = b[-1]
    for i in range(qd, -1, -1):
        c = a[i + len(b) - 1] / lead
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    assert all(x == 0 for x in a[: len(b) - 1]), "inexact polynomial division"
    res = {}
    for i, c in enumerate(out):
        if c:
            assert c.denominator == 1
            res[nlo - glo + i] = int(c)
    return res


def _poly_gcd(p1, p2):
    """Primitive gcd (positive leading coeff) of two polynomial dicts with
    nonzero constant terms.  Euclid over Q, then primitivized."""
    a = _dense(p1)
    b = _dense(p2)
    while b:
        a, b = b, _poly_mod(a, b)
    # primitivize
    den_lcm = 1
    for c in a:
        den_lcm = den_lcm * c.denominator // _int_gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in a]
    g = 0
    for c in ints:
        g = _int_gcd(g, abs(c))
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return {i: c for i, c in enumerate(ints) if c}


def _dense(p):
    lo, hi = min(p), max(p)
    assert lo == 0
    return [Fraction(p.get(i, 0)) for i in range(hi + 1)]


def _poly_mod(a, b):
    a = list(a)
    db, lead = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        c = a[-1] / lead
        off = len(a) - 1 - db
        for j in range(db + 1):
            a[off + j] -= c * b[j]
        while a and a[-1] == 0:
            a.pop()
    return a


_ONE_DICT = {0: 1}


class Scalar:
    """Element of Q(s), s = q^(1/2), as a canonical reduced fraction.

    INPUT to the constructor: either an int/Fraction, or two exponent->coeff
    dicts (trusted to be canonical only when ``_normalized=True``).
    Prefer the module helpers ``sp(k)``, ``qp(k)``, ``from_int``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=None, _normalized=False):
        if den is None:
            if isinstance(num, Scalar):
                self.num, self.den = num.num, num.den
                return
            if isinstance(num, Fraction):
                self.num = {0: num.numerator} if num.numerator else {}
                self.den = {0: num.denominator}
                return
            self.num = {0: int(num)} if num else {}
            self.den = dict(_ONE_DICT)
            return
        if _normalized:
            self.num, self.den = num, den
            return
        self.num, self.den = _normalize(num, den)

    # -- predicates ----------------------------------------------------
    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == _ONE_DICT and self.den == _ONE_DICT

    def __bool__(self):
        return bool(self.num)

    # -- ring/field ops ------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if self.den == other.den:
            num = dict(self.num)
            for e, c in other.num.items():
                c2 = num.get(e, 0) + c
                if c2:
                    num[e] = c2
                elif e in num:
                    del num[e]
            if self.den == _ONE_DICT:
                return Scalar(num, dict(_ONE_DICT), _normalized=True)
            return Scalar(num, dict(self.den))
        num = _poly_mul_add(self.num, other.den, other.num, self.den)
        return Scalar(num, _poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar({e: -c for e, c in self.num.items()}, dict(self.den),
                      _normalized=True)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if not self.num or not other.num:
            return ZERO
        num = _poly_mul(self.num, other.num)
        if self.den == _ONE_DICT and other.den == _ONE_DICT:
            return Scalar(num, dict(_ONE_DICT), _normalized=True)
        return Scalar(num, _poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverting zero Scalar")
        return Scalar(dict(self.den), dict(self.num))

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar(other) * self.inverse()

    def __pow__(self, k):
        if k == 0:
            return ONE
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    # -- comparisons ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(sorted(self.num.items())),
                     tuple(sorted(self.den.items()))))

    # -- output --------------------------------------------------------
    def __str__(self):
        if not self.num:
            return "0"
        ns = _poly_str(self.num)
        if self.den == _ONE_DICT:
            return ns
        return f"({ns}) / ({_poly_str(self.den)})"

    def __repr__(self):
        return f"Scalar[{self}]"

    def evaluate(self, q):
        """Numeric value at a concrete q (complex), via s = principal sqrt(q).

        Even s-exponents are computed as integer powers of q directly, so
        they stay exact when q is (e.g.) a power of two.
        """
        s = cmath.sqrt(q)

        def term(e, c):
            if e % 2 == 0:
                return c * q ** (e // 2)
            return c * q ** ((e - 1) // 2) * s

        nv = sum(term(e, c) for e, c in self.num.items())
        dv = sum(term(e, c) for e, c in self.den.items())
        return nv / dv

    def evaluate_s(self, s):
        """Value at a concrete s = q^(1/2); exact for Fraction inputs."""
        nv = sum(c * s ** e for e, c in self.num.items())
        dv = sum(c * s ** e for e, c in self.den.items())
        return nv / dv


def _poly_mul(p1, p2):
    out = {}
    if len(p1) > len(p2):
        p1, p2 = p2, p1
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            e = e1 + e2
            c = out.get(e, 0) + c1 * c2
            if c:
                out[e] = c
            elif e in out:
                del out[e]
    return out


def _poly_mul_add(a, b, c, d):
    """a*b + c*d for polynomial dicts."""
    out = _poly_mul(a, b)
    for e1, c1 in c.items():
        for e2, c2 in d.items():
            e = e1 + e2
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


def _normalize(num, den):
    num = {e: c for e, c in num.items() if c}
    den = {e: c for e, c in den.items() if c}
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return {}, dict(_ONE_DICT)
    nlo = min(num)
    dlo = min(den)
    n = {e - nlo: c for e, c in num.items()}
    d = {e - dlo: c for e, c in den.items()}
    cn, cd = _content(n), _content(d)
    if d != _ONE_DICT and n != _ONE_DICT:
        g = _poly_gcd({e: c // cn for e, c in n.items()},
                      {e: c // cd for e, c in d.items()})
        if g != _ONE_DICT:
            n = _poly_divexact(n, g)
            d = _poly_divexact(d, g)
            cn, cd = _content(n), _content(d)
    r = Fraction(cn, cd)
    n = {e: c // cn * r.numerator for e, c in n.items()}
    d = {e: c // cd * r.denominator for e, c in d.items()}
    if d[max(d)] < 0:
        n = {e: -c for e, c in n.items()}
        d = {e: -c for e, c in d.items()}
    shift = nlo - dlo
    n = {e + shift: c for e, c in n.items()}
    return n, d


def _poly_str(p):
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        if e == 0:
            term = str(abs(c))
        else:
            qe = f"q^{e // 2}" if e % 2 == 0 else f"q^({e}/2)"
            if e // 2 == 1 and e % 2 == 0:
                qe = "q"
            term = qe if abs(c) == 1 else f"{abs(c)}*{qe}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts)


ZERO = Scalar(0)
ONE = Scalar(1)


def sp(k):
    """Monomial s^k = q^(k/2)."""
    return Scalar({k: 1}, dict(_ONE_DICT), _normalized=True)


def qp(k):
    """Monomial q^k."""
    return sp(2 * k)


def from_int(n):
    return Scalar(n)


def q_int(n):
    """Symmetric q-integer [n] = (q^n - q^-n)/(q - q^-1).

    OUTPUT: Scalar; [0] = 0, [-n] = -[n], e.g. [3] = q^2 + 1 + q^-2.
    """
    if n == 0:
        return ZERO
    sign = 1 if n > 0 else -1
    n = abs(n)
    num = {2 * (n - 1 - 2 * j): sign for j in range(n)}
    return Scalar(num, dict(_ONE_DICT))


def q_factorial(n):
    """[n]! = [1][2]...[n] (n >= 0)."""
    if n < 0:
        raise ValueError("q_factorial needs n >= 0")
    out = ONE
    for k in range(2, n + 1):
        out = out * q_int(k)
    return out


def q_binomial(n, k):
    """Gaussian binomial [n; k] = [n]!/([k]![n-k]!) for 0 <= k <= n."""
    if not 0 <= k <= n:
        raise ValueError("q_binomial needs 0 <= k <= n")
    return q_factorial(n) / (q_factorial(k) * q_factorial(n - k))


def p_number(n, p):
    """(n)_p = 1 + p + ... + p^(n-1) = (p^n - 1)/(p - 1).

    ``p`` is any Scalar.  At p = 1 the sum form is the limit and simply
    returns the integer n (as a Scalar); no special casing needed.
    """
    if n < 0:
        raise ValueError("p_number needs n >= 0")
    out = ZERO
    term = ONE
    for _ in range(n):
        out = out + term
        term = term * p
    return out


def p_factorial(n, p):
    """(n)_p! = (1)_p (2)_p ... (n)_p."""
    if n < 0:
        raise ValueError("p_factorial needs n >= 0")
    out = ONE
    for k in range(2, n + 1):
        out = out * p_number(k, p)
    return out


def exp_p_coefficients(p, order):
    """Coefficients [1, 1/(1)_p!, ..., 1/(order)_p!] of the p-exponential
    exp_p(x) = sum_n x^n/(n)_p!.

    OUTPUT: list of order+1 Scalars; entry n multiplies x^n.
    """
    out = [ONE]
    fact = ONE
    for n in range(1, order + 1):
        fact = fact * p_number(n, p)
        out.append(fact.inverse())
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials in declared formal symbols with Scalar coefficients.
# ---------------------------------------------------------------------------

class ParamScalar:
    """Laurent polynomial in formal parameters (e.g. evaluation parameters
    a, b) over Scalar.  A ring, not a field: division is only by Scalars.

    data: dict mapping exponent tuples (one slot per symbol) to Scalar.
    """

    __slots__ = ("symbols", "data")

    def __init__(self, symbols=(), data=None):
        self.symbols = tuple(symbols)
        d = {}
        if data:
            for k, v in data.items():
                if isinstance(v, (int, Fraction)):
                    v = Scalar(v)
                if not v.is_zero():
                    d[tuple(k)] = v
        self.data = d

    @classmethod
    def from_scalar(cls, v, symbols=()):
        v = v if isinstance(v, Scalar) else Scalar(v)
        if v.is_zero():
            return cls(symbols, {})
        return cls(symbols, {(0,) * len(symbols): v})

    @classmethod
    def symbol(cls, name, symbols):
        i = symbols.index(name)
        key = tuple(1 if j == i else 0 for j in range(len(symbols)))
        return cls(symbols, {key: ONE})

    def _unified(self, other):
        if self.symbols == other.symbols:
            return self, other
        syms = tuple(sorted(set(self.symbols) | set(other.symbols)))
        return self._remap(syms), other._remap(syms)

    def _remap(self, syms):
        idx = [syms.index(s) for s in self.symbols]
        out = {}
        for k, v in self.data.items():
            k2 = [0] * len(syms)
            for i, e in zip(idx, k):
                k2[i] = e
            out[tuple(k2)] = v
        return ParamScalar(syms, out)

    def is_zero(self):
        return not self.data

    def __bool__(self):
        return bool(self.data)

    def __add__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            other = ParamScalar.from_scalar(Scalar(other), self.symbols)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        a, b = self._unified(other)
        out = dict(a.data)
        for k, v in b.data.items():
            w = out.get(k)
            w = v if w is None else w + v
            if w.is_zero():
                out.pop(k, None)
            else:
                out[k] = w
        return ParamScalar(a.symbols, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(self.symbols, {k: -v for k, v in self.data.items()})

    def __sub__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            other = ParamScalar.from_scalar(Scalar(other), self.symbols)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            c = Scalar(other)
            if c.is_zero():
                return ParamScalar(self.symbols, {})
            return ParamScalar(self.symbols,
                               {k: v * c for k, v in self.data.items()})
        if not isinstance(other, ParamScalar):
            return NotImplemented
        a, b = self._unified(other)
        out = {}
        for k1, v1 in a.data.items():
            for k2, v2 in b.data.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                v = v1 * v2
                w = out.get(k)
                w = v if w is None else w + v
                if w.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = w
        return ParamScalar(a.symbols, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = Scalar(other) if not isinstance(other, Scalar) else other
        return self * c.inverse()

    def __eq__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            other = ParamScalar.from_scalar(Scalar(other), self.symbols)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        a, b = self._unified(other)
        return a.data == b.data

    def __hash__(self):
        return hash((self.symbols,
                     tuple(sorted((k, hash(v)) for k, v in self.data.items()))))

    def __str__(self):
        if not self.data:
            return "0"
        parts = []
        for k in sorted(self.data):
            mono = "*".join(f"{s}^{e}" for s, e in zip(self.symbols, k) if e)
            coeff = str(self.data[k])
            parts.append(f"({coeff})*{mono}" if mono else f"({coeff})")
        return " + ".join(parts)

    def __repr__(self):
        return f"ParamScalar[{self}]"
