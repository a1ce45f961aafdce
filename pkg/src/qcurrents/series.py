"""Truncated Laurent series with honest windows, and the residue/delta
calculus built on them.

A ``TruncatedLaurent`` knows its coefficients exactly on a window
[lo, hi] and refuses to answer outside it — a read past the horizon is an
error, never a silent zero.  Two optional guarantees extend the window:
``zero_below`` (the true support starts at lo) and ``zero_above``.  A
series with both is an ordinary Laurent polynomial.

Products propagate windows soundly: a coefficient of the product is only
exposed when every split that could contribute lies in the known region of
both factors.  When no coefficient survives, TruncationError is raised
instead of returning a vacuous object.

``DeltaTerm`` is the formal distribution delta(z/a); it has no readable
coefficients and only participates via pairing (integration against a
Laurent polynomial).
"""

from __future__ import annotations

from .qarith import ONE, Scalar, ZERO

_NEG_INF = float("-inf")
_POS_INF = float("inf")


class TruncationError(Exception):
    """A requested coefficient or operation exceeds what the truncation
    soundly determines.  Enlarging the window is the only fix."""


class TruncatedLaurent:
    """Laurent series known exactly on [lo, hi] (inclusive).

    coeffs: {exponent: value} with exponents inside the window; values are
    any ring elements (Scalar by default) supporting +, *, is_zero.
    """

    __slots__ = ("coeffs", "lo", "hi", "zero_below", "zero_above", "zero")

    def __init__(self, coeffs=None, lo=-8, hi=8, zero_below=False,
                 zero_above=False, zero=ZERO):
        if lo > hi:
            raise TruncationError(f"empty window [{lo}, {hi}]")
        self.lo, self.hi = lo, hi
        self.zero_below, self.zero_above = zero_below, zero_above
        self.zero = zero
        self.coeffs = {}
        if coeffs:
            for e, v in coeffs.items():
                if not (lo <= e <= hi):
                    raise ValueError(f"exponent {e} outside window [{lo},{hi}]")
                if not v.is_zero():
                    self.coeffs[e] = v

    @classmethod
    def polynomial(cls, coeffs, zero=ZERO):
        """Exact Laurent polynomial: window = support hull, both guarantees."""
        if coeffs:
            nz = [e for e, v in coeffs.items() if not v.is_zero()]
        else:
            nz = []
        if not nz:
            return cls({}, 0, 0, zero_below=True, zero_above=True, zero=zero)
        return cls({e: v for e, v in coeffs.items() if not v.is_zero()},
                   min(nz), max(nz), zero_below=True, zero_above=True,
                   zero=zero)

    def coeff(self, n):
        if self.lo <= n <= self.hi:
            return self.coeffs.get(n, self.zero)
        if n < self.lo and self.zero_below:
            return self.zero
        if n > self.hi and self.zero_above:
            return self.zero
        raise TruncationError(
            f"coefficient of z^{n} is outside the known window "
            f"[{self.lo}, {self.hi}]")

    def known(self, n):
        """True iff coeff(n) would succeed."""
        return (self.lo <= n <= self.hi or (n < self.lo and self.zero_below)
                or (n > self.hi and self.zero_above))

    def is_zero(self):
        return not self.coeffs

    # possible-support interval (coefficients outside are known zero)
    def _support(self):
        return (self.lo if self.zero_below else _NEG_INF,
                self.hi if self.zero_above else _POS_INF)

    # known-coefficient interval
    def _known_iv(self):
        return (_NEG_INF if self.zero_below else self.lo,
                _POS_INF if self.zero_above else self.hi)

    def __add__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        klo = max(self._known_iv()[0], other._known_iv()[0])
        khi = min(self._known_iv()[1], other._known_iv()[1])
        zb = self.zero_below and other.zero_below
        za = self.zero_above and other.zero_above
        slo = min(self._support()[0], other._support()[0])
        shi = max(self._support()[1], other._support()[1])
        lo = slo if klo == _NEG_INF else klo
        hi = shi if khi == _POS_INF else khi
        if lo == _NEG_INF or hi == _POS_INF:
            # both-sided guarantees with empty stored support
            lo, hi = 0, 0
        if lo > hi:
            raise TruncationError("sum has empty known window")
        out = TruncatedLaurent({}, int(lo), int(hi), zero_below=zb,
                               zero_above=za, zero=self.zero)
        for e in set(self.coeffs) | set(other.coeffs):
            if out.lo <= e <= out.hi:
                v = self.coeff(e) + other.coeff(e)
                if not v.is_zero():
                    out.coeffs[e] = v
        return out

    def __neg__(self):
        out = TruncatedLaurent({}, self.lo, self.hi, self.zero_below,
                               self.zero_above, self.zero)
        out.coeffs = {e: -v for e, v in self.coeffs.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        out = TruncatedLaurent({}, self.lo, self.hi, self.zero_below,
                               self.zero_above, self.zero)
        for e, v in self.coeffs.items():
            w = c * v
            if not w.is_zero():
                out.coeffs[e] = w
        return out

    def shift(self, k):
        """Multiply by z^k."""
        out = TruncatedLaurent({}, self.lo + k, self.hi + k, self.zero_below,
                               self.zero_above, self.zero)
        out.coeffs = {e + k: v for e, v in self.coeffs.items()}
        return out

    def rescale_arg(self, a):
        """Substitute z -> a*z: coefficient of z^n picks up a^n."""
        out = TruncatedLaurent({}, self.lo, self.hi, self.zero_below,
                               self.zero_above, self.zero)
        for e, v in self.coeffs.items():
            w = (a ** e) * v
            if not w.is_zero():
                out.coeffs[e] = w
        return out

    def __mul__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        sx, sy = self._support(), other._support()
        kx, ky = self._known_iv(), other._known_iv()
        # n is computable iff every split a + b = n with a in sx, b in sy
        # has a in kx and b in ky.
        lo_bounds, hi_bounds = [], []
        # a-side: worst a is sx-extreme clipped by n - sy
        #   need max(sx[0], n - sy[1]) >= kx[0]  and  min(sx[1], n-sy[0]) <= kx[1]
        # handled as interval constraints on n:
        if sx[0] < kx[0]:  # unknown low-a region exists
            if sy[1] == _POS_INF:
                raise TruncationError("product window empty (unbounded tails)")
            lo_bounds.append(kx[0] + sy[1])
        if sx[1] > kx[1]:
            if sy[0] == _NEG_INF:
                raise TruncationError("product window empty (unbounded tails)")
            hi_bounds.append(kx[1] + sy[0])
        if sy[0] < ky[0]:
            if sx[1] == _POS_INF:
                raise TruncationError("product window empty (unbounded tails)")
            lo_bounds.append(ky[0] + sx[1])
        if sy[1] > ky[1]:
            if sx[0] == _NEG_INF:
                raise TruncationError("product window empty (unbounded tails)")
            hi_bounds.append(ky[1] + sx[0])
        slo = sx[0] + sy[0]
        shi = sx[1] + sy[1]
        lo = max([slo] + lo_bounds) if slo != _NEG_INF else max(lo_bounds, default=_NEG_INF)
        hi = min([shi] + hi_bounds) if shi != _POS_INF else min(hi_bounds, default=_POS_INF)
        zb = self.zero_below and other.zero_below
        za = self.zero_above and other.zero_above
        if lo == _NEG_INF and hi == _POS_INF:
            raise TruncationError("product window empty (unbounded tails)")
        if lo == _NEG_INF:
            lo = hi - 2 * _DEFAULT_SPAN
        if hi == _POS_INF:
            hi = lo + 2 * _DEFAULT_SPAN
        lo, hi = int(lo), int(hi)
        if lo > hi:
            raise TruncationError(f"product window empty: [{lo}, {hi}]")
        out = TruncatedLaurent({}, lo, hi, zero_below=zb, zero_above=za,
                               zero=self.zero)
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = e1 + e2
                if lo <= e <= hi:
                    v = v1 * v2
                    w = out.coeffs.get(e)
                    w = v if w is None else w + v
                    if w.is_zero():
                        out.coeffs.pop(e, None)
                    else:
                        out.coeffs[e] = w
        return out

    def truncate(self, lo, hi):
        """Restrict to a smaller window (keeping guarantees where valid)."""
        if lo < self.lo and not self.zero_below:
            raise TruncationError(f"cannot widen window below {self.lo}")
        if hi > self.hi and not self.zero_above:
            raise TruncationError(f"cannot widen window above {self.hi}")
        out = TruncatedLaurent({}, lo, hi, self.zero_below, self.zero_above,
                               self.zero)
        for e, v in self.coeffs.items():
            if lo <= e <= hi:
                out.coeffs[e] = v
        return out

    def agrees_with(self, other):
        """Equality of coefficients over the overlap of known windows."""
        lo = max(self._known_iv()[0], other._known_iv()[0])
        hi = min(self._known_iv()[1], other._known_iv()[1])
        if lo > hi:
            raise TruncationError("no overlap between known windows")
        lo = max(int(lo) if lo != _NEG_INF else min(self.lo, other.lo),
                 min(self.lo, other.lo))
        hi = min(int(hi) if hi != _POS_INF else max(self.hi, other.hi),
                 max(self.hi, other.hi))
        return all((self.coeff(n) - other.coeff(n)).is_zero()
                   for n in range(lo, hi + 1))

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        return (self.lo, self.hi, self.zero_below, self.zero_above,
                self.coeffs) == (other.lo, other.hi, other.zero_below,
                                 other.zero_above, other.coeffs)

    def __str__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({self.coeffs[e]})*z^{e}"
                              for e in sorted(self.coeffs))
        return f"{body}   [window {self.lo}..{self.hi}]"

    def __repr__(self):
        return f"TruncatedLaurent({self})"


_DEFAULT_SPAN = 8


class DeltaTerm:
    """The formal delta distribution delta(z/a) = sum_k (z/a)^k.

    It has no individually meaningful coefficients: any attempt to read one
    raises.  Its only consumption is pairing against a Laurent polynomial,
    which evaluates that polynomial at z = a.
    """

    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg  # Scalar a in delta(z/a)

    def coeff(self, n):
        raise TypeError("DeltaTerm is paired-only; it has no readable "
                        "coefficients")

    def pair(self, series):
        """Integral of delta(z/a) * series over dz/(2 pi i z) = series(a)."""
        if not (series.zero_below and series.zero_above):
            raise TruncationError(
                "delta pairing needs an exact Laurent polynomial")
        total = None
        for e, v in series.coeffs.items():
            t = (self.arg ** e) * v
            total = t if total is None else total + t
        return series.zero if total is None else total

    def __repr__(self):
        return f"DeltaTerm(z / ({self.arg}))"


def pair_delta(delta, series):
    """Pair a DeltaTerm against a Laurent polynomial: the delta integral."""
    return delta.pair(series)


def total_integral(series):
    """Integral over dz/(2 pi i z): the z^0 coefficient."""
    return series.coeff(0)


def expand_rational(num, den, direction="small", order=8):
    """Expand a rational Laurent fraction P(z)/Q(z) as a series.

    INPUT: num, den as {exponent: Scalar} dicts; direction 'small' expands
    in ascending powers (geometric in z), 'big' in descending powers
    (geometric in 1/z); ``order``+1 coefficients are produced.
    OUTPUT: TruncatedLaurent with the matching one-sided support guarantee.
    """
    num = {e: v for e, v in num.items() if not v.is_zero()}
    den = {e: v for e, v in den.items() if not v.is_zero()}
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return TruncatedLaurent({}, 0, 0, zero_below=True, zero_above=True)
    if direction == "small":
        pivot = min(den)
        lead = den[pivot]
        rest = {e - pivot: v for e, v in den.items() if e != pivot}
        start = min(num) - pivot
        sgn = +1
    elif direction == "big":
        pivot = max(den)
        lead = den[pivot]
        rest = {e - pivot: v for e, v in den.items() if e != pivot}
        start = max(num) - pivot
        sgn = -1
    else:
        raise ValueError(f"direction must be 'small' or 'big', not {direction!r}")
    inv = lead.inverse()
    out = {}
    # long division: coefficients from `start` moving inward
    work = {e - pivot: v for e, v in num.items()}
    for step in range(order + 1):
        e = start + sgn * step
        c = work.get(e)
        if c is None or c.is_zero():
            out[e] = ZERO
            work.pop(e, None)
            continue
        c = c * inv
        out[e] = c
        del work[e]
        for de, dv in rest.items():
            k = e + de
            w = work.get(k, ZERO) - c * dv
            if w.is_zero():
                work.pop(k, None)
            else:
                work[k] = w
    lo, hi = (start, start + order) if sgn > 0 else (start - order, start)
    return TruncatedLaurent({e: v for e, v in out.items() if not v.is_zero()},
                            lo, hi,
                            zero_below=(sgn > 0), zero_above=(sgn < 0))


def residue_simple_pole(num, den, pole):
    """Residue of P(z)/Q(z) at a simple root ``pole`` of Q: P(a)/Q'(a)."""
    def ev(poly, a):
        total = ZERO
        for e, v in poly.items():
            total = total + v * a ** e
        return total

    dprime = {e - 1: Scalar(e) * v for e, v in den.items() if e != 0}
    dv = ev(dprime, pole)
    if dv.is_zero():
        raise ZeroDivisionError("pole is not simple")
    return ev(num, pole) / dv


def residue_two_orderings(num, den, order=16):
    """Residue sum over all finite nonzero poles, via the two expansions.

    The big-z and small-z expansions of P/Q agree except for the poles
    between the two contours; the z^-1 coefficient of their difference is
    the total residue there.  Cross-oracle for residue_simple_pole when Q
    has a single nonzero root.
    """
    big = expand_rational(num, den, "big", order)
    small = expand_rational(num, den, "small", order)
    b = big.coeff(-1) if big.known(-1) else ZERO
    s = small.coeff(-1) if small.known(-1) else ZERO
    return b - s
