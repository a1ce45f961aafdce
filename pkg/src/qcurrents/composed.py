"""Composed currents, their component formulas, and the tensor fields t(z).

A single current x(z) = sum_n x_n z^{-n} on a truncated graded module admits
iterated "fusion" products obtained by taking residues at the shifted
diagonal z_1 = q^{2(n-1)} z:

    e^{(n)}(z) =  Res_{z_1 = q^{2(n-1)}z} e(z_1) e^{(n-1)}(z) dz_1/z_1,
    f^{(n)}(z) =  Res_{z_1 = q^{2(n-1)}z} f^{(n-1)}(z) f(z_1) dz_1/z_1,
    t^{(n)}(z) = -Res_{z_1 = q^{2(n-1)}z} t(z_1) t^{(n-1)}(z) dz_1/z_1,

with t(z) = (q^{-1} - q) f(z) (x) e(z) acting slotwise on a pair W (x) V.
Up to an overall constant, e^{(n)}(z) is the regularized product
etilde^{(n)}(z) = e(z)e(q^2 z)...e(q^{2(n-1)}z), and similarly
ftilde^{(n)}(z) = f(q^{2(n-1)}z)...f(q^2 z)f(z); these vanish identically
on modules of level < n.

All evaluations here are exact mode computations on truncated modules.
Residues are taken as the difference of the two one-sided mode expansions
of the same rational correlation function: if R(z_1, z_2) denotes the
common rational continuation of both operator orderings, then

    sum of residues between the contours
        = [z_1^0](left ordering) - [z_1^0](kernel * right ordering),

where the kernel is the finite product of exchange factors
g'(x) = (q^{-2} - x)/(1 - q^{-2}x) (e-currents) or
g(x)  = (q^2 - x)/(1 - q^2 x)     (f-currents) expanded as a one-sided
series.  When the correlation has a single pole between the contours the
difference IS the residue; when it has several (the t-chain, and general
products of composed currents), the per-mode differences are separated
into delta-supported families by solving an exact Vandermonde system in
the pole positions.

Products of composed currents at specialized points (needed on the right
side of the residue recursion formulas) never terminate as naive mode
sums; they are summed exactly by rational reconstruction: multiply the
one-sided series by the known denominator, check that the result is a
Laurent polynomial within the window (with a safety margin), then
evaluate.  A window too small to exhibit the polynomial tail raises
TruncationError rather than returning an unsound value.
"""

from dataclasses import dataclass

from .qarith import (ONE, ZERO, Scalar, from_int, qp, sp, q_int,
                     q_factorial, p_factorial)
from .series import TruncationError, expand_rational
from .affinerep import AlgebraError, vec_add, vec_sub, vec_scale, vec_eq

_MINUS_ONE = from_int(-1)


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def _degree_cap(rep):
    """Largest module degree representable in the truncation window."""
    cap = getattr(rep, "degree_bound", None)
    if cap is not None:
        return cap
    cap = getattr(rep, "_composed_degree_cap", None)
    if cap is None:
        states = rep.basis()
        if not states:
            raise ValueError("module has an empty basis")
        cap = max(rep.degree(k) for k in states)
        rep._composed_degree_cap = cap
    return cap


def _pmul(p1, p2):
    """Product of two {exponent: Scalar} polynomials."""
    out = {}
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            e = e1 + e2
            w = c1 * c2
            prev = out.get(e)
            w = w if prev is None else prev + w
            if w.is_zero():
                out.pop(e, None)
            else:
                out[e] = w
    return out


def _vec_is_zero(vec):
    return all(c.is_zero() for c in vec.values())


def _node_pow(expnt, a):
    """(q^expnt)^a as an exact Scalar, any sign of a."""
    return sp(2 * expnt * a)


# ---------------------------------------------------------------------------
# normalization constants
# ---------------------------------------------------------------------------

def eft_constant(n):
    """Ratio e^{(n)}(z) / etilde^{(n)}(z): (q - q^{-1})^{n-1} [n-1]!int [n]!.

    The same constant relates f^{(n)} to ftilde^{(n)}.  It is the product
    of the per-step residue factors (q - q^{-1})[k][k-1], k = 2..n, which
    telescopes.
    """
    c = ONE
    for _ in range(n - 1):
        c = c * (qp(1) - qp(-1))
    return c * q_factorial(n - 1) * q_factorial(n)


def comp1_constant(n):
    """Ratio t^{(n)}(z) / (ftilde^{(n)} (x) etilde^{(n)}):
    (q^{-1} - q)^{2n-1} [n-1]! [n]!."""
    c = ONE
    for _ in range(2 * n - 1):
        c = c * (qp(-1) - qp(1))
    return c * q_factorial(n - 1) * q_factorial(n)


def rre_constant(base, k):
    """(q - q^{-1}) prod_{j=0}^{k-1} [base+j][base+j+1] / ([j][j+1]) with
    the empty-bracket convention [0] -> 1 at j = 0."""
    c = qp(1) - qp(-1)
    for j in range(k):
        c = c * q_int(base + j) * q_int(base + j + 1)
        den = (ONE if j == 0 else q_int(j)) * q_int(j + 1)
        c = c / den
    return c


# ---------------------------------------------------------------------------
# exchange kernels
# ---------------------------------------------------------------------------

def _kernel_e_chain(count, order):
    """prod_{i=0}^{count-1} g'(q^{-2i} x) expanded in ascending powers of x.

    This is the factor picked up when e(z_1) is moved from the left to the
    right of e(z_2)e(q^2 z_2)...e(q^{2(count-1)} z_2), written in x = z_1/z_2.
    """
    num = {0: ONE}
    den = {0: ONE}
    for i in range(count):
        num = _pmul(num, {0: qp(-2), 1: _MINUS_ONE * qp(-2 * i)})
        den = _pmul(den, {0: ONE, 1: _MINUS_ONE * qp(-2 * i - 2)})
    return expand_rational(num, den, direction="small", order=order)


def _kernel_f_chain(count, order):
    """prod_{i=0}^{count-1} g(q^{2i}/x) expanded in descending powers of x,
    x = z_1/z_2: the factor for moving f(z_1) from right to left across
    f(q^{2(count-1)}z_2)...f(q^2 z_2)f(z_2)."""
    num = {0: ONE}
    den = {0: ONE}
    for i in range(count):
        # g(q^{2i}/x) = (q^2 x - q^{2i}) / (x - q^{2i+2})
        num = _pmul(num, {1: qp(2), 0: _MINUS_ONE * qp(2 * i)})
        den = _pmul(den, {1: ONE, 0: _MINUS_ONE * qp(2 * i + 2)})
    return expand_rational(num, den, direction="big", order=order)


def _kernel_group(kind, n, m, order):
    """Kernel for exchanging xtilde^{(n)}(z_1) past xtilde^{(m)}(z_2):
    prod_{k=0}^{m-1} prod_{l=0}^{n-1} g'(q^{2(l-k)} x) for e-currents and
    the same product of g for f-currents, expanded in ascending x.

    The exponent pairs the l-th constituent of the z_1 current (sitting at
    q^{2l} z_1) with the k-th constituent of the z_2 current (at q^{2k} z_2).
    """
    num = {0: ONE}
    den = {0: ONE}
    lead = qp(-2) if kind == "e" else qp(2)
    shift = -2 if kind == "e" else 2
    for k in range(m):
        for l in range(n):
            num = _pmul(num, {0: lead, 1: _MINUS_ONE * qp(2 * (l - k))})
            den = _pmul(den, {0: ONE, 1: _MINUS_ONE * qp(2 * (l - k) + shift)})
    return expand_rational(num, den, direction="small", order=order)


# ---------------------------------------------------------------------------
# OperatorLaurent: a current presented by its mode action
# ---------------------------------------------------------------------------

class OperatorLaurent:
    """A current X(z) = sum_M X_M z^{-M} presented through its mode action
    on a truncated module (or pair space).

    ``mode_on_key(M, key)`` returns X_M applied to a basis vector, raising
    TruncationError when the window cannot support the mode exactly;
    ``mode`` extends linearly to vectors.  The coefficient of z^{-M} always
    shifts the total module degree down by M, whatever the number of
    current factors X was fused from.
    """

    def __init__(self, space, mode_on_key, label="x(z)", factors=1):
        self.space = space
        self._mode_on_key = mode_on_key
        self.label = label
        self.factors = factors

    def mode_on_key(self, M, key):
        return dict(self._mode_on_key(M, key))

    def mode(self, M, vec):
        out = {}
        for key, c in vec.items():
            w = self._mode_on_key(M, key)
            if w:
                out = vec_add(out, vec_scale(c, w))
        return out

    def __repr__(self):
        return f"OperatorLaurent({self.label} on {getattr(self.space, 'name', self.space)})"


# ---------------------------------------------------------------------------
# the residue chains e^{(n)}, f^{(n)}
# ---------------------------------------------------------------------------

class _ResidueChain:
    """Iterated-residue modes of one kind of current on one module.

    Level n modes are computed from level n-1 by the two-ordering
    difference.  For the e-chain the correlation e(z_1) etilde^{(n-1)}(z_2)
    has a single simple pole at z_1 = q^{2(n-1)} z_2 between the contours,
    so with K(x) the e-chain kernel,

        e^{(n)}_M = [x^0]{ e(z_1) Y(z_2) } - [x^0]{ K(x) Y(z_2) e(z_1) }
                  = e_0 Y_M - sum_{j>=0} K_j Y_{M-j} e_j ,

    and every intermediate vector sits at or below max(input, output)
    degree, so no truncation slack is lost.  The f-chain mirrors this with
    the new factor on the right:

        f^{(n)}_M = sum_{j>=0} K_j f_{-j} F_{M+j} - F_M f_0 .

    Modes are raw (no normalization divided out); ``eft_constant(n)``
    relates them to the regularized products.
    """

    def __init__(self, rep, kind):
        if kind not in ("e", "f"):
            raise ValueError(f"chain kind must be 'e' or 'f', got {kind!r}")
        self.rep = rep
        self.kind = kind
        self.cap = _degree_cap(rep)
        self._cache = {}
        self._kernels = {}

    def _kernel(self, count, order):
        have = self._kernels.get(count)
        if have is None or have[0] < order:
            if self.kind == "e":
                ker = _kernel_e_chain(count, order + 1)
            else:
                ker = _kernel_f_chain(count, order + 1)
            self._kernels[count] = (order, ker)
            return ker
        return have[1]

    def mode_vec(self, n, M, vec):
        out = {}
        for key, c in vec.items():
            w = self.mode(n, M, key)
            if w:
                out = vec_add(out, vec_scale(c, w))
        return out

    def mode(self, n, M, key):
        ck = (n, M, key)
        hit = self._cache.get(ck)
        if hit is not None:
            if isinstance(hit, TruncationError):
                raise hit
            return hit
        try:
            out = self._compute(n, M, key)
        except TruncationError as err:
            self._cache[ck] = err
            raise
        self._cache[ck] = out
        return out

    def _compute(self, n, M, key):
        rep = self.rep
        if n == 0:
            return {key: rep.one_coeff()} if M == 0 else {}
        if n == 1:
            return rep.apply(self.kind, M, {key: rep.one_coeff()})
        d = rep.degree(key)
        if M > d:
            return {}
        if d - M > self.cap:
            raise TruncationError(
                f"{self.kind}^({n}) mode {M} on degree-{d} state leaves the "
                f"degree window (cap {self.cap})")
        one = rep.one_coeff()
        if self.kind == "e":
            term1 = rep.apply("e", 0, self.mode_vec(n - 1, M, {key: one}))
            jmax = d
            ker = self._kernel(n - 1, jmax)
            term2 = {}
            for j in range(jmax + 1):
                kj = ker.coeff(j)
                if kj.is_zero():
                    continue
                ev = rep.apply("e", j, {key: one})
                if not ev:
                    continue
                term2 = vec_add(term2, vec_scale(kj, self.mode_vec(n - 1, M - j, ev)))
            return vec_sub(term1, term2)
        # f-chain
        jmax = d - M
        term1 = {}
        ker = self._kernel(n - 1, jmax)
        for j in range(jmax + 1):
            kj = ker.coeff(-j)
            if kj.is_zero():
                continue
            fv = self.mode(n - 1, M + j, key)
            if not fv:
                continue
            term1 = vec_add(term1, vec_scale(kj, rep.apply("f", -j, fv)))
        term2 = self.mode_vec(n - 1, M, rep.apply("f", 0, {key: one}))
        return vec_sub(term1, term2)


def _chain(rep, kind):
    reg = getattr(rep, "_composed_chains", None)
    if reg is None:
        reg = {}
        rep._composed_chains = reg
    ch = reg.get(kind)
    if ch is None:
        ch = _ResidueChain(rep, kind)
        reg[kind] = ch
    return ch


def composed_e(rep, n):
    """The iterated-residue current e^{(n)}(z) on ``rep`` (raw modes)."""
    ch = _chain(rep, "e")
    return OperatorLaurent(rep, lambda M, key: ch.mode(n, M, key),
                           label=f"e^({n})(z)", factors=n)


def composed_f(rep, n):
    """The iterated-residue current f^{(n)}(z) on ``rep`` (raw modes)."""
    ch = _chain(rep, "f")
    return OperatorLaurent(rep, lambda M, key: ch.mode(n, M, key),
                           label=f"f^({n})(z)", factors=n)


# ---------------------------------------------------------------------------
# partition component formulas for the regularized products
# ---------------------------------------------------------------------------

class _PartitionFamily:
    """Component formula for the regularized products on bounded-below
    modules.

    With parts mu_1 <= ... <= mu_n summing to M and m_v the multiplicity
    of the part value v,

      etilde^{(n)}_M = sum_mu  q^{-2 sum_j (j-1) mu_j} / prod_v (m_v)_{q^2}!
                               e_{mu_1} ... e_{mu_n},
      ftilde^{(n)}_M = sum_mu  q^{-2 sum_j (n-j) mu_j} / prod_v (m_v)_{q^{-2}}!
                               f_{mu_1} ... f_{mu_n},

    the rightmost (largest) mode acting first.  Ordering the parts this
    way makes every partial application lower the degree below the input
    state (or at worst up to the output degree for raising total modes),
    so each mode inside the output window is computed without truncation
    loss; the sum over parts is finite because every suffix of applied
    modes must keep the intermediate degree nonnegative.
    """

    def __init__(self, rep, kind):
        if kind not in ("e", "f"):
            raise ValueError(f"partition kind must be 'e' or 'f', got {kind!r}")
        self.rep = rep
        self.kind = kind
        self.cap = _degree_cap(rep)
        self.p = qp(2) if kind == "e" else qp(-2)
        self._cache = {}

    def mode_vec(self, n, M, vec):
        out = {}
        for key, c in vec.items():
            w = self.mode(n, M, key)
            if w:
                out = vec_add(out, vec_scale(c, w))
        return out

    def mode(self, n, M, key):
        ck = (n, M, key)
        hit = self._cache.get(ck)
        if hit is not None:
            if isinstance(hit, TruncationError):
                raise hit
            return hit
        try:
            out = self._compute(n, M, key)
        except TruncationError as err:
            self._cache[ck] = err
            raise
        self._cache[ck] = out
        return out

    def _compute(self, n, M, key):
        rep = self.rep
        if n == 0:
            return {key: rep.one_coeff()} if M == 0 else {}
        if n == 1:
            return rep.apply(self.kind, M, {key: rep.one_coeff()})
        d = rep.degree(key)
        if M > d:
            return {}
        if d - M > self.cap:
            raise TruncationError(
                f"{self.kind}~^({n}) mode {M} on degree-{d} state leaves the "
                f"degree window (cap {self.cap})")
        out = {}
        start = {key: rep.one_coeff()}
        for contrib in self._descend(n, M, None, start, []):
            out = vec_add(out, contrib)
        return out

    def _descend(self, k, remaining, prev, vec, parts):
        """Choose the k-th part from the top (position k of the ascending
        tuple), apply it, and recurse; yield completed weighted vectors."""
        rep = self.rep
        dcur = rep.degree(next(iter(vec)))
        hi = dcur if prev is None else min(prev, dcur)
        if k == 1:
            if remaining > hi:
                return
            nv = rep.apply(self.kind, remaining, vec)
            if not nv:
                return
            full = parts + [remaining]
            yield vec_scale(self._weight(full), nv)
            return
        lo = -(-remaining // k)  # ceil: the top part is at least the average
        for part in range(hi, lo - 1, -1):
            nv = rep.apply(self.kind, part, vec)
            if not nv:
                continue
            yield from self._descend(k - 1, remaining - part, part, nv,
                                     parts + [part])

    def _weight(self, parts_desc):
        """Weight for one tuple; ``parts_desc`` lists positions n..1."""
        return _partition_weight(self.kind, tuple(reversed(parts_desc)))


def _partition(rep, kind):
    reg = getattr(rep, "_composed_partitions", None)
    if reg is None:
        reg = {}
        rep._composed_partitions = reg
    fam = reg.get(kind)
    if fam is None:
        fam = _PartitionFamily(rep, kind)
        reg[kind] = fam
    return fam


def composed_e_partition(rep, n):
    """The regularized product etilde^{(n)}(z) by its component formula."""
    fam = _partition(rep, "e")
    return OperatorLaurent(rep, lambda M, key: fam.mode(n, M, key),
                           label=f"e~^({n})(z)", factors=n)


def composed_f_partition(rep, n):
    """The regularized product ftilde^{(n)}(z) by its component formula."""
    fam = _partition(rep, "f")
    return OperatorLaurent(rep, lambda M, key: fam.mode(n, M, key),
                           label=f"f~^({n})(z)", factors=n)


def _partition_weight(kind, parts):
    """Weight of one mode tuple in the component formula.

    ``parts`` is weakly increasing, mu_1 <= ... <= mu_n; the associated
    operator word applies modes right to left (largest mode first).
    """
    n = len(parts)
    expnt = 0
    for j, part in enumerate(parts, start=1):
        if kind == "e":
            expnt += -2 * (j - 1) * part
        else:
            expnt += -2 * (n - j) * part
    w = qp(expnt)
    p = qp(2) if kind == "e" else qp(-2)
    mult = {}
    for part in parts:
        mult[part] = mult.get(part, 0) + 1
    for m_v in mult.values():
        if m_v > 1:
            w = w / p_factorial(m_v, p)
    return w


@dataclass(frozen=True)
class PartitionTerm:
    """One term of the component formula for a regularized product mode.

    ``parts`` is the weakly increasing mode tuple (mu_1, ..., mu_n); the
    term contributes ``coefficient`` times the word x_{mu_1} ... x_{mu_n}
    with the rightmost (largest) mode acting first.
    """

    parts: tuple
    coefficient: Scalar


def partition_terms(kind, n, m, max_part):
    """Enumerate the component-formula terms for x~^{(n)} at total mode m.

    Only tuples with every part <= ``max_part`` are produced; on a module
    a single mode above the degree of the state it acts on annihilates it,
    so ``max_part = degree(state)`` recovers the full action.  The list is
    finite because the least part is bounded below by m - (n-1)*max_part.
    """
    if kind not in ("e", "f"):
        raise ValueError(f"partition kind must be 'e' or 'f', got {kind!r}")
    if n < 0:
        raise ValueError("need n >= 0 current factors")
    if n == 0:
        return []
    out = []

    def descend(k, remaining, hi, chosen):
        if k == 1:
            if remaining <= hi:
                parts = tuple(reversed(chosen + [remaining]))
                out.append(PartitionTerm(parts,
                                         _partition_weight(kind, parts)))
            return
        lo = -(-remaining // k)  # ceil: the top part is at least the average
        for part in range(hi, lo - 1, -1):
            descend(k - 1, remaining - part, part, chosen + [part])

    descend(n, m, max_part, [])
    return out


# ---------------------------------------------------------------------------
# direct evaluation of x(z) x(q^2 z) by rational reconstruction (n = 2)
# ---------------------------------------------------------------------------

def product_pair_mode(rep, kind, M, key, margin=2):
    """Modes of e(z)e(q^2 z) (resp. f(q^2 z)f(z)) summed exactly.

    The naive mode sum of a product at proportional points does not
    terminate; per basis vector the one-sided series

        W_b = x_{M-b} x_b |key>,   b in the window [deg - cap, deg],

    has a geometric tail governed by the single correlation pole.
    Multiplying by the linear denominator turns it into a Laurent
    polynomial: P_b = W_b - q^{+-2} W_{b+1} must vanish identically at the
    bottom ``margin`` window entries (else the window is too small and
    TruncationError is raised).  The specialized product is then the
    evaluation of P at the fusion point divided by the denominator there.
    """
    cap = _degree_cap(rep)
    d = rep.degree(key)
    if M > d:
        return {}
    if d - M > cap:
        raise TruncationError(
            f"specialized product mode {M} on degree-{d} state leaves the "
            f"degree window (cap {cap})")
    one = rep.one_coeff()
    blo, bhi = d - cap, d
    if margin > bhi - blo:
        raise TruncationError(
            f"window of {bhi - blo + 1} entries cannot certify a tail "
            f"margin of {margin}")
    W = {}
    for b in range(blo, bhi + 1):
        inner = rep.apply(kind, b, {key: one})
        W[b] = rep.apply(kind, M - b, inner)
    r = qp(2) if kind == "e" else qp(-2)
    P = {}
    for b in range(blo, bhi + 1):
        up = W.get(b + 1, {})
        P[b] = vec_sub(W[b], vec_scale(r, up)) if up else W[b]
    for b in range(blo, blo + margin):
        if not _vec_is_zero(P[b]):
            raise TruncationError(
                "window too small to expose the rational tail of the "
                f"specialized {kind}-product (degree-{d} state, mode {M})")
    out = {}
    if kind == "e":
        # value = P(q^{-2}) / (1 - q^4), no prefactor
        den = ONE - qp(4)
        for b in range(blo, bhi + 1):
            if P[b]:
                out = vec_add(out, vec_scale(qp(-2 * b) / den, P[b]))
    else:
        # value = q^{-2M} P(q^2) / (1 - q^{-4})
        den = ONE - qp(-4)
        pref = qp(-2 * M)
        for b in range(blo, bhi + 1):
            if P[b]:
                out = vec_add(out, vec_scale(pref * qp(2 * b) / den, P[b]))
    return out


# ---------------------------------------------------------------------------
# pole/zero bookkeeping for products of regularized currents
# ---------------------------------------------------------------------------

def lemma_pole_zero(kind, n, m):
    """Claimed pole and zero positions (as exponents eps with x = q^eps,
    x = z_1/z_2) of matrix coefficients of xtilde^{(n)}(z_1) xtilde^{(m)}(z_2).

    Each adjacent pair of elementary currents contributes one simple pole
    (at the exchange-kernel pole) and one simple zero (on the coincidence
    diagonal); overlapping contributions cancel in the product, leaving
    min(n, m) of each.
    """
    if kind == "e":
        poles = [2 * k for k in range(max(1, m - n + 1), m + 1)]
        zeros = [2 * j for j in range(-n + 1, min(0, m - n) + 1)]
    else:
        poles = [-2 * k for k in range(max(1, n - m + 1), n + 1)]
        zeros = [2 * j for j in range(max(0, m - n), m)]
    return poles, zeros


def pole_required_level(kind, n, m, eps):
    """Module level needed for the pole at x = q^eps to carry a nonzero
    residue: the residue closes into xtilde^{(n+k)} (e) or xtilde^{(m+k)}
    (f), which vanishes identically below that level."""
    k = abs(eps) // 2
    return n + k if kind == "e" else m + k


def _ordered_series(rep, kind, n1, n2, s, key):
    """One-sided mode series of xtilde^{(n1)}(z_1) xtilde^{(n2)}(z_2) on a
    basis vector at total mode s: the window {A: X^{(n1)}_A X^{(n2)}_{s-A}}
    over every A the truncation supports, as a dict of vectors.

    Below the window the entries vanish exactly (the inner mode lowers past
    the bottom of the module); above it they are unknowable.  The window
    holds at most cap+1 entries and is trimmed at the first entry the
    truncation cannot support (raising gets monotonically deeper with A,
    so everything above the first failure is unsupported too).
    """
    fam = _partition(rep, kind)
    cap = _degree_cap(rep)
    d = rep.degree(key)
    lo, hi = s - d, cap - (d - s)
    if hi < lo:
        raise TruncationError(
            f"total mode {s} on degree-{d} state leaves the degree window")
    out = {}
    for A in range(lo, hi + 1):
        try:
            inner = fam.mode(n2, s - A, key)
            out[A] = fam.mode_vec(n1, A, inner) if inner else {}
        except TruncationError:
            if not out:
                raise
            break
    return out


def _clear_poles(series, poles):
    """Multiply a windowed series {A: vec} by prod_p (1 - q^{eps_p}/x);
    entries below the window count as exact zeros."""
    lo = min(series)
    hi = max(series)
    cur = dict(series)
    for eps in poles:
        w = qp(eps)
        nxt = {}
        for A in range(lo, hi + 1):
            below = cur.get(A - 1, {})
            nxt[A] = vec_sub(cur[A], vec_scale(w, below)) if below else cur[A]
        cur = nxt
    return cur


def _specialized_composed_product(rep, kind, n1, n2, eval_exp, s, key, margin=2):
    """s-mode of xtilde^{(n1)}(z_2) xtilde^{(n2)}(q^{eval_exp} z_2) on a
    basis vector, summed by rational reconstruction.

    Requires q^{-eval_exp} to be a regular point of the (n1, n2) product
    (true at every specialization used by the residue recursion formulas).
    """
    fam = _partition(rep, kind)
    # a trivial factor needs no reconstruction: the product IS the other
    # current, picking up q^{-eval_exp*s} when it is the specialized one
    if n1 == 0:
        return vec_scale(sp(-2 * eval_exp * s), fam.mode(n2, s, key))
    if n2 == 0:
        return fam.mode(n1, s, key)
    poles, _ = lemma_pole_zero(kind, n1, n2)
    if -eval_exp in poles:
        raise ValueError("specialization point sits on a pole of the product")
    series = _ordered_series(rep, kind, n1, n2, s, key)
    P = _clear_poles(series, poles)
    hi = max(P)
    for A in range(hi - margin + 1, hi + 1):
        if not _vec_is_zero(P[A]):
            raise TruncationError(
                f"window too small to expose the rational tail of the "
                f"({n1},{n2}) {kind}-product on a degree-{rep.degree(key)} state")
    # value of the cleared polynomial at x = q^{-eval_exp}, divided by the
    # denominator there, with the overall z_2^{-s} prefactor q^{eval_exp*s}
    val = {}
    for A, vec in P.items():
        if vec:
            val = vec_add(val, vec_scale(_node_pow(-eval_exp, -A), vec))
    den = ONE
    for eps in poles:
        den = den * (ONE - qp(eps + eval_exp))
    return vec_scale(sp(-2 * eval_exp * s) / den, val)


# ---------------------------------------------------------------------------
# exact Vandermonde separation of delta families
# ---------------------------------------------------------------------------

def _solve_delta_families(rows, node_exps):
    """Given rows {a: vector} with rows[a] = sum_r (q^{node_exps[r]})^a F_r,
    solve for the family vectors F_r exactly and verify every remaining row.

    Returns the list of F_r.  Raises TruncationError if there are not
    enough rows (need len(node_exps) + 1) and AlgebraError if the
    verification rows are inconsistent with the ansatz.
    """
    k = len(node_exps)
    avail = sorted(rows)
    if len(avail) < k + 1:
        raise TruncationError(
            f"need {k + 1} sound rows to separate {k} delta families, "
            f"have {len(avail)}")
    solve_rows = avail[:k]
    # Gaussian elimination on the k x k system M[i][r] = node_r^{a_i}
    mat = [[_node_pow(node_exps[r], a) for r in range(k)] for a in solve_rows]
    rhs = [dict(rows[a]) for a in solve_rows]
    for col in range(k):
        piv = None
        for i in range(col, k):
            if not mat[i][col].is_zero():
                piv = i
                break
        if piv is None:
            raise AlgebraError("degenerate delta-node system")
        mat[col], mat[piv] = mat[piv], mat[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = ONE / mat[col][col]
        mat[col] = [c * inv for c in mat[col]]
        rhs[col] = vec_scale(inv, rhs[col])
        for i in range(k):
            if i == col:
                continue
            f = mat[i][col]
            if f.is_zero():
                continue
            mat[i] = [ci - f * cj for ci, cj in zip(mat[i], mat[col])]
            rhs[i] = vec_sub(rhs[i], vec_scale(f, rhs[col]))
    families = rhs
    for a in avail[k:]:
        recon = {}
        for r in range(k):
            if families[r]:
                recon = vec_add(recon,
                                vec_scale(_node_pow(node_exps[r], a),
                                          families[r]))
        if not vec_eq(recon, rows[a]):
            raise AlgebraError(
                f"delta-family ansatz fails verification at row {a}: the "
                f"correlation has support outside the claimed poles")
    return families


# ---------------------------------------------------------------------------
# tensor pair space and the fields t^{(n)}(z)
# ---------------------------------------------------------------------------

class PairSpace:
    """W (x) V with f-currents acting on the first slot and e-currents on
    the second; the home of t(z) = (q^{-1} - q) f(z) (x) e(z).

    This is a plain vector-space tensor product: t-modes apply slot-local
    operators simultaneously,

        t_M = (q^{-1} - q) sum_{a+b=M} f_a (x) e_b ,

    with the b-window finite on both sides (e_b kills b > deg_V, f_{M-b}
    kills b < M - deg_W).  A mode is computed exactly whenever every
    in-window term fits the slot truncations; otherwise TruncationError
    propagates from the slot that overflows.
    """

    def __init__(self, rep_f, rep_e):
        if not (rep_f.graded and rep_e.graded):
            raise ValueError("pair slots must be energy-graded modules")
        self.rep_f = rep_f
        self.rep_e = rep_e
        self.name = f"pair[{rep_f.name} (x) {rep_e.name}]"
        self._tcoef = qp(-1) - qp(1)

    def one_coeff(self):
        return self.rep_f.one_coeff() * self.rep_e.one_coeff()

    def degree(self, key):
        return self.rep_f.degree(key[0]) + self.rep_e.degree(key[1])

    def basis(self, max_degree=None):
        out = []
        for kw in self.rep_f.basis(max_degree):
            dw = self.rep_f.degree(kw)
            rest = None if max_degree is None else max_degree - dw
            for kv in self.rep_e.basis(rest):
                out.append((kw, kv))
        return out

    def t_mode_key(self, M, key):
        kw, kv = key
        dw = self.rep_f.degree(kw)
        dv = self.rep_e.degree(kv)
        out = {}
        onef = self.rep_f.one_coeff()
        onee = self.rep_e.one_coeff()
        for b in range(M - dw, dv + 1):
            fvec = self.rep_f.apply("f", M - b, {kw: onef})
            if not fvec:
                continue
            evec = self.rep_e.apply("e", b, {kv: onee})
            if not evec:
                continue
            for k1, c1 in fvec.items():
                for k2, c2 in evec.items():
                    w = self._tcoef * c1 * c2
                    pk = (k1, k2)
                    prev = out.get(pk)
                    w = w if prev is None else prev + w
                    if w.is_zero():
                        out.pop(pk, None)
                    else:
                        out[pk] = w
        return out

    def t_mode(self, M, vec):
        out = {}
        for key, c in vec.items():
            w = self.t_mode_key(M, key)
            if w:
                out = vec_add(out, vec_scale(c, w))
        return out


class _TChain:
    """Iterated-residue modes of the tensor fields t^{(n)}(z).

    The exchange kernel of t-currents is identically 1 (the e- and f-side
    kernels are mutually inverse), so the two-ordering mode difference is
    the plain commutator; but the correlation t(z_1) t^{(n-1)}(z_2) has TWO
    simple poles between the contours, at z_1 = q^{2(n-1)} z_2 (e-side)
    and z_1 = q^{-2} z_2 (f-side).  The commutator rows

        D_a = [t_a, t^{(n-1)}_{s-a}]  =  c_1^a F_1 + c_2^a F_2

    are therefore separated by an exact Vandermonde solve in the two pole
    positions, with every extra row verified; the defining residue keeps
    the family at the e-side pole, t^{(n)}_s = -F_1.
    """

    def __init__(self, pair):
        self.pair = pair
        self._cache = {}

    def mode_vec(self, n, M, vec):
        out = {}
        for key, c in vec.items():
            w = self.mode(n, M, key)
            if w:
                out = vec_add(out, vec_scale(c, w))
        return out

    def mode(self, n, M, key, rows=4):
        ck = (n, M, key)
        hit = self._cache.get(ck)
        if hit is not None:
            if isinstance(hit, TruncationError):
                raise hit
            return hit
        try:
            out = self._compute(n, M, key, rows)
        except TruncationError as err:
            self._cache[ck] = err
            raise
        self._cache[ck] = out
        return out

    def _compute(self, n, s, key, rows):
        pair = self.pair
        if n == 1:
            return pair.t_mode_key(s, key)
        one = pair.one_coeff()
        node_exps = (2 * (n - 1), -2)
        drows = {}
        a = 0
        tried = 0
        while len(drows) < rows and tried < rows + 4:
            try:
                inner = self.mode_vec(n - 1, s - a, {key: one})
                left = pair.t_mode(a, inner)
                tvec = pair.t_mode_key(a, key)
                right = self.mode_vec(n - 1, s - a, tvec)
                drows[a] = vec_sub(left, right)
            except TruncationError:
                pass
            a += 1
            tried += 1
        families = _solve_delta_families(drows, node_exps)
        return vec_scale(_MINUS_ONE, families[0])


def composed_t(V, W, n):
    """The tensor field t^{(n)}(z) on the pair V (x) W by the inductive
    residue; V carries the f-half, W the e-half."""
    pair = V if isinstance(V, PairSpace) else PairSpace(V, W)
    ch = getattr(pair, "_t_chain", None)
    if ch is None:
        ch = _TChain(pair)
        pair._t_chain = ch
    return OperatorLaurent(pair, lambda M, key: ch.mode(n, M, key),
                           label=f"t^({n})(z)", factors=n)


def composed_t_factorized(V, W, n):
    """t^{(n)}(z) through its factorized form: the constant
    (q^{-1}-q)^{2n-1}[n-1]![n]! times ftilde^{(n)}(z) (x) etilde^{(n)}(z)."""
    pair = V if isinstance(V, PairSpace) else PairSpace(V, W)
    famf = _partition(pair.rep_f, "f")
    fame = _partition(pair.rep_e, "e")
    cn = comp1_constant(n)

    def mode_on_key(M, key):
        kw, kv = key
        dw = pair.rep_f.degree(kw)
        dv = pair.rep_e.degree(kv)
        out = {}
        for b in range(M - dw, dv + 1):
            fvec = famf.mode(n, M - b, kw)
            if not fvec:
                continue
            evec = fame.mode(n, b, kv)
            if not evec:
                continue
            for k1, c1 in fvec.items():
                for k2, c2 in evec.items():
                    w = cn * c1 * c2
                    pk = (k1, k2)
                    prev = out.get(pk)
                    w = w if prev is None else prev + w
                    if w.is_zero():
                        out.pop(pk, None)
                    else:
                        out[pk] = w
        return out

    return OperatorLaurent(pair, mode_on_key,
                           label=f"t^({n})(z) [factorized]", factors=n)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _report(relation, parameters, status, witness=None, lhs="", rhs=""):
    return {
        "relation": relation,
        "parameters": parameters,
        "status": status,
        "witness_coefficient": witness,
        "lhs": lhs,
        "rhs": rhs,
    }


def _first_difference(v1, v2):
    keys = set(v1) | set(v2)
    for key in sorted(keys, key=repr):
        c1 = v1.get(key, ZERO)
        c2 = v2.get(key, ZERO)
        if not (c1 - c2).is_zero():
            return f"state {key!r}: {c1} != {c2}"
    return None


def level_vanishing_check(rep, n=2, max_degree=None, mode_window=None):
    """xtilde^{(n)} == 0 on a module of level < n: both the component
    formula and the raw residue chain must vanish identically."""
    if rep.level >= n:
        raise ValueError("vanishing holds only above the module level")
    cap = _degree_cap(rep)
    if max_degree is None:
        max_degree = cap
    checked = 0
    skipped = 0
    for kind in ("e", "f"):
        fam = _partition(rep, kind)
        ch = _chain(rep, kind)
        for key in rep.basis(max_degree):
            d = rep.degree(key)
            lo, hi = d - cap, d
            if mode_window is not None:
                lo, hi = max(lo, -mode_window), min(hi, mode_window)
            for M in range(lo, hi + 1):
                try:
                    v1 = fam.mode(n, M, key)
                    v2 = ch.mode(n, M, key)
                except TruncationError:
                    skipped += 1
                    continue
                checked += 1
                if not (_vec_is_zero(v1) and _vec_is_zero(v2)):
                    which = "component" if not _vec_is_zero(v1) else "residue"
                    return _report(
                        "level-vanishing", {"n": n, "level": rep.level,
                                            "kind": kind, "mode": M},
                        "fail",
                        witness=f"{which} evaluation nonzero on {key!r}",
                        lhs=f"{kind}~^({n})_{M} |{key!r}>", rhs="0")
    status = "pass" if checked else "insufficient-truncation"
    return _report("level-vanishing",
                   {"n": n, "level": rep.level, "checked": checked,
                    "skipped": skipped},
                   status, lhs=f"e~^({n}); f~^({n})", rhs="0")


def triple_agreement_check(rep, n=2, max_degree=None, mode_window=6):
    """Residue chain vs scaled component formula vs direct product, for
    both current kinds.  The three evaluations are independent: the chain
    iterates two-ordering residues, the component formula sums weighted
    partitions, and (for n = 2) the direct product sums the specialized
    series by rational reconstruction."""
    cap = _degree_cap(rep)
    if max_degree is None:
        max_degree = cap
    cn = eft_constant(n)
    checked = 0
    skipped = 0
    for kind in ("e", "f"):
        fam = _partition(rep, kind)
        ch = _chain(rep, kind)
        for key in rep.basis(max_degree):
            d = rep.degree(key)
            for M in range(max(d - cap, -mode_window), min(d, mode_window) + 1):
                try:
                    raw = ch.mode(n, M, key)
                    part = fam.mode(n, M, key)
                except TruncationError:
                    skipped += 1
                    continue
                checked += 1
                scaled = vec_scale(cn, part)
                if not vec_eq(raw, scaled):
                    return _report(
                        "composed-triple-agreement",
                        {"n": n, "kind": kind, "mode": M},
                        "fail",
                        witness=_first_difference(raw, scaled),
                        lhs=f"{kind}^({n})_{M} (residue) on {key!r}",
                        rhs=f"const * {kind}~^({n})_{M} (components)")
                if n == 2:
                    try:
                        direct = product_pair_mode(rep, kind, M, key)
                    except TruncationError:
                        skipped += 1
                        continue
                    if not vec_eq(part, direct):
                        return _report(
                            "composed-triple-agreement",
                            {"n": n, "kind": kind, "mode": M},
                            "fail",
                            witness=_first_difference(part, direct),
                            lhs=f"{kind}~^({n})_{M} (components) on {key!r}",
                            rhs="specialized product (reconstruction)")
    status = "pass" if checked else "insufficient-truncation"
    return _report("composed-triple-agreement",
                   {"n": n, "checked": checked, "skipped": skipped,
                    "constant": str(cn)},
                   status,
                   lhs=f"x^({n}) (residue)",
                   rhs=f"(q-q^-1)^{n - 1}[n-1]![n]! * x~^({n}) == direct product")


def pole_zero_scan(rep, n, m, kind="e", states=None, s=None, margin=2):
    """Locate the poles and zeros of matrix coefficients of
    xtilde^{(n)}(z_1) xtilde^{(m)}(z_2) in x = z_1/z_2 and compare with the
    claimed lists.

    ``s`` is the total mode of the scanned families: an int, or a list to
    aggregate over.  Mode support of the fused currents shifts with the
    weight sectors (the lattice part of the degree is quadratic in the
    sector), so a single total mode can leave every pole invisible from
    the scanned states.  By default the symmetric range -(n+m)..(n+m) is
    swept for coverage, then s keeps descending until every claimed pole
    the level can support has been witnessed (or a level-derived floor is
    reached).

    Scanning is per matrix coefficient: the windowed mode series of each
    output component, times the claimed denominator, must become a Laurent
    polynomial whose support ends at least ``margin`` entries below the
    window top (components still running at the top are unverifiable and
    skipped).  Each verified polynomial must vanish at every claimed zero;
    at every claimed pole it must either be witnessed nonzero on some
    coefficient (when the module level can support the residue current)
    or vanish exactly (when it cannot); a control point off both lists
    must be nonzero somewhere.  All arithmetic is exact.
    """
    poles, zeros = lemma_pole_zero(kind, n, m)
    must_vanish = [eps for eps in poles
                   if rep.level < pole_required_level(kind, n, m, eps)]
    must_witness = [eps for eps in poles if eps not in must_vanish]
    if states is None:
        states = rep.basis(2)
    ctrl = 2 * (max(abs(e) for e in poles + zeros) + 2)
    pole_seen = {eps: False for eps in must_witness}
    ctrl_seen = False
    usable = 0
    scanned = []

    def satisfied():
        return usable and ctrl_seen and all(pole_seen.values())

    def sweep(s_tot):
        """Scan one total mode; return a failure report or None."""
        nonlocal usable, ctrl_seen
        scanned.append(s_tot)
        for key in states:
            try:
                series = _ordered_series(rep, kind, n, m, s_tot, key)
            except TruncationError:
                continue
            P = _clear_poles(series, poles)
            hi = max(P)
            components = {}
            for A, vec in P.items():
                for w, c in vec.items():
                    if not c.is_zero():
                        components.setdefault(w, {})[A] = c
            for w, entries in components.items():
                if max(entries) > hi - margin:
                    continue  # tail still running at the window top
                usable += 1

                def eval_at(expnt):
                    val = ZERO
                    for A, c in entries.items():
                        val = val + c * _node_pow(expnt, -A)
                    return val

                for eps in zeros + must_vanish:
                    val = eval_at(eps)
                    if not val.is_zero():
                        what = ("zero" if eps in zeros
                                else "level-suppressed pole")
                        return _report(
                            "pole-zero-lists",
                            {"kind": kind, "n": n, "m": m, what: f"q^{eps}"},
                            "fail",
                            witness=f"<{w!r}| P(q^{eps}) |{key!r}> = {val}",
                            lhs=f"P(q^{eps})", rhs="0")
                for eps in must_witness:
                    if not pole_seen[eps] and not eval_at(eps).is_zero():
                        pole_seen[eps] = True
                if not ctrl_seen and not eval_at(ctrl).is_zero():
                    ctrl_seen = True
        return None

    if s is None:
        for s_tot in range(n + m, -(n + m) - 1, -1):
            bad = sweep(s_tot)
            if bad is not None:
                return bad
        floor = -(n + m) * (max(1, rep.level) + 1)
        s_tot = -(n + m) - 1
        while not satisfied() and s_tot >= floor:
            bad = sweep(s_tot)
            if bad is not None:
                return bad
            s_tot -= 1
    else:
        s_list = [s] if isinstance(s, int) else list(s)
        for s_tot in s_list:
            bad = sweep(s_tot)
            if bad is not None:
                return bad
    if not usable:
        return _report("pole-zero-lists",
                       {"kind": kind, "n": n, "m": m},
                       "insufficient-truncation",
                       lhs="poles " + str(poles), rhs="zeros " + str(zeros))
    missing = [f"q^{eps}" for eps, seen in pole_seen.items() if not seen]
    if missing or not ctrl_seen:
        return _report(
            "pole-zero-lists", {"kind": kind, "n": n, "m": m},
            "fail",
            witness=("claimed poles never witnessed: " + ", ".join(missing))
            if missing else "control point evaluates to zero on all states",
            lhs="poles " + str(poles), rhs="zeros " + str(zeros))
    return _report("pole-zero-lists",
                   {"kind": kind, "n": n, "m": m, "coefficients": usable,
                    "total_modes": scanned,
                    "level_suppressed_poles": [f"q^{e}" for e in must_vanish]},
                   "pass",
                   lhs="poles q^" + str(poles), rhs="zeros q^" + str(zeros))


def residue_product_check(rep, kind, n, m, k, states=None, s=None, margin=2):
    """The residue of xtilde^{(n)}(z_1) xtilde^{(m)}(z_2) dz_1/z_1 at its
    pole closes back into composed currents:

      e-side, pole z_1 = q^{2k} z_2, max(1, m-n+1) <= k <= m:
        (q-q^{-1}) prod_{j<k} [n+j][n+j+1]/([j][j+1])
            * etilde^{(n+k)}(z_2) etilde^{(m-k)}(q^{2k} z_2),
      f-side, pole z_1 = q^{-2k} z_2, max(1, n-m+1) <= k <= n:
        (q^{-1}-q) prod_{j<k} [m+j][m+j+1]/([j][j+1])
            * ftilde^{(n-k)}(z_2) ftilde^{(m+k)}(q^{-2k} z_2),

    with [0] -> 1 at j = 0 and the 0-th composed current the identity.
    The left side is extracted by separating the delta families of the
    two-ordering difference; the right side is summed by rational
    reconstruction at its (provably regular) specialization point.
    """
    poles, _ = lemma_pole_zero(kind, n, m)
    if s is None:
        s_list = list(range(-(n + m), n + m + 1))
    elif isinstance(s, int):
        s_list = [s]
    else:
        s_list = list(s)
    if kind == "e":
        if not (max(1, m - n + 1) <= k <= m):
            raise ValueError(f"k = {k} outside the e-side pole range")
        node = 2 * k
        const = rre_constant(n, k)
        rn1, rn2, eval_exp = n + k, m - k, 2 * k
    else:
        if not (max(1, n - m + 1) <= k <= n):
            raise ValueError(f"k = {k} outside the f-side pole range")
        node = -2 * k
        const = _MINUS_ONE * rre_constant(m, k)
        rn1, rn2, eval_exp = n - k, m + k, -2 * k
    fam = _partition(rep, kind)
    cap = _degree_cap(rep)
    if states is None:
        states = rep.basis(1)
    checked = 0
    nonzero = 0
    for key in states:
        d = rep.degree(key)
        for s_tot in s_list:
            rows = {}
            lo, hi = max(d - cap, s_tot - d), s_tot - d + cap
            for A in range(lo, hi + 1):
                try:
                    inner = fam.mode(m, s_tot - A, key)
                    asw = fam.mode_vec(n, A, inner) if inner else {}
                    jmax = d - A
                    rev = {}
                    if jmax >= 0:
                        ker = _kernel_group(kind, n, m, jmax + 1)
                        for j in range(jmax + 1):
                            kj = ker.coeff(j)
                            if kj.is_zero():
                                continue
                            iv = fam.mode(n, A + j, key)
                            if not iv:
                                continue
                            rev = vec_add(rev, vec_scale(
                                kj, fam.mode_vec(m, s_tot - A - j, iv)))
                    rows[A] = vec_sub(asw, rev)
                except TruncationError:
                    continue
            if len(rows) < len(poles) + margin:
                continue
            families = _solve_delta_families(rows, poles)
            lhs = families[poles.index(node)]
            try:
                if rn2 == 0:
                    rhs_core = fam.mode(rn1, s_tot, key)
                else:
                    rhs_core = _specialized_composed_product(
                        rep, kind, rn1, rn2, eval_exp, s_tot, key,
                        margin=margin)
            except TruncationError:
                continue
            rhs = vec_scale(const, rhs_core)
            checked += 1
            if not (_vec_is_zero(lhs) and _vec_is_zero(rhs)):
                nonzero += 1
            if not vec_eq(lhs, rhs):
                return _report(
                    "residue-recursion",
                    {"kind": kind, "n": n, "m": m, "k": k,
                     "total_mode": s_tot},
                    "fail",
                    witness=_first_difference(lhs, rhs),
                    lhs=f"Res at q^{node} on {key!r}",
                    rhs=f"const * {kind}~^({rn1}) {kind}~^({rn2})"
                        f"(q^{eval_exp} z)")
    status = "pass" if nonzero else "insufficient-truncation"
    return _report("residue-recursion",
                   {"kind": kind, "n": n, "m": m, "k": k, "checked": checked,
                    "nonzero": nonzero, "constant": str(const)},
                   status,
                   lhs=f"Res_{{z1=q^{node} z2}} {kind}~^({n})(z1) "
                       f"{kind}~^({m})(z2) dz1/z1",
                   rhs=f"const * {kind}~^({rn1})(z2) {kind}~^({rn2})"
                       f"(q^{eval_exp} z2)")


def t_commutator_check(V, W, n, m, max_degree=2, mode_window=2):
    """[t^{(n)}_A, t^{(m)}_B] = (q^{2nB} - q^{2mA}) t^{(n+m)}_{A+B} on the
    pair space, coefficientwise over a window of mode pairs and states.

    The left side uses the inductive-residue fields, the right side the
    factorized evaluation of t^{(n+m)}, so the check crosses the two
    independent routes.  The supporting residue-recursion formulas are
    exercised by residue_product_check.
    """
    pair = V if isinstance(V, PairSpace) else PairSpace(V, W)
    tn = composed_t(pair, None, n)
    tm = composed_t(pair, None, m)
    tsum = composed_t_factorized(pair, None, n + m)
    one = pair.one_coeff()
    checked = 0
    skipped = 0
    for key in pair.basis(max_degree):
        for A in range(-mode_window, mode_window + 1):
            for B in range(-mode_window, mode_window + 1):
                try:
                    vb = tm.mode(B, {key: one})
                    lhs = tn.mode(A, vb)
                    va = tn.mode(A, {key: one})
                    lhs = vec_sub(lhs, tm.mode(B, va))
                    rhs = vec_scale(qp(2 * n * B) - qp(2 * m * A),
                                    tsum.mode_on_key(A + B, key))
                except TruncationError:
                    skipped += 1
                    continue
                checked += 1
                if not vec_eq(lhs, rhs):
                    return _report(
                        "t-closed-algebra",
                        {"n": n, "m": m, "A": A, "B": B},
                        "fail",
                        witness=_first_difference(lhs, rhs),
                        lhs=f"[t^({n})_{A}, t^({m})_{B}] on {key!r}",
                        rhs=f"(q^{2 * n * B} - q^{2 * m * A}) t^({n + m})_{A + B}")
    status = "pass" if checked else "insufficient-truncation"
    return _report("t-closed-algebra",
                   {"n": n, "m": m, "checked": checked, "skipped": skipped},
                   status,
                   lhs=f"[t^({n})(z1), t^({m})(z2)]",
                   rhs=f"delta(q^{2 * n} z1/z2) t^({n + m})(z1) "
                       f"- delta(q^{-2 * m} z1/z2) t^({n + m})(z2)")


def total_integrals_commute(V, W, n_max, max_degree=2):
    """The total integrals I^{(n)} = t^{(n)}_0 commute pairwise, and vanish
    above the level of the e-carrying slot."""
    pair = V if isinstance(V, PairSpace) else PairSpace(V, W)
    ops = {n: composed_t_factorized(pair, None, n) for n in range(1, n_max + 1)}
    one = pair.one_coeff()
    checked = 0
    skipped = 0
    states = pair.basis(max_degree)
    for n in range(1, n_max + 1):
        for m in range(n, n_max + 1):
            for key in states:
                try:
                    vn = ops[n].mode_on_key(0, key)
                    lhs = ops[m].mode(0, vn)
                    vm = ops[m].mode_on_key(0, key)
                    lhs = vec_sub(lhs, ops[n].mode(0, vm))
                except TruncationError:
                    skipped += 1
                    continue
                checked += 1
                if not _vec_is_zero(lhs):
                    return _report(
                        "total-integrals-commute",
                        {"n": n, "m": m},
                        "fail",
                        witness=_first_difference(lhs, {}),
                        lhs=f"[I^({n}), I^({m})] on {key!r}", rhs="0")
    vanish = 0
    level = pair.rep_e.level
    for n in range(level + 1, n_max + 1):
        for key in states:
            try:
                v = ops[n].mode_on_key(0, key)
            except TruncationError:
                skipped += 1
                continue
            vanish += 1
            if not _vec_is_zero(v):
                return _report(
                    "total-integrals-commute",
                    {"n": n, "level": level},
                    "fail",
                    witness=_first_difference(v, {}),
                    lhs=f"I^({n}) on {key!r} (level {level})", rhs="0")
    status = "pass" if checked else "insufficient-truncation"
    return _report("total-integrals-commute",
                   {"n_max": n_max, "checked": checked, "skipped": skipped,
                    "vanishing_checked": vanish},
                   status,
                   lhs="[I^(n), I^(m)] for n,m <= " + str(n_max), rhs="0")


def t_factorization_check(V, W, n, max_degree=2, mode_window=2):
    """The inductive-residue t^{(n)} equals its factorized form
    const * ftilde^{(n)} (x) etilde^{(n)} coefficientwise."""
    pair = V if isinstance(V, PairSpace) else PairSpace(V, W)
    ind = composed_t(pair, None, n)
    fac = composed_t_factorized(pair, None, n)
    checked = 0
    skipped = 0
    for key in pair.basis(max_degree):
        for M in range(-mode_window, mode_window + 1):
            try:
                lhs = ind.mode_on_key(M, key)
                rhs = fac.mode_on_key(M, key)
            except TruncationError:
                skipped += 1
                continue
            checked += 1
            if not vec_eq(lhs, rhs):
                return _report(
                    "t-factorization",
                    {"n": n, "mode": M},
                    "fail",
                    witness=_first_difference(lhs, rhs),
                    lhs=f"t^({n})_{M} (residue) on {key!r}",
                    rhs=f"(q^-1-q)^{2 * n - 1}[n-1]![n]! f~^({n}) (x) e~^({n})")
    status = "pass" if checked else "insufficient-truncation"
    return _report("t-factorization",
                   {"n": n, "checked": checked, "skipped": skipped},
                   status,
                   lhs=f"t^({n})(z) by inductive residue",
                   rhs=f"(q^-1-q)^{2 * n - 1}[n-1]![n]! f~^({n})(z) (x) e~^({n})(z)")
