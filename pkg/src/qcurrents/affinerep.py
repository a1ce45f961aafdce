"""Representations of the q-deformed current algebra on truncated modules.

Every representation exposes the same mode-action protocol:

    rep.apply(kind, n, vec)     kind in {'e','f','a','psi+','psi-'}
    rep.apply_K(vec, power), rep.apply_qd(vec, power)

where ``vec`` is a sparse vector {basis_key: coefficient}.  Mode subscripts
are the true algebra subscripts: x_n lowers the energy degree by n, psi^+_n
vanishes for n < 0 and psi^-_n for n > 0.

Truncation is honest: if any part of a result would fall beyond a module's
degree bound, the call raises TruncationError rather than returning a
silently clipped vector.  A result of {} always means exactly zero.

The psi currents are never independent data.  They are derived, in every
representation, from the boson modes and K through the exponential
formula, via the mode recursion  j P_j = sum_m m * S_m * P_{j-m}.
"""

from __future__ import annotations

import json
from math import comb, isqrt

from .qarith import ONE, ParamScalar, Scalar, q_int, qp, sp
from .series import TruncationError


class AlgebraError(Exception):
    """A construction-time consistency gate failed."""


# -- sparse vector helpers ---------------------------------------------------

def vec_add(v1, v2):
    out = dict(v1)
    for k, c in v2.items():
        w = out.get(k)
        w = c if w is None else w + c
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def vec_sub(v1, v2):
    out = dict(v1)
    for k, c in v2.items():
        w = out.get(k)
        w = -c if w is None else w + (-c)
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def vec_scale(c, v):
    if hasattr(c, "is_zero") and c.is_zero():
        return {}
    out = {}
    for k, x in v.items():
        w = c * x
        if not w.is_zero():
            out[k] = w
    return out


def vec_eq(v1, v2):
    for k in set(v1) | set(v2):
        a = v1.get(k)
        b = v2.get(k)
        if a is None:
            if not b.is_zero():
                return False
        elif b is None:
            if not a.is_zero():
                return False
        elif not (a - b).is_zero():
            return False
    return True


_MODE_KINDS = ("e", "f", "a", "psi+", "psi-")


class CurrentRep:
    """Base protocol: caching dispatcher plus the derived psi recursion.

    ``graded`` declares that the energy grading is faithful on basis keys:
    degrees are >= 0 and every mode x_m annihilates keys of degree < m.
    Mode sums over a tensor slot terminate only under that guarantee.
    """

    level = 0
    name = "abstract"
    graded = False

    def __init__(self):
        self._cache = {}

    # subclasses provide: _basis_apply(kind, n, key) for kind in e/f/a,
    # k_scale(key, coeff, power), qd_scale(key, coeff, power),
    # basis(max_degree), degree(key), one_coeff().

    def apply(self, kind, n, vec):
        if kind not in _MODE_KINDS:
            raise ValueError(f"unknown mode kind {kind!r}")
        out = {}
        for key, c in vec.items():
            hit = self._cached_basis_apply(kind, n, key)
            for k2, c2 in hit.items():
                w = out.get(k2)
                p = c * c2
                w = p if w is None else w + p
                if w.is_zero():
                    out.pop(k2, None)
                else:
                    out[k2] = w
        return out

    def _cached_basis_apply(self, kind, n, key):
        ck = (kind, n, key)
        hit = self._cache.get(ck)
        if hit is None:
            try:
                if kind == "psi+":
                    hit = self._psi_basis(+1, n, key)
                elif kind == "psi-":
                    hit = self._psi_basis(-1, n, key)
                else:
                    hit = self._basis_apply(kind, n, key)
            except TruncationError as err:
                self._cache[ck] = err
                raise
            self._cache[ck] = hit
        elif isinstance(hit, TruncationError):
            raise hit
        return hit

    def _psi_basis(self, sign, n, key):
        """psi^+_n (sign +1, n >= 0) or psi^-_n (sign -1, n <= 0) on a basis
        vector, from the boson modes: P_0 = 1 and
        j P_j = sum_{m=1..j} m * (±lam) * a_{±m} P_{j-m}, then K^{±1} P_j."""
        if sign * n < 0:
            return {}
        j = abs(n)
        lam = qp(1) - qp(-1)
        vecs = [{key: self.one_coeff()}]
        for jj in range(1, j + 1):
            acc = {}
            for m in range(1, jj + 1):
                w = self.apply("a", sign * m, vecs[jj - m])
                w = vec_scale(Scalar(m) * (lam if sign > 0 else -lam), w)
                acc = vec_add(acc, w)
            vecs.append(vec_scale(ONE / Scalar(jj), acc))
        return self.apply_K(vecs[j], 1 if sign > 0 else -1)

    def apply_K(self, vec, power=1):
        return {k: self.k_scale(k, c, power) for k, c in vec.items()}

    def apply_qd(self, vec, power=1):
        out = {}
        for k, c in vec.items():
            w = self.qd_scale(k, c, power)
            if not w.is_zero():
                out[k] = w
        return out

    def apply_product(self, ops, vec):
        """Apply ``ops`` = [(kind, n), ...] written left-to-right as operators
        (so the last entry acts first)."""
        for kind, n in reversed(ops):
            if not vec:
                return {}
            vec = self.apply(kind, n, vec)
        return vec

    def basis_vec(self, key):
        return {key: self.one_coeff()}

    def psi(self, sign):
        return PsiSeries(self, sign)


class PsiSeries:
    """Read-only view of psi^+ (sign +1) or psi^- (sign -1) of a rep.

    Deliberately has no writable mode table: every coefficient is computed
    from the boson modes and K, so the psi currents cannot drift out of
    sync with the representation they belong to.
    """

    __slots__ = ("rep", "sign")

    def __init__(self, rep, sign):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.rep = rep
        self.sign = sign

    def mode(self, n, vec):
        return self.rep.apply("psi+" if self.sign > 0 else "psi-", n, vec)

    def __repr__(self):
        return f"PsiSeries({'+' if self.sign > 0 else '-'}, {self.rep.name})"


# -- level 0: two-dimensional evaluation representation ----------------------

class EvaluationRep(CurrentRep):
    """Level-0 evaluation module on basis keys 0, 1 with a formal spectral
    parameter.

    e_n = a^n E, f_n = a^n F, K = diag(q, q^-1), and the boson modes carry
    the trace part required for the derived psi currents:
        a_n = a^n diag(q^-n [n]/n, -q^n [n]/n),  n != 0.
    q^d acts by the substitution a -> q^-1 a (the two basis states are
    degree 0; all grading lives on the parameter).

    Not graded: the modes e_n, f_n, a_n never vanish, so this module
    cannot sit inside a TensorRep slot — the coproduct mode sums would be
    infinite there (they only make sense as formal distributions).
    """

    level = 0
    graded = False

    def __init__(self, symbol="a"):
        super().__init__()
        self.symbol = symbol
        self.symbols = (symbol,)
        self.name = f"evaluation({symbol})"

    def one_coeff(self):
        return ParamScalar.from_scalar(ONE, self.symbols)

    def _param_power(self, n):
        return ParamScalar(self.symbols, {(n,): ONE})

    def degree(self, key):
        return 0

    def basis(self, max_degree=None):
        return [0, 1]

    def _basis_apply(self, kind, n, key):
        if kind == "e":
            return {0: self._param_power(n)} if key == 1 else {}
        if kind == "f":
            return {1: self._param_power(n)} if key == 0 else {}
        if kind == "a":
            if n == 0:
                raise ValueError("a_0 is not a generator")
            coeff = q_int(n) / Scalar(n)
            diag = qp(-n) * coeff if key == 0 else -(qp(n) * coeff)
            return {key: diag * self._param_power(n)}
        raise ValueError(kind)

    def k_scale(self, key, coeff, power):
        return qp(power if key == 0 else -power) * coeff

    def qd_scale(self, key, coeff, power):
        if self.symbol not in coeff.symbols:
            return coeff
        i = coeff.symbols.index(self.symbol)
        out = {}
        for exps, c in coeff.data.items():
            out[exps] = qp(-power * exps[i]) * c
        return ParamScalar(coeff.symbols, out)


def make_evaluation_rep(symbol="a"):
    """Level-0 evaluation representation with formal parameter ``symbol``."""
    return EvaluationRep(symbol)


# -- level 1: bosonic Fock construction --------------------------------------

def _partitions_upto(total):
    """All partitions of every size <= total, as descending tuples."""
    out = [()]

    def rec(prefix, maxpart, rem):
        for p in range(min(maxpart, rem), 0, -1):
            out.append(prefix + (p,))
            rec(prefix + (p,), p, rem - p)

    rec((), total, total)
    return out


class FockRep(CurrentRep):
    """Level-1 module on basis (m, mu): lattice point m and boson partition
    mu, energy degree m^2 + |mu|, truncated at ``degree_bound``.

    Currents are the vertex operators
        e(z) = exp(+sum q^{-n/2}/[n] a_{-n} z^n)
               exp(-sum q^{-n/2}/[n] a_n z^{-n}) e^{alpha} z^{h+1},
        f(z) = exp(-sum q^{+n/2}/[n] a_{-n} z^n)
               exp(+sum q^{+n/2}/[n] a_n z^{-n}) e^{-alpha} z^{-h+1},
    with [a_n, a_-n] = [2n][n]/n, h |m, mu> = 2m |m, mu>, K = q^h, and the
    zero-mode z-power read off the state being acted on.
    """

    level = 1
    graded = True

    def __init__(self, degree_bound=6, check=True):
        super().__init__()
        self.degree_bound = degree_bound
        self.name = f"fock(D={degree_bound})"
        self._states = []
        for m in range(-isqrt(degree_bound), isqrt(degree_bound) + 1):
            base = m * m
            for mu in _partitions_upto(degree_bound - base):
                self._states.append((m, mu))
        self._states.sort(key=lambda st: (self.degree(st), st[0], st[1]))
        self._mode_cache = {}
        if check:
            _gate_fock(self)

    def one_coeff(self):
        return ONE

    def degree(self, key):
        m, mu = key
        return m * m + sum(mu)

    def basis(self, max_degree=None):
        if max_degree is None:
            return list(self._states)
        return [st for st in self._states if self.degree(st) <= max_degree]

    def vacuum(self):
        return {(0, ()): ONE}

    def _boson_norm(self, n):
        # [a_n, a_{-n}] for n > 0
        return q_int(2 * n) * q_int(n) / Scalar(n)

    def _basis_apply(self, kind, n, key):
        if kind == "a":
            return self._apply_boson(n, key)
        d_out = self.degree(key) - n
        if d_out < 0:
            return {}
        if d_out > self.degree_bound:
            raise TruncationError(
                f"{kind}_{n} sends degree {self.degree(key)} beyond the "
                f"bound {self.degree_bound}")
        return self._current_modes(key, kind).get(n, {})

    def _apply_boson(self, n, key):
        if n == 0:
            raise ValueError("a_0 is not a generator")
        m, mu = key
        if n > 0:
            k = mu.count(n)
            if k == 0:
                return {}
            lst = list(mu)
            lst.remove(n)
            return {(m, tuple(lst)): Scalar(k) * self._boson_norm(n)}
        p = -n
        if self.degree(key) + p > self.degree_bound:
            raise TruncationError(
                f"a_{n} sends degree {self.degree(key)} beyond the bound "
                f"{self.degree_bound}")
        lst = tuple(sorted(mu + (p,), reverse=True))
        return {(m, lst): ONE}

    def _current_modes(self, key, which):
        """All modes of e(z)|key> or f(z)|key> that stay inside the bound,
        as {mode_index: vector}; cached per state."""
        ck = (which, key)
        hit = self._mode_cache.get(ck)
        if hit is not None:
            return hit
        d = self.degree_bound
        m, mu = key
        sgn = +1 if which == "e" else -1
        zexp0 = sgn * 2 * m + 1  # z^{±h+1} read on the incoming state
        m2 = m + sgn
        modes = {}
        if m2 * m2 <= d:
            # annihilation half: for each part size, remove j of k copies
            sizes = sorted(set(mu))
            ann_terms = []  # (partition_left, coeff, z_exponent)

            def rec_ann(idx, cur, coeff, zexp):
                if idx == len(sizes):
                    ann_terms.append((cur, coeff, zexp))
                    return
                size = sizes[idx]
                k = cur.count(size)
                if which == "e":
                    c_one = -(sp(-size) / q_int(size))
                else:
                    c_one = sp(size) / q_int(size)
                c_one = c_one * self._boson_norm(size)
                for j in range(k + 1):
                    left = list(cur)
                    for _ in range(j):
                        left.remove(size)
                    rec_ann(idx + 1, tuple(left),
                            coeff * Scalar(comb(k, j)) * c_one ** j,
                            zexp - size * j)

            rec_ann(0, mu, ONE, 0)
            # creation half: add any partition nu that fits under the bound
            for left, c1, zexp1 in ann_terms:
                room = d - m2 * m2 - sum(left)
                for nu in _partitions_upto(room):
                    coeff = c1
                    for size in set(nu):
                        j = nu.count(size)
                        if which == "e":
                            c_one = sp(-size) / q_int(size)
                        else:
                            c_one = -(sp(size) / q_int(size))
                        fact = 1
                        for t in range(2, j + 1):
                            fact *= t
                        coeff = coeff * c_one ** j / Scalar(fact)
                    if coeff.is_zero():
                        continue
                    st2 = (m2, tuple(sorted(tuple(left) + nu, reverse=True)))
                    mode = -(zexp1 + sum(nu) + zexp0)
                    tgt = modes.setdefault(mode, {})
                    w = tgt.get(st2)
                    w = coeff if w is None else w + coeff
                    if w.is_zero():
                        tgt.pop(st2, None)
                    else:
                        tgt[st2] = w
        modes = {k: v for k, v in modes.items() if v}
        self._mode_cache[ck] = modes
        return modes

    def k_scale(self, key, coeff, power):
        return qp(2 * key[0] * power) * coeff

    def qd_scale(self, key, coeff, power):
        return qp(power * self.degree(key)) * coeff


def _gate_fock(rep):
    """Construction gate: a small canned battery of defining relations.
    Raises AlgebraError naming the first relation that fails."""
    results = check_defining_relations(
        rep, mode_window=1, max_degree=min(2, getattr(rep, "degree_bound", 2)),
        relations=("boson-commutator", "boson-current", "ef-commutator",
                   "ee-exchange"))
    for r in results:
        if r["status"] != "pass":
            raise AlgebraError(
                f"construction gate: relation {r['relation']!r} failed, "
                f"witness {r['witness']}")


def make_fock_level1(degree_bound=6, check=True):
    """Level-1 Fock representation, relation-gated at construction."""
    return FockRep(degree_bound, check=check)


# -- tensor products under the current-style coproducts ----------------------

class TensorRep(CurrentRep):
    """Tensor product of two representations under a current coproduct.

    ``coproduct`` selects the mixing of the current halves:
      '1'   : e_n -> e_n (x) 1 + sum_j q^{-c1(n+j/2)}  psi-_{-j} (x) e_{n+j}
              f_n -> 1 (x) f_n + sum_j q^{-c2(n-j/2)}  f_{n-j} (x) psi+_j
      '2'   : e_n -> e_n (x) 1 + sum_j q^{+c1(n-j/2)}  psi+_j  (x) e_{n-j}
              f_n -> 1 (x) f_n + sum_j q^{+c2(n+j/2)}  f_{n+j} (x) psi-_{-j}
      '1op' : the flip of '1':
              e_n -> 1 (x) e_n + sum_j q^{-c2(n+j/2)}  e_{n+j} (x) psi-_{-j}
              f_n -> f_n (x) 1 + sum_j q^{-c1(n-j/2)}  psi+_j  (x) f_{n-j}
    with boson modes
      '1','2': a_m -> q^{-|m| c2/2} a_m (x) 1 + q^{+|m| c1/2} 1 (x) a_m
      '1op'  : a_m -> q^{+|m| c2/2} a_m (x) 1 + q^{-|m| c1/2} 1 (x) a_m
    (c1, c2 the slot levels).  The total level is c1 + c2.

    The psi sums terminate exactly: the lowering factor in each term kills
    every sufficiently large j.  Terms are evaluated vanishing-side first so
    a raising factor is only consulted when its term genuinely contributes.
    """

    def __init__(self, rep1, rep2, coproduct="1"):
        super().__init__()
        if coproduct not in ("1", "2", "1op"):
            raise ValueError(f"unknown coproduct {coproduct!r}")
        if not (rep1.graded and rep2.graded):
            raise ValueError(
                "tensor slots must be energy-graded modules: the coproduct "
                "mode sums do not terminate on an evaluation slot (they are "
                "formal distributions there)")
        self.graded = True
        self.rep1 = rep1
        self.rep2 = rep2
        self.coproduct = coproduct
        self.level = rep1.level + rep2.level
        self.name = f"({rep1.name} (x) {rep2.name}; coproduct {coproduct})"

    def one_coeff(self):
        return self.rep1.one_coeff() * self.rep2.one_coeff()

    @property
    def degree_bound(self):
        b1 = getattr(self.rep1, "degree_bound", None)
        b2 = getattr(self.rep2, "degree_bound", None)
        if b1 is None or b2 is None:
            raise AttributeError("a tensor slot carries no degree bound")
        return b1 + b2

    def degree(self, key):
        return self.rep1.degree(key[0]) + self.rep2.degree(key[1])

    def basis(self, max_degree=None):
        out = []
        for k1 in self.rep1.basis(max_degree):
            d1 = self.rep1.degree(k1)
            rest = None if max_degree is None else max_degree - d1
            for k2 in self.rep2.basis(rest):
                out.append((k1, k2))
        return out

    def _pair(self, half1, half2, weight, out):
        for k1, c1 in half1.items():
            for k2, c2 in half2.items():
                w = weight * c1 * c2
                key = (k1, k2)
                prev = out.get(key)
                prev = w if prev is None else prev + w
                if prev.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = prev
        return out

    def _basis_apply(self, kind, n, key):
        c1, c2 = self.rep1.level, self.rep2.level
        k1, k2 = key
        r1, r2 = self.rep1, self.rep2
        one = self.one_coeff()
        if kind == "a":
            if n == 0:
                raise ValueError("a_0 is not a generator")
            if self.coproduct in ("1", "2"):
                w1, w2 = sp(-abs(n) * c2), sp(abs(n) * c1)
            else:
                w1, w2 = sp(abs(n) * c2), sp(-abs(n) * c1)
            out = {}
            self._pair(r1._cached_basis_apply("a", n, k1), {k2: ONE},
                       w1 * one, out)
            self._pair({k1: ONE}, r2._cached_basis_apply("a", n, k2),
                       w2 * one, out)
            return out
        if kind == "e" and self.coproduct == "1":
            out = {}
            self._pair(r1._cached_basis_apply("e", n, k1), {k2: ONE}, one, out)
            for j in range(0, r2.degree(k2) - n + 1):
                piece2 = r2._cached_basis_apply("e", n + j, k2)
                if not piece2:
                    continue
                half1 = r1._cached_basis_apply("psi-", -j, k1)
                self._pair(half1, piece2, sp(-c1 * (2 * n + j)) * one, out)
            return out
        if kind == "e" and self.coproduct == "2":
            out = {}
            self._pair(r1._cached_basis_apply("e", n, k1), {k2: ONE}, one, out)
            for j in range(0, r1.degree(k1) + 1):
                half1 = r1._cached_basis_apply("psi+", j, k1)
                if not half1:
                    continue
                piece2 = r2._cached_basis_apply("e", n - j, k2)
                self._pair(half1, piece2, sp(c1 * (2 * n - j)) * one, out)
            return out
        if kind == "e":  # '1op'
            out = {}
            self._pair({k1: ONE}, r2._cached_basis_apply("e", n, k2), one, out)
            for j in range(0, r1.degree(k1) - n + 1):
                piece1 = r1._cached_basis_apply("e", n + j, k1)
                if not piece1:
                    continue
                half2 = r2._cached_basis_apply("psi-", -j, k2)
                self._pair(piece1, half2, sp(-c2 * (2 * n + j)) * one, out)
            return out
        if kind == "f" and self.coproduct == "1":
            out = {}
            self._pair({k1: ONE}, r2._cached_basis_apply("f", n, k2), one, out)
            for j in range(0, r2.degree(k2) + 1):
                half2 = r2._cached_basis_apply("psi+", j, k2)
                if not half2:
                    continue
                piece1 = r1._cached_basis_apply("f", n - j, k1)
                self._pair(piece1, half2, sp(-c2 * (2 * n - j)) * one, out)
            return out
        if kind == "f" and self.coproduct == "2":
            out = {}
            self._pair({k1: ONE}, r2._cached_basis_apply("f", n, k2), one, out)
            for j in range(0, r1.degree(k1) - n + 1):
                piece1 = r1._cached_basis_apply("f", n + j, k1)
                if not piece1:
                    continue
                half2 = r2._cached_basis_apply("psi-", -j, k2)
                self._pair(piece1, half2, sp(c2 * (2 * n + j)) * one, out)
            return out
        if kind == "f":  # '1op'
            out = {}
            self._pair(r1._cached_basis_apply("f", n, k1), {k2: ONE}, one, out)
            for j in range(0, r1.degree(k1) + 1):
                half1 = r1._cached_basis_apply("psi+", j, k1)
                if not half1:
                    continue
                piece2 = r2._cached_basis_apply("f", n - j, k2)
                self._pair(half1, piece2, sp(-c1 * (2 * n - j)) * one, out)
            return out
        raise ValueError(kind)

    def k_scale(self, key, coeff, power):
        return self.rep1.k_scale(key[0],
                                 self.rep2.k_scale(key[1], coeff, power),
                                 power)

    def qd_scale(self, key, coeff, power):
        return self.rep1.qd_scale(key[0],
                                  self.rep2.qd_scale(key[1], coeff, power),
                                  power)


def tensor_rep(rep1, rep2, coproduct="1"):
    """Tensor product module; the level is additive."""
    return TensorRep(rep1, rep2, coproduct)


# -- corruption wrapper (negative controls) ----------------------------------

class CorruptedRep(CurrentRep):
    """Wrapper that rescales one mode action of an inner rep.

    Everything else is delegated; the derived psi currents pick up the
    corruption automatically when the corrupted mode is a boson mode.
    """

    def __init__(self, inner, kind, n, factor):
        super().__init__()
        self.inner = inner
        self.kind, self.n, self.factor = kind, n, factor
        self.level = inner.level
        self.graded = inner.graded
        self.name = f"corrupted({inner.name}; {kind}_{n})"

    def one_coeff(self):
        return self.inner.one_coeff()

    def degree(self, key):
        return self.inner.degree(key)

    def basis(self, max_degree=None):
        return self.inner.basis(max_degree)

    def _basis_apply(self, kind, n, key):
        hit = self.inner._basis_apply(kind, n, key)
        if kind == self.kind and n == self.n:
            return vec_scale(self.factor, hit)
        return hit

    def k_scale(self, key, coeff, power):
        return self.inner.k_scale(key, coeff, power)

    def qd_scale(self, key, coeff, power):
        return self.inner.qd_scale(key, coeff, power)


# -- defining-relation checker ------------------------------------------------

def _difference_witness(params, key, lhs, rhs):
    diff = vec_sub(lhs, rhs)
    comp = sorted(diff, key=repr)[0]
    zero = "0"
    return {
        "parameters": params,
        "state": repr(key),
        "component": repr(comp),
        "lhs": str(lhs.get(comp, zero)),
        "rhs": str(rhs.get(comp, zero)),
    }


def check_defining_relations(rep, mode_window=2, max_degree=2,
                             relations=None, psi_window=None):
    """Check the defining relations coefficientwise on basis states.

    Every case is attempted; cases whose evaluation would overflow the
    truncation are skipped and counted, never treated as passing evidence.
    OUTPUT: list of {relation, status, tested, skipped, witness} sorted by
    relation name; witness carries the first failing case or None.
    """
    w = mode_window
    pw = mode_window if psi_window is None else psi_window
    c = rep.level
    lam = qp(1) - qp(-1)
    states = rep.basis(max_degree)
    idx = range(-w, w + 1)

    def cases_grading():
        for kind in ("e", "f", "a"):
            for n in idx:
                if kind == "a" and n == 0:
                    continue
                for st in states:
                    def thunk(kind=kind, n=n, st=st):
                        v = rep.basis_vec(st)
                        lhs = rep.apply_qd(
                            rep.apply(kind, n, rep.apply_qd(v, -1)), +1)
                        rhs = vec_scale(qp(-n), rep.apply(kind, n, v))
                        return lhs, rhs
                    yield {"kind": kind, "n": n}, st, thunk

    def cases_exchange(which):
        p = qp(2) if which == "e" else qp(-2)
        for a in idx:
            for b in idx:
                for st in states:
                    def thunk(a=a, b=b, st=st):
                        v = rep.basis_vec(st)
                        lhs = vec_sub(
                            rep.apply_product([(which, a + 1), (which, b)], v),
                            vec_scale(p, rep.apply_product(
                                [(which, a), (which, b + 1)], v)))
                        rhs = vec_sub(
                            vec_scale(p, rep.apply_product(
                                [(which, b), (which, a + 1)], v)),
                            rep.apply_product([(which, b + 1), (which, a)], v))
                        return lhs, rhs
                    yield {"a": a, "b": b}, st, thunk

    def cases_psi_current(sign, which):
        pk = "psi+" if sign > 0 else "psi-"
        for A in range(-pw - 1, pw + 1):
            for B in idx:
                for st in states:
                    def thunk(A=A, B=B, st=st):
                        v = rep.basis_vec(st)

                        def P(i, j):
                            return rep.apply_product([(pk, i), (which, j)], v)

                        def X(j, i):
                            return rep.apply_product([(which, j), (pk, i)], v)

                        if sign > 0 and which == "e":
                            lhs = vec_sub(vec_scale(sp(c), P(A + 1, B)),
                                          vec_scale(qp(2), P(A, B + 1)))
                            rhs = vec_sub(
                                vec_scale(qp(2) * sp(c), X(B, A + 1)),
                                X(B + 1, A))
                        elif sign < 0 and which == "e":
                            lhs = vec_sub(vec_scale(qp(2) * sp(c), P(A, B + 1)),
                                          P(A + 1, B))
                            rhs = vec_sub(vec_scale(sp(c), X(B + 1, A)),
                                          vec_scale(qp(2), X(B, A + 1)))
                        elif sign > 0 and which == "f":
                            lhs = vec_sub(vec_scale(qp(2), P(A + 1, B)),
                                          vec_scale(sp(c), P(A, B + 1)))
                            rhs = vec_sub(X(B, A + 1),
                                          vec_scale(qp(2) * sp(c), X(B + 1, A)))
                        else:
                            lhs = vec_sub(P(A, B + 1),
                                          vec_scale(qp(2) * sp(c), P(A + 1, B)))
                            rhs = vec_sub(vec_scale(qp(2), X(B + 1, A)),
                                          vec_scale(sp(c), X(B, A + 1)))
                        return lhs, rhs
                    yield {"A": A, "B": B, "which": which,
                           "psi": "+" if sign > 0 else "-"}, st, thunk

    def cases_ef():
        for a in idx:
            for b in idx:
                for st in states:
                    def thunk(a=a, b=b, st=st):
                        v = rep.basis_vec(st)
                        lhs = vec_sub(
                            rep.apply_product([("e", a), ("f", b)], v),
                            rep.apply_product([("f", b), ("e", a)], v))
                        j = a + b
                        rhs = {}
                        if j >= 0:
                            rhs = vec_add(rhs, vec_scale(
                                sp(c * (a - b)) / lam,
                                rep.apply("psi+", j, v)))
                        if j <= 0:
                            rhs = vec_sub(rhs, vec_scale(
                                sp(-c * (a - b)) / lam,
                                rep.apply("psi-", j, v)))
                        return lhs, rhs
                    yield {"a": a, "b": b}, st, thunk

    def cases_boson():
        for n in idx:
            for m in idx:
                if n == 0 or m == 0:
                    continue
                for st in states:
                    def thunk(n=n, m=m, st=st):
                        v = rep.basis_vec(st)
                        lhs = vec_sub(
                            rep.apply_product([("a", n), ("a", m)], v),
                            rep.apply_product([("a", m), ("a", n)], v))
                        rhs = {}
                        if n + m == 0:
                            coeff = q_int(2 * n) * q_int(c * n)
                            if not coeff.is_zero():
                                coeff = coeff / Scalar(n)
                            rhs = vec_scale(coeff, v)
                        return lhs, rhs
                    yield {"n": n, "m": m}, st, thunk

    def cases_boson_current():
        for n in idx:
            if n == 0:
                continue
            for b in idx:
                for which, sgn in (("e", +1), ("f", -1)):
                    for st in states:
                        def thunk(n=n, b=b, which=which, sgn=sgn, st=st):
                            v = rep.basis_vec(st)
                            lhs = vec_sub(
                                rep.apply_product([("a", n), (which, b)], v),
                                rep.apply_product([(which, b), ("a", n)], v))
                            rhs = vec_scale(
                                Scalar(sgn) * q_int(2 * abs(n))
                                / Scalar(abs(n)) * sp(-sgn * c * abs(n)),
                                rep.apply(which, n + b, v))
                            return lhs, rhs
                        yield {"n": n, "b": b, "which": which}, st, thunk

    def cases_psi_commute():
        for i in range(0, pw + 1):
            for j in range(0, pw + 1):
                for pk, s in (("psi+", +1), ("psi-", -1)):
                    for st in states:
                        def thunk(i=i, j=j, pk=pk, s=s, st=st):
                            v = rep.basis_vec(st)
                            lhs = rep.apply_product(
                                [(pk, s * i), (pk, s * j)], v)
                            rhs = rep.apply_product(
                                [(pk, s * j), (pk, s * i)], v)
                            return lhs, rhs
                        yield {"i": s * i, "j": s * j, "psi": pk}, st, thunk

    def cases_psi_cross():
        cp = qp(2 - c) + qp(c - 2)
        cm = qp(2 + c) + qp(-2 - c)
        for A in range(-2, pw + 1):
            for B in range(-pw - 2, 1):
                for st in states:
                    def thunk(A=A, B=B, st=st):
                        v = rep.basis_vec(st)

                        def P(i, j):
                            return rep.apply_product(
                                [("psi+", i), ("psi-", j)], v)

                        def M(i, j):
                            return rep.apply_product(
                                [("psi-", j), ("psi+", i)], v)

                        lhs = vec_add(
                            vec_sub(P(A + 2, B),
                                    vec_scale(cp, P(A + 1, B + 1))),
                            P(A, B + 2))
                        rhs = vec_add(
                            vec_sub(M(A + 2, B),
                                    vec_scale(cm, M(A + 1, B + 1))),
                            M(A, B + 2))
                        return lhs, rhs
                    yield {"A": A, "B": B}, st, thunk

    battery = {
        "current-grading": cases_grading,
        "ee-exchange": lambda: cases_exchange("e"),
        "ff-exchange": lambda: cases_exchange("f"),
        "psi-plus-e-exchange": lambda: cases_psi_current(+1, "e"),
        "psi-minus-e-exchange": lambda: cases_psi_current(-1, "e"),
        "psi-plus-f-exchange": lambda: cases_psi_current(+1, "f"),
        "psi-minus-f-exchange": lambda: cases_psi_current(-1, "f"),
        "ef-commutator": cases_ef,
        "boson-commutator": cases_boson,
        "boson-current": cases_boson_current,
        "psi-psi-commute": cases_psi_commute,
        "psi-cross-exchange": cases_psi_cross,
    }
    selected = battery if relations is None else {
        k: battery[k] for k in relations}
    report = []
    for name in sorted(selected):
        tested = skipped = 0
        witness = None
        for params, st, thunk in selected[name]():
            try:
                lhs, rhs = thunk()
            except TruncationError:
                skipped += 1
                continue
            tested += 1
            if not vec_eq(lhs, rhs):
                witness = _difference_witness(params, st, lhs, rhs)
                break
        report.append({
            "relation": name,
            "status": "fail" if witness else "pass",
            "tested": tested,
            "skipped": skipped,
            "witness": witness,
        })
    return report


# -- serialization ------------------------------------------------------------

def dump_rep(rep, kinds=("e", "f", "a"), mode_window=2, max_degree=None):
    """JSON-ready snapshot of mode actions on the (truncated) basis.

    Coefficients must be plain Scalars (Fock-like reps).  An action is
    stored only when it is sound AND lands inside the dumped basis;
    otherwise the row is null — never a partial vector.
    """
    states = rep.basis(max_degree)
    state_index = {repr(st): i for i, st in enumerate(states)}
    actions = {}
    for kind in kinds:
        for n in range(-mode_window, mode_window + 1):
            if kind == "a" and n == 0:
                continue
            table = {}
            for i, st in enumerate(states):
                try:
                    hit = rep.apply(kind, n, rep.basis_vec(st))
                except TruncationError:
                    table[str(i)] = None
                    continue
                row = []
                ok = True
                for k, coeff in hit.items():
                    if not isinstance(coeff, Scalar):
                        raise TypeError(
                            "dump_rep supports Scalar-coefficient reps")
                    j = state_index.get(repr(k))
                    if j is None:
                        ok = False  # lands outside the dumped basis
                        break
                    row.append([j, str(coeff)])
                table[str(i)] = sorted(row) if ok else None
            actions[f"{kind}_{n}"] = table
    h_exps = []
    for st in states:
        mono = rep.k_scale(st, ONE, 1)
        (exp, coeff), = mono.num.items()
        assert coeff == 1 and mono.den == {0: 1}
        h_exps.append(exp)
    return {
        "format": "qcurrents-rep-v1",
        "name": rep.name,
        "level": rep.level,
        "graded": rep.graded,
        "states": [repr(st) for st in states],
        "degrees": [rep.degree(st) for st in states],
        "h_exponents": h_exps,
        "actions": actions,
    }


def dumps_rep(rep, **kw):
    return json.dumps(dump_rep(rep, **kw), indent=2, sort_keys=True)


class TableRep(CurrentRep):
    """Representation replayed from a dump: actions outside the stored
    window raise TruncationError."""

    def __init__(self, payload):
        super().__init__()
        if payload.get("format") != "qcurrents-rep-v1":
            raise ValueError("unrecognized rep dump format")
        self.level = payload["level"]
        self.graded = payload.get("graded", False)
        self.name = f"table({payload['name']})"
        self._labels = payload["states"]
        self._degrees = payload["degrees"]
        self._h_exps = payload["h_exponents"]
        self._actions = payload["actions"]

    def one_coeff(self):
        return ONE

    def degree(self, key):
        return self._degrees[key]

    def basis(self, max_degree=None):
        keys = range(len(self._labels))
        if max_degree is None:
            return list(keys)
        return [s for s in keys if self._degrees[s] <= max_degree]

    def label(self, key):
        return self._labels[key]

    def _basis_apply(self, kind, n, key):
        table = self._actions.get(f"{kind}_{n}")
        if table is None:
            raise TruncationError(f"{kind}_{n} is not stored in this dump")
        row = table.get(str(key))
        if row is None:
            raise TruncationError(
                f"{kind}_{n} on state {self._labels[key]} was not sound at "
                "dump time")
        return {tgt: parse_scalar(coeff) for tgt, coeff in row}

    def k_scale(self, key, coeff, power):
        return sp(self._h_exps[key] * power) * coeff

    def qd_scale(self, key, coeff, power):
        return qp(power * self._degrees[key]) * coeff


def load_rep(payload):
    """Rebuild a replayable representation from dump_rep output (or its
    JSON string)."""
    if isinstance(payload, str):
        payload = json.loads(payload)
    return TableRep(payload)


def parse_scalar(text):
    """Parse the canonical Scalar rendering (inverse of str)."""
    text = text.strip()
    if text.startswith("(") and ") / (" in text:
        numtxt, dentxt = text[1:-1].split(") / (")
        return _parse_poly(numtxt) / _parse_poly(dentxt)
    return _parse_poly(text)


def _parse_poly(text):
    out = Scalar(0)
    text = text.replace("- ", "-").replace("+ ", "")
    for tok in text.split():
        neg = tok.startswith("-")
        if neg:
            tok = tok[1:]
        if "*" in tok:
            ctxt, ptxt = tok.split("*")
            coeff = Scalar(int(ctxt))
        elif tok.startswith("q"):
            coeff, ptxt = ONE, tok
        else:
            coeff, ptxt = Scalar(int(tok)), None
        if ptxt:
            if ptxt == "q":
                mono = qp(1)
            elif ptxt.startswith("q^("):
                mono = sp(int(ptxt[3:-3]))  # q^(k/2)
            else:
                mono = qp(int(ptxt[2:]))
            coeff = coeff * mono
        out = out + (-coeff if neg else coeff)
    return out
