"""Rational forms on the configuration space of current arguments and the
cycle integrals that pair with ordered current products.

A form is a Laurent-polynomial numerator over a multiset of binomial factors
(z_l - q^2 z_m), carrying the measure prod_k dz_k/(2 pi i z_k).  The cycle
attached to n points is a sum of flags: chains of strata cut out one variable
at a time by hyperplanes z_i = 0 or z_i = q^{-2} z_j.  A step may reference an
already-eliminated variable, composing to q^{-4}, q^{-6}, ... hyperplanes;
choices cutting the same stratum are merged, which is why three points carry
seven flags rather than six.

Integration is exact: iterated single-variable residues over Q(q^(1/2)),
eliminating z_1, ..., z_n in ascending order, every residue counterclockwise
at points that sit inside the unit circle when |q| > 1 (z = 0 and q^{-2k}-type
points).  With that orientation the flag sum carries no alternating signs and
agrees with the quadrature over a product of circles, which is what
``integrate_torus_numeric`` computes as an independent floating-point oracle.

Mixed simple-root labels are accepted as data but refuse to integrate: the
cycles beyond a single root are conjectural and not implemented.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from qcurrents.qarith import ONE, ZERO, Scalar, qp

_Q2 = qp(2)


def _as_scalar(c):
    return c if isinstance(c, Scalar) else Scalar(c)


def _parity(perm):
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return 1 if inv % 2 == 0 else -1


def _report(relation, parameters, status, witness=None, lhs="", rhs=""):
    return {
        "relation": relation,
        "parameters": parameters,
        "status": status,
        "witness_coefficient": witness,
        "lhs": lhs,
        "rhs": rhs,
    }


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

class LabeledConfig:
    """Labeled point set: indices 1..n, each carrying a simple-root label.

    The single-root default labels every point "alpha".  Mixed labels are
    legal data but any cycle evaluation rejects them.
    """

    __slots__ = ("n", "labels")

    def __init__(self, n, labels=None):
        n = int(n)
        if n < 1:
            raise ValueError("a configuration needs at least one point")
        if labels is None:
            labels = {i: "alpha" for i in range(1, n + 1)}
        else:
            labels = {int(i): str(lab) for i, lab in labels.items()}
            if set(labels) != set(range(1, n + 1)):
                raise ValueError("labels must cover exactly the indices 1..n")
        self.n = n
        self.labels = labels

    def single_root(self):
        return len(set(self.labels.values())) == 1

    def __eq__(self, other):
        return (isinstance(other, LabeledConfig)
                and self.n == other.n and self.labels == other.labels)

    def __repr__(self):
        return f"LabeledConfig(n={self.n})"


class RationalFormN:
    """Rational n-form P(z, z^-1) / prod(z_l - q^2 z_m) with the measure
    prod_k dz_k/(2 pi i z_k) understood.

    numerator: dict mapping length-n exponent tuples to coefficients (Scalar,
    int, or Fraction).  denominator_factors: iterable of index pairs (l, m),
    each one factor (z_l - q^2 z_m); a repeated pair means a repeated factor.
    """

    __slots__ = ("config", "numerator", "denominator_factors")

    def __init__(self, config, numerator, denominator_factors=()):
        if isinstance(config, int):
            config = LabeledConfig(config)
        n = config.n
        num = {}
        for key, c in numerator.items():
            key = tuple(int(e) for e in key)
            if len(key) != n:
                raise ValueError(f"exponent tuple {key} is not length {n}")
            c = _as_scalar(c)
            if c.is_zero():
                continue
            prev = num.get(key)
            c = c if prev is None else prev + c
            if c.is_zero():
                num.pop(key, None)
            else:
                num[key] = c
        facs = []
        for f in denominator_factors:
            l, m = int(f[0]), int(f[1])
            if not (1 <= l <= n and 1 <= m <= n) or l == m:
                raise ValueError(
                    f"factor ({l}, {m}) does not name two distinct points")
            facs.append((l, m))
        self.config = config
        self.numerator = num
        self.denominator_factors = tuple(sorted(facs))

    @property
    def n(self):
        return self.config.n

    def pullback(self, permutation):
        """The form pulled back along the diffeomorphism z_i -> z_sigma(i).

        ``permutation`` lists (sigma(1), ..., sigma(n)).  Exponent slots and
        factor indices map through sigma; restoring the measure's wedge
        factors to ascending order contributes the parity sign.
        """
        perm = tuple(int(p) for p in permutation)
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError("not a permutation of 1..n")
        sign = _parity(perm)
        num = {}
        for key, c in self.numerator.items():
            new = [0] * self.n
            for i, e in enumerate(key):
                new[perm[i] - 1] = e
            num[tuple(new)] = c if sign == 1 else -c
        facs = [(perm[l - 1], perm[m - 1])
                for l, m in self.denominator_factors]
        labels = {perm[i - 1]: lab for i, lab in self.config.labels.items()}
        return RationalFormN(LabeledConfig(self.n, labels), num, facs)

    def to_json(self):
        return {
            "n": self.n,
            "labels": {str(i): lab for i, lab in self.config.labels.items()},
            "numerator": [
                {"exponents": list(k), "coefficient": _scalar_to_json(c)}
                for k, c in sorted(self.numerator.items())
            ],
            "denominator_factors": [list(f)
                                    for f in self.denominator_factors],
        }

    @classmethod
    def from_json(cls, doc):
        n = int(doc["n"])
        labels = doc.get("labels")
        if labels is not None:
            labels = {int(i): lab for i, lab in labels.items()}
        num = {}
        for term in doc["numerator"]:
            key = tuple(int(e) for e in term["exponents"])
            c = _scalar_from_json(term["coefficient"])
            num[key] = num[key] + c if key in num else c
        return cls(LabeledConfig(n, labels), num,
                   [tuple(f) for f in doc.get("denominator_factors", ())])

    def __eq__(self, other):
        return (isinstance(other, RationalFormN)
                and self.config == other.config
                and self.numerator == other.numerator
                and self.denominator_factors == other.denominator_factors)

    def __str__(self):
        if not self.numerator:
            num = "0"
        else:
            parts = []
            for key in sorted(self.numerator):
                mono = " ".join(f"z{i + 1}^{e}"
                                for i, e in enumerate(key) if e)
                c = str(self.numerator[key])
                parts.append(f"({c}) {mono}" if mono else f"({c})")
            num = " + ".join(parts)
        den = " ".join(f"(z{l} - q^2 z{m})"
                       for l, m in self.denominator_factors)
        body = f"[{num}] / {den}" if den else num
        return f"{body} * dz/(2 pi i z)^{self.n}"

    def __repr__(self):
        return f"RationalFormN[{self}]"


def _scalar_to_json(c):
    return {"num": sorted([e, v] for e, v in c.num.items()),
            "den": sorted([e, v] for e, v in c.den.items())}


def _scalar_from_json(doc):
    if isinstance(doc, int):
        return Scalar(doc)
    if isinstance(doc, str):
        return Scalar(Fraction(doc))
    if isinstance(doc, dict):
        num = {int(e): int(c) for e, c in doc.get("num", [])}
        den = {int(e): int(c) for e, c in doc.get("den", [[0, 1]])}
        return Scalar(num, den)
    raise ValueError(f"cannot read a scalar coefficient from {doc!r}")


# ---------------------------------------------------------------------------
# flags
# ---------------------------------------------------------------------------

_AT_ORIGIN = object()


class Flag:
    """Chain of strata eliminating z_1, ..., z_n in ascending order.

    resolved[i] is the constraint cutting step i+1: None for z_{i+1} = 0, or
    a pair (e, b) for z_{i+1} = q^e z_b with e a negative even integer and b
    a later, still-free variable.  Two flags are equal when their resolved
    chains agree; raw_steps keeps one menu representative (0 for the
    coordinate hyperplane, else the referenced index j).
    """

    __slots__ = ("n", "raw_steps", "resolved")

    def __init__(self, n, raw_steps, resolved):
        self.n = n
        self.raw_steps = tuple(raw_steps)
        self.resolved = tuple(resolved)

    def __eq__(self, other):
        return (isinstance(other, Flag) and self.n == other.n
                and self.resolved == other.resolved)

    def __hash__(self):
        return hash((self.n, self.resolved))

    def __str__(self):
        parts = []
        for i, res in enumerate(self.resolved):
            if res is None:
                parts.append(f"z{i + 1}=0")
            else:
                e, b = res
                parts.append(f"z{i + 1}=q^{e}*z{b}")
        return " > ".join(parts)

    def __repr__(self):
        return f"Flag[{self}]"


@lru_cache(maxsize=None)
def _flags_cached(n):
    if n < 1:
        raise ValueError("flag enumeration needs n >= 1")
    flags = []

    def walk(i, sigma, raw, resolved):
        if i > n:
            flags.append(Flag(n, raw, resolved))
            return
        choices = {None: 0}
        for j in range(1, n + 1):
            if j == i:
                continue
            img = sigma.get(j, (0, j))
            if img is _AT_ORIGIN or img[1] == i:
                res = None
            else:
                res = (img[0] - 2, img[1])
            if res not in choices:
                choices[res] = j
        for res, j in choices.items():
            sig2 = dict(sigma)
            if res is None:
                sig2[i] = _AT_ORIGIN
                for u, img in sigma.items():
                    if img is not _AT_ORIGIN and img[1] == i:
                        sig2[u] = _AT_ORIGIN
            else:
                sig2[i] = res
                for u, img in sigma.items():
                    if img is not _AT_ORIGIN and img[1] == i:
                        sig2[u] = (img[0] + res[0], res[1])
            walk(i + 1, sig2, raw + (j,), resolved + (res,))

    walk(1, {}, (), ())
    return tuple(flags)


def enumerate_flags(n):
    """All flags of the n-point cycle, each strata chain exactly once.

    Step i chooses z_i = 0 or z_i = q^{-2} z_j for any j != i; a reference
    to an eliminated variable composes through its constraint, and choices
    cutting the same stratum are merged.  Counts start 1, 2, 7.
    """
    return list(_flags_cached(int(n)))


# ---------------------------------------------------------------------------
# exact integration: iterated residues
# ---------------------------------------------------------------------------

def _canonical_factor(u, cu, w, cw):
    """(cu z_u - cw z_w) as (a, ca, b, cb) with a < b, plus the sign the
    reordering pulls out of the denominator."""
    if u < w:
        return (u, cu, w, cw), 1
    return (w, cw, u, cu), -1


def _init_state(form):
    """Numerator with the measure folded in (one z_k^{-1} per variable) and
    the factor list in canonical orientation."""
    n = form.n
    sign = 1
    facs = []
    for l, m in form.denominator_factors:
        fac, sg = _canonical_factor(l, ONE, m, _Q2)
        facs.append(fac)
        sign *= sg
    nums = {}
    for key, c in form.numerator.items():
        nums[tuple(e - 1 for e in key)] = c if sign == 1 else -c
    return nums, facs


def _expand_inverse(lead_s, ratio, base, depth, n):
    """Truncated expansion of an inverted factor for |z_v| below every other
    radius: term t carries scalar lead_s*ratio^t on z_base^{-1-t} z_v^t."""
    terms = {}
    s = lead_s
    for t in range(depth + 1):
        key = [0] * n
        key[base - 1] = -1 - t
        terms[t] = (tuple(key), s)
        s = s * ratio
    return terms


def _residue_step(nums, facs, v, target, n):
    """Residue of nums/prod(facs) in the single variable z_v.

    target None takes the counterclockwise residue at z_v = 0 by Laurent
    coefficient extraction; target (e, b) takes it at the point
    z_v = q^e z_b, which must be a simple pole.  Returns the new state; an
    empty numerator means the contribution died.
    """
    if not nums:
        return {}, []
    involved = [f for f in facs if f[0] == v or f[2] == v]
    others = [f for f in facs if f[0] != v and f[2] != v]

    if target is None:
        lo = min(k[v - 1] for k in nums)
        if lo > -1:
            return {}, []
        depth = -1 - lo
        series = {0: {(0,) * n: ONE}}
        for a, ca, b, cb in involved:
            if a == v:
                fac_terms = _expand_inverse(-(cb.inverse()), ca / cb, b,
                                            depth, n)
            else:
                fac_terms = _expand_inverse(ca.inverse(), cb / ca, a,
                                            depth, n)
            new = {}
            for t1, layer in series.items():
                for t2, (mk, ms) in fac_terms.items():
                    t = t1 + t2
                    if t > depth:
                        continue
                    dst = new.setdefault(t, {})
                    for k, c in layer.items():
                        kk = tuple(x + y for x, y in zip(k, mk))
                        w = c * ms
                        prev = dst.get(kk)
                        w = w if prev is None else prev + w
                        if w.is_zero():
                            dst.pop(kk, None)
                        else:
                            dst[kk] = w
            series = new
        out = {}
        for key, c in nums.items():
            e = key[v - 1]
            if e > -1:
                continue
            layer = series.get(-1 - e)
            if not layer:
                continue
            k0 = list(key)
            k0[v - 1] = 0
            for mk, mc in layer.items():
                kk = tuple(x + y for x, y in zip(k0, mk))
                w = c * mc
                prev = out.get(kk)
                w = w if prev is None else prev + w
                if w.is_zero():
                    out.pop(kk, None)
                else:
                    out[kk] = w
        return out, others

    e, b = target
    point = qp(e)
    vanishing = []
    live = []
    for fac in involved:
        a, ca, b2, cb = fac
        if a == v and b2 == b and (ca * point - cb).is_zero():
            vanishing.append(fac)
        elif b2 == v and a == b and (ca - cb * point).is_zero():
            vanishing.append(fac)
        else:
            live.append(fac)
    if not vanishing:
        return {}, []
    if len(vanishing) > 1:
        raise ValueError(
            f"higher-order pole: {len(vanishing)} denominator factors "
            f"vanish at z{v} = q^{e} z{b}")
    a, ca, b2, cb = vanishing[0]
    scale = (ca if a == v else -cb).inverse()
    shift = [0] * n
    newfacs = []
    for a2, ca2, b3, cb2 in live:
        if a2 == v:
            u, cu, w, cw = b, ca2 * point, b3, cb2
        else:
            u, cu, w, cw = a2, ca2, b, cb2 * point
        if u == w:
            s = cu - cw
            scale = scale * s.inverse()
            shift[u - 1] -= 1
        else:
            fac, sg = _canonical_factor(u, cu, w, cw)
            if sg < 0:
                scale = -scale
            newfacs.append(fac)
    out = {}
    for key, c in nums.items():
        ev = key[v - 1]
        kk = list(key)
        kk[v - 1] = 0
        kk[b - 1] += ev
        kk = tuple(x + y for x, y in zip(kk, shift))
        w = c * point ** ev * scale
        prev = out.get(kk)
        w = w if prev is None else prev + w
        if w.is_zero():
            out.pop(kk, None)
        else:
            out[kk] = w
    return out, others + newfacs


def _require_single_root(form):
    if not form.config.single_root():
        raise NotImplementedError(
            "conjectural cycles not implemented: only single-root "
            "configurations integrate")


def _flag_value(form, flag):
    nums, facs = _init_state(form)
    n = form.n
    for i, res in enumerate(flag.resolved):
        nums, facs = _residue_step(nums, facs, i + 1, res, n)
        if not nums:
            return ZERO
    assert list(nums) == [(0,) * n], "free variables left after a full flag"
    return nums[(0,) * n]


def flag_residues(form):
    """Per-flag contributions as (flag, Scalar) pairs; their sum over the
    set of flags is the cycle integral."""
    _require_single_root(form)
    return [(flag, _flag_value(form, flag))
            for flag in enumerate_flags(form.n)]


def integrate_Dn(form):
    """Exact cycle integral of a rational form over the n-point cycle.

    Sums iterated residues over enumerate_flags(n): each step substitutes
    the flag's constraint and takes the single-variable residue, ascending
    through z_1, ..., z_n.  For one variable this is constant-term
    extraction (the unit-circle integral).  Raises ValueError when a flag
    step hits a pole of order above one (repeated factors), and
    NotImplementedError for mixed-label configurations.
    """
    total = ZERO
    for _flag, val in flag_residues(form):
        total = total + val
    return total


# ---------------------------------------------------------------------------
# numeric oracle: quadrature over a product of circles
# ---------------------------------------------------------------------------

def integrate_torus_numeric(form, q_value=2.0, radii=None,
                            samples_per_circle=256, pole_tolerance=1e-6):
    """Quadrature of the form over the torus |z_k| = radii[k] at a concrete
    q with |q| > 1.

    The measure dz/(2 pi i z) per variable turns the integral into a plain
    average over uniform angle grids, so the trapezoidal sum converges
    spectrally in samples_per_circle for rational integrands.  A denominator
    factor whose vanishing locus meets the torus (within pole_tolerance,
    relatively) raises with the offending factor named.
    """
    _require_single_root(form)
    n = form.n
    q = complex(q_value)
    if abs(q) <= 1:
        raise ValueError("the torus oracle needs |q| > 1")
    if radii is None:
        radii = (1.0,) * n
    radii = tuple(float(r) for r in radii)
    if len(radii) != n or any(r <= 0 for r in radii):
        raise ValueError("radii must list one positive radius per variable")
    q2 = q * q
    for l, m in form.denominator_factors:
        hi = max(radii[l - 1], abs(q2) * radii[m - 1])
        if abs(radii[l - 1] - abs(q2) * radii[m - 1]) <= pole_tolerance * hi:
            raise ValueError(
                f"pole of factor (z{l} - q^2 z{m}) lies on the torus "
                f"|z{l}| = {radii[l - 1]}, |z{m}| = {radii[m - 1]}")
    if not form.numerator:
        return 0j
    count = int(samples_per_circle)
    if count < 1:
        raise ValueError("samples_per_circle must be positive")
    theta = 2.0 * np.pi * np.arange(count) / count
    circle = np.exp(1j * theta)
    circles = [r * circle for r in radii]
    coeffs = [(key, complex(c.evaluate(q)))
              for key, c in form.numerator.items()]

    def block(zs):
        num = np.zeros_like(zs[0], dtype=complex)
        for key, cv in coeffs:
            term = cv
            for i, e in enumerate(key):
                if e:
                    term = term * zs[i] ** e
            num = num + term
        den = np.ones_like(zs[0], dtype=complex)
        for l, m in form.denominator_factors:
            den = den * (zs[l - 1] - q2 * zs[m - 1])
        return num / den

    if n == 1:
        total = block([circles[0]]).sum()
    else:
        z1, z2 = np.meshgrid(circles[0], circles[1], indexing="ij")
        total = 0j
        for idx in np.ndindex(*(count,) * (n - 2)):
            zs = [z1, z2] + [circles[k + 2][idx[k]] for k in range(n - 2)]
            total = total + block(zs).sum()
    return complex(total / count ** n)


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

def check_antisymmetry(form, permutation):
    """Verify that the cycle integral of the pulled-back form equals the
    permutation sign times the original integral, both computed exactly."""
    perm = tuple(int(p) for p in permutation)
    pulled = form.pullback(perm)
    lhs = integrate_Dn(pulled)
    base = integrate_Dn(form)
    sign = _parity(perm)
    rhs = base if sign == 1 else -base
    diff = lhs - rhs
    status = "pass" if diff.is_zero() else "fail"
    return _report(
        "cycle-antisymmetry",
        {"n": form.n, "permutation": list(perm), "sign": sign},
        status,
        None if diff.is_zero() else str(diff),
        str(lhs),
        f"{'+' if sign == 1 else '-'}({base})",
    )


def check_factorization(form, subset):
    """Verify that the integral splits as a product over a decoupled
    variable split: group = sorted(subset), complement the rest.

    A denominator factor joining the two groups violates the precondition
    and is reported as such rather than as a failure.
    """
    n = form.n
    group = sorted(set(int(i) for i in subset))
    if any(i < 1 or i > n for i in group):
        raise ValueError("subset indices must lie in 1..n")
    comp = [i for i in range(1, n + 1) if i not in group]
    if not group or not comp:
        raise ValueError("the split needs two nonempty groups")
    params = {"n": n, "subset": group}
    for l, m in form.denominator_factors:
        if (l in group) != (m in group):
            return _report(
                "cycle-factorization", params, "precondition-violation",
                f"factor (z{l} - q^2 z{m}) couples the two groups")
    lhs = integrate_Dn(form)

    def sub_indices(idx):
        pos = {i: k + 1 for k, i in enumerate(idx)}
        facs = [(pos[l], pos[m]) for l, m in form.denominator_factors
                if l in pos]
        labels = {pos[i]: form.config.labels[i] for i in idx}
        return LabeledConfig(len(idx), labels), facs

    cfg1, facs1 = sub_indices(group)
    cfg2, facs2 = sub_indices(comp)
    grouped = {}
    for key, c in form.numerator.items():
        k1 = tuple(key[i - 1] for i in group)
        k2 = tuple(key[i - 1] for i in comp)
        grouped.setdefault(k2, {})[k1] = c
    rhs = ZERO
    for k2, num1 in grouped.items():
        v2 = integrate_Dn(RationalFormN(cfg2, {k2: ONE}, facs2))
        if v2.is_zero():
            continue
        v1 = integrate_Dn(RationalFormN(cfg1, num1, facs1))
        rhs = rhs + v1 * v2
    diff = lhs - rhs
    status = "pass" if diff.is_zero() else "fail"
    return _report("cycle-factorization", params, status,
                   None if diff.is_zero() else str(diff), str(lhs), str(rhs))


def check_admissible(form):
    """Repeated residues onto the codimension-two strata
    z_{m1} = z_{m2} = q^{+-2} z_{m3} must all vanish.

    Both residue orders are taken for each stratum.  A higher-order pole on
    a stratum counts as non-vanishing.  Needs three or more points to have
    any strata; below that the report passes vacuously.
    """
    _require_single_root(form)
    n = form.n
    checked = 0
    failures = []
    for m3 in range(1, n + 1):
        rest = [i for i in range(1, n + 1) if i != m3]
        for ai in range(len(rest)):
            for bi in range(ai + 1, len(rest)):
                m1, m2 = rest[ai], rest[bi]
                for e in (2, -2):
                    for first, second in ((m1, m2), (m2, m1)):
                        checked += 1
                        label = (f"z{m1} = z{m2} = q^{e} z{m3}"
                                 f" (residue z{first} then z{second})")
                        try:
                            nums, facs = _init_state(form)
                            nums, facs = _residue_step(
                                nums, facs, first, (e, m3), n)
                            nums, facs = _residue_step(
                                nums, facs, second, (e, m3), n)
                        except ValueError:
                            failures.append(label + ": higher-order pole")
                            continue
                        if nums:
                            key = sorted(nums)[0]
                            failures.append(
                                f"{label}: residue has term "
                                f"({nums[key]}) at exponents {key}")
    status = "pass" if not failures else "fail"
    return _report(
        "serre-admissibility",
        {"n": n, "strata_residues_checked": checked},
        status,
        failures[0] if failures else None,
        f"{len(failures)} non-vanishing of {checked}",
        "0 expected",
    )
