"""Finite-dimensional quantum sl2: irreducible representations and the
R-matrix on tensor products of them.

Two independent constructions of the same operator are kept side by side:

- ``standard_R_finite``: Cartan prefactor times the q-exponential
  exp_{q^2}((q^-1 - q) F (x) E);
- ``paper_R_finite``:    Cartan prefactor times a plain exponential of the
  commuting family F^n (x) E^n with coefficients
  (q^-1 - q)^(2n-1) / (n [n]).

Their agreement (exact, entrywise) is one of the package's cross-checks.
Comparison helpers report an overall scalar mismatch instead of absorbing
it, so a normalization discrepancy would be visible, not hidden.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import SparseMatrix, exp_series, kron, lift_two_site
from .qarith import ONE, Scalar, exp_p_coefficients, q_int, qp, sp


class FiniteRep:
    """Spin-j irreducible on basis v_0..v_{2j}.

    Actions: E v_i = [2j-i+1] v_{i-1}, F v_i = [i+1] v_{i+1},
    K v_i = q^(2j-2i) v_i.  ``two_j`` is the integer 2j.
    """

    __slots__ = ("two_j", "dim", "E", "F", "K", "Kinv", "h_values")

    def __init__(self, spin):
        two_j = int(round(2 * spin))
        if abs(2 * spin - two_j) > 1e-12 or two_j < 0:
            raise ValueError(f"spin must be a nonnegative half-integer, got {spin}")
        if spin > 2:
            raise ValueError("spin > 2 not supported")
        self.two_j = two_j
        d = two_j + 1
        self.dim = d
        self.E = SparseMatrix(d, d, {(i - 1, i): q_int(two_j - i + 1)
                                     for i in range(1, d)})
        self.F = SparseMatrix(d, d, {(i + 1, i): q_int(i + 1)
                                     for i in range(d - 1)})
        self.K = SparseMatrix(d, d, {(i, i): qp(two_j - 2 * i) for i in range(d)})
        self.Kinv = SparseMatrix(d, d, {(i, i): qp(2 * i - two_j)
                                        for i in range(d)})
        self.h_values = [two_j - 2 * i for i in range(d)]

    def __repr__(self):
        return f"FiniteRep(spin={Fraction(self.two_j, 2)})"


def cartan_prefactor(rep1, rep2):
    """Diagonal operator q^(-h(x)h/2) on V1 (x) V2."""
    d1, d2 = rep1.dim, rep2.dim
    out = SparseMatrix(d1 * d2, d1 * d2)
    for i1, h1 in enumerate(rep1.h_values):
        for i2, h2 in enumerate(rep2.h_values):
            k = i1 * d2 + i2
            out.data[(k, k)] = sp(-h1 * h2)
    return out


def standard_R_finite(rep1, rep2):
    """R = q^(-h(x)h/2) exp_{q^2}((q^-1 - q) F (x) E), exact.

    F (x) E is nilpotent on the finite tensor product, so the q-exponential
    terminates on its own.
    """
    lam = qp(-1) - qp(1)
    a = kron(rep1.F, rep2.E).scale(lam)
    order = min(rep1.two_j, rep2.two_j) + 2
    series = exp_series(a, exp_p_coefficients(qp(2), order))
    return cartan_prefactor(rep1, rep2) @ series


def paper_R_finite(rep1, rep2, order=None):
    """R = q^(-h(x)h/2) exp( sum_n (q^-1-q)^(2n-1)/(n [n]) F^n (x) E^n ).

    ``order`` bounds the sum over n; anything at or past the nilpotency
    index min(2j1, 2j2) is exact (the default).
    """
    if order is None:
        order = min(rep1.two_j, rep2.two_j)
    lam = qp(-1) - qp(1)
    d = rep1.dim * rep2.dim
    arg = SparseMatrix(d, d)
    fn = SparseMatrix.identity(rep1.dim)
    en = SparseMatrix.identity(rep2.dim)
    for n in range(1, order + 1):
        fn = fn @ rep1.F
        en = en @ rep2.E
        x = kron(fn, en)
        if x.is_zero():
            break
        c = lam ** (2 * n - 1) / (Scalar(n) * q_int(n))
        arg = arg + x.scale(c)
    fact = [Scalar(Fraction(1, 1))]
    for n in range(1, order + 2):
        fact.append(fact[-1] / Scalar(n))
    return cartan_prefactor(rep1, rep2) @ exp_series(arg, fact)


def compare_R_constructions(rep1, rep2):
    """Entrywise comparison of the two R constructions.

    OUTPUT dict: status 'equal' | 'proportional' | 'different'; for
    'proportional' the overall ratio is reported, never absorbed.
    """
    r_std = standard_R_finite(rep1, rep2)
    r_pap = paper_R_finite(rep1, rep2)
    if r_std == r_pap:
        return {"status": "equal", "dim": r_std.nrows}
    ratio = None
    for k, v in r_pap.data.items():
        w = r_std.data.get(k)
        if w is None:
            return {"status": "different", "witness": k}
        ratio = v / w
        break
    if r_pap == r_std.scale(ratio):
        return {"status": "proportional", "ratio": str(ratio)}
    return {"status": "different",
            "witness": _first_mismatch(r_std, r_pap)}


def _first_mismatch(a, b):
    keys = sorted(set(a.data) | set(b.data))
    z = Scalar(0)
    for k in keys:
        if a.data.get(k, z) != b.data.get(k, z):
            return k
    return None


# -- coproducts on two finite slots -----------------------------------------

def coproduct_finite(gen, rep1, rep2, opposite=False):
    """Delta(gen) on V1 (x) V2 for gen in {'E','F','K','Kinv'}.

    Delta(E) = E (x) 1 + K^-1 (x) E,   Delta(F) = 1 (x) F + F (x) K,
    Delta(K) = K (x) K; ``opposite`` composes with the slot flip.
    """
    i1 = SparseMatrix.identity(rep1.dim)
    i2 = SparseMatrix.identity(rep2.dim)
    if not opposite:
        if gen == "E":
            return kron(rep1.E, i2) + kron(rep1.Kinv, rep2.E)
        if gen == "F":
            return kron(i1, rep2.F) + kron(rep1.F, rep2.K)
        if gen == "K":
            return kron(rep1.K, rep2.K)
        if gen == "Kinv":
            return kron(rep1.Kinv, rep2.Kinv)
    else:
        if gen == "E":
            return kron(i1, rep2.E) + kron(rep1.E, rep2.Kinv)
        if gen == "F":
            return kron(rep1.F, i2) + kron(rep1.K, rep2.F)
        if gen == "K":
            return kron(rep1.K, rep2.K)
        if gen == "Kinv":
            return kron(rep1.Kinv, rep2.Kinv)
    raise ValueError(f"unknown generator {gen!r}")


def intertwining_residual(r, rep1, rep2, gen):
    """R Delta(gen) - Delta_op(gen) R; zero iff R intertwines on this gen."""
    return r @ coproduct_finite(gen, rep1, rep2) \
        - coproduct_finite(gen, rep1, rep2, opposite=True) @ r


def check_intertwining(rep1, rep2, builder=standard_R_finite):
    """True iff R intertwines Delta with Delta_op on all generators."""
    r = builder(rep1, rep2)
    return all(intertwining_residual(r, rep1, rep2, g).is_zero()
               for g in ("E", "F", "K"))


# -- Yang-Baxter -------------------------------------------------------------

def ybe_residual(r12, r13, r23, dims):
    """R12 R13 R23 - R23 R13 R12 on the triple product.

    INPUT: each r_ij acts on the indicated slot pair (composite row-major
    index over that pair); ``dims`` are the three slot dimensions.
    """
    a = lift_two_site(r12, dims, (0, 1))
    b = lift_two_site(r13, dims, (0, 2))
    c = lift_two_site(r23, dims, (1, 2))
    return a @ b @ c - c @ b @ a


def ybe_check(spin1, spin2, spin3, builder=standard_R_finite):
    """Build the three pairwise R-matrices and test the Yang-Baxter equation."""
    reps = [FiniteRep(spin1), FiniteRep(spin2), FiniteRep(spin3)]
    r12 = builder(reps[0], reps[1])
    r13 = builder(reps[0], reps[2])
    r23 = builder(reps[1], reps[2])
    dims = tuple(r.dim for r in reps)
    return ybe_residual(r12, r13, r23, dims).is_zero()


def matrix_to_strings(m):
    """Row-major nested lists of canonical coefficient strings."""
    return [[str(v) for v in row] for row in m.dense_rows()]
