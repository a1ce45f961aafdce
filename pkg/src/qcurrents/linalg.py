"""Sparse matrices over exact ring entries.

Entries are anything with +, *, unary -, ``is_zero``: Scalar for numeric
q-coefficients, ParamScalar when formal evaluation parameters are present.
Rows/columns are dense 0-based indices; only nonzero entries are stored.
"""

from __future__ import annotations

from .qarith import ONE, Scalar


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "data")

    def __init__(self, nrows, ncols, data=None):
        self.nrows = nrows
        self.ncols = ncols
        self.data = {}
        if data:
            for k, v in data.items():
                if not v.is_zero():
                    self.data[k] = v

    @classmethod
    def identity(cls, n, one=ONE):
        return cls(n, n, {(i, i): one for i in range(n)})

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    def copy(self):
        m = SparseMatrix(self.nrows, self.ncols)
        m.data = dict(self.data)
        return m

    def is_zero(self):
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) \
            and self.data == other.data

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        out = SparseMatrix(self.nrows, self.ncols)
        out.data = dict(self.data)
        for k, v in other.data.items():
            w = out.data.get(k)
            w = v if w is None else w + v
            if w.is_zero():
                out.data.pop(k, None)
            else:
                out.data[k] = w
        return out

    def __neg__(self):
        out = SparseMatrix(self.nrows, self.ncols)
        out.data = {k: -v for k, v in self.data.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if hasattr(c, "is_zero") and c.is_zero():
            return SparseMatrix(self.nrows, self.ncols)
        out = SparseMatrix(self.nrows, self.ncols)
        out.data = {k: c * v for k, v in self.data.items()}
        return out

    def __matmul__(self, other):
        assert self.ncols == other.nrows, "shape mismatch"
        rows = {}
        for (j, k), v in other.data.items():
            rows.setdefault(j, []).append((k, v))
        out = {}
        for (i, j), a in self.data.items():
            hit = rows.get(j)
            if not hit:
                continue
            for k, b in hit:
                key = (i, k)
                w = out.get(key)
                p = a * b
                w = p if w is None else w + p
                if w.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = w
        m = SparseMatrix(self.nrows, other.ncols)
        m.data = out
        return m

    def power(self, k):
        assert self.nrows == self.ncols and k >= 0
        out = SparseMatrix.identity(self.nrows)
        base = self
        for _ in range(k):
            out = out @ base
        return out

    def apply(self, vec):
        """Matrix times sparse vector {index: coeff}."""
        out = {}
        for (i, j), a in self.data.items():
            c = vec.get(j)
            if c is None:
                continue
            w = out.get(i)
            p = a * c
            w = p if w is None else w + p
            if w.is_zero():
                out.pop(i, None)
            else:
                out[i] = w
        return out

    def dense_rows(self, zero=None):
        """Row-major nested lists of entries (canonical dump order)."""
        z = Scalar(0) if zero is None else zero
        return [[self.data.get((i, j), z) for j in range(self.ncols)]
                for i in range(self.nrows)]

    def __str__(self):
        rows = self.dense_rows()
        return "\n".join("[" + ", ".join(str(v) for v in r) + "]" for r in rows)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.data)})"


def kron(a, b):
    """Tensor product: slot ordering (first ⊗ second), row-major composite
    index i1*b.nrows + i2."""
    out = SparseMatrix(a.nrows * b.nrows, a.ncols * b.ncols)
    for (i1, j1), v1 in a.data.items():
        for (i2, j2), v2 in b.data.items():
            v = v1 * v2
            if not v.is_zero():
                out.data[(i1 * b.nrows + i2, j1 * b.ncols + j2)] = v
    return out


def lift_two_site(r, dims, sites):
    """Embed a two-site operator into a product of len(dims) sites.

    INPUT: ``r`` acts on site pair ``sites = (p, q)`` with p < q, its indices
    composite row-major over (dim_p, dim_q); ``dims`` are all site dimensions.
    OUTPUT: SparseMatrix on the full product, identity elsewhere.
    """
    p, q = sites
    assert p < q
    n = 1
    for d in dims:
        n *= d
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides.reverse()
    spectator = [i for i in range(len(dims)) if i not in (p, q)]

    def spectator_indices(k=0, current=0):
        if k == len(spectator):
            yield current
            return
        site = spectator[k]
        for x in range(dims[site]):
            yield from spectator_indices(k + 1, current + x * strides[site])

    out = SparseMatrix(n, n)
    dq = dims[q]
    for (ri, ci), v in r.data.items():
        ip, iq = divmod(ri, dq)
        jp, jq = divmod(ci, dq)
        base_r = ip * strides[p] + iq * strides[q]
        base_c = jp * strides[p] + jq * strides[q]
        for s in spectator_indices():
            out.data[(base_r + s, base_c + s)] = v
    return out


def exp_series(a, coeffs):
    """sum_k coeffs[k] * a^k, stopping early once a^k vanishes.

    Intended for nilpotent ``a`` (the series is then exact); otherwise the
    caller chooses the truncation by the length of ``coeffs``.
    """
    assert a.nrows == a.ncols
    out = SparseMatrix.identity(a.nrows).scale(coeffs[0])
    pw = SparseMatrix.identity(a.nrows)
    for k in range(1, len(coeffs)):
        pw = pw @ a
        if pw.is_zero():
            break
        out = out + pw.scale(coeffs[k])
    return out
