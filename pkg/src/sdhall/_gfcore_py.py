"""Pure-Python linear-algebra kernels over a finite field given by tables.

Field elements are integers ``0 .. q-1``; matrices are lists of row lists.
This module mirrors the compiled ``_gfcore`` extension and is used when the
extension is not built.
"""
from __future__ import annotations


class FieldOps:
    """Row reduction, rank, nullspace and products over one finite field."""

    def __init__(self, q, add, mul, neg, inv):
        self.q = q
        self._add = [add[i * q:(i + 1) * q] for i in range(q)]
        self._mul = [mul[i * q:(i + 1) * q] for i in range(q)]
        self._neg = list(neg)
        self._inv = list(inv)

    def rref(self, rows, ncols):
        """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
        add, mul, neg, inv = self._add, self._mul, self._neg, self._inv
        m = [list(r) for r in rows]
        pivots = []
        r = 0
        nrows = len(m)
        for c in range(ncols):
            p = r
            while p < nrows and m[p][c] == 0:
                p += 1
            if p == nrows:
                continue
            m[r], m[p] = m[p], m[r]
            row = m[r]
            s = inv[row[c]]
            if s != 1:
                ms = mul[s]
                row = [ms[x] for x in row]
                m[r] = row
            for i in range(nrows):
                if i != r:
                    f = m[i][c]
                    if f:
                        nf = mul[neg[f]]
                        mi = m[i]
                        m[i] = [add[a][nf[b]] for a, b in zip(mi, row)]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return m[:r], pivots

    def rank(self, rows, ncols):
        return len(self.rref(rows, ncols)[1])

    def nullspace(self, rows, ncols):
        """Basis of {x : rows * x = 0}."""
        red, pivots = self.rref(rows, ncols)
        neg = self._neg
        pivset = set(pivots)
        basis = []
        for f in range(ncols):
            if f in pivset:
                continue
            v = [0] * ncols
            v[f] = 1
            for row, pc in zip(red, pivots):
                if row[f]:
                    v[pc] = neg[row[f]]
            basis.append(v)
        return basis

    def matmul(self, a, b):
        add, mul = self._add, self._mul
        if not a:
            return []
        n = len(b[0]) if b else 0
        out = []
        for row in a:
            acc = [0] * n
            for k, x in enumerate(row):
                if x:
                    mx = mul[x]
                    bk = b[k]
                    acc = [add[s][mx[y]] for s, y in zip(acc, bk)]
            out.append(acc)
        return out

    def is_invertible(self, a):
        n = len(a)
        if n == 0:
            return True
        return self.rank(a, n) == n
