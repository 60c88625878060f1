# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled linear-algebra kernels over a finite field given by tables.

Same interface as ``_gfcore_py.FieldOps``.
"""
from libc.stdlib cimport malloc, free


cdef class FieldOps:
    cdef public int q
    cdef int *_add
    cdef int *_mul
    cdef int *_neg
    cdef int *_inv

    def __cinit__(self, int q, add, mul, neg, inv):
        cdef int i
        self.q = q
        self._add = <int *> malloc(q * q * sizeof(int))
        self._mul = <int *> malloc(q * q * sizeof(int))
        self._neg = <int *> malloc(q * sizeof(int))
        self._inv = <int *> malloc(q * sizeof(int))
        if not (self._add and self._mul and self._neg and self._inv):
            raise MemoryError()
        for i in range(q * q):
            self._add[i] = add[i]
            self._mul[i] = mul[i]
        for i in range(q):
            self._neg[i] = neg[i]
            self._inv[i] = inv[i]

    def __dealloc__(self):
        free(self._add)
        free(self._mul)
        free(self._neg)
        free(self._inv)

    cdef int _reduce(self, int *m, int nrows, int ncols, int *pivots):
        cdef int r = 0, c, p, i, j, s, f, nf, tmp
        cdef int q = self.q
        for c in range(ncols):
            if r == nrows:
                break
            p = r
            while p < nrows and m[p * ncols + c] == 0:
                p += 1
            if p == nrows:
                continue
            if p != r:
                for j in range(ncols):
                    tmp = m[r * ncols + j]
                    m[r * ncols + j] = m[p * ncols + j]
                    m[p * ncols + j] = tmp
            s = self._inv[m[r * ncols + c]]
            if s != 1:
                for j in range(ncols):
                    m[r * ncols + j] = self._mul[s * q + m[r * ncols + j]]
            for i in range(nrows):
                if i != r:
                    f = m[i * ncols + c]
                    if f != 0:
                        nf = self._neg[f]
                        for j in range(ncols):
                            if m[r * ncols + j] != 0:
                                m[i * ncols + j] = self._add[
                                    m[i * ncols + j] * q + self._mul[nf * q + m[r * ncols + j]]
                                ]
            pivots[r] = c
            r += 1
        return r

    cdef int *_load(self, rows, int nrows, int ncols) except NULL:
        cdef int *m = <int *> malloc((nrows * ncols + 1) * sizeof(int))
        cdef int i, j
        if not m:
            raise MemoryError()
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                m[i * ncols + j] = row[j]
        return m

    def rref(self, rows, int ncols):
        cdef int nrows = len(rows)
        cdef int *m = self._load(rows, nrows, ncols)
        cdef int *piv = <int *> malloc((ncols + 1) * sizeof(int))
        cdef int r, i, j
        try:
            r = self._reduce(m, nrows, ncols, piv)
            out = [[m[i * ncols + j] for j in range(ncols)] for i in range(r)]
            pivots = [piv[i] for i in range(r)]
        finally:
            free(m)
            free(piv)
        return out, pivots

    def rank(self, rows, int ncols):
        cdef int nrows = len(rows)
        cdef int *m = self._load(rows, nrows, ncols)
        cdef int *piv = <int *> malloc((ncols + 1) * sizeof(int))
        cdef int r
        try:
            r = self._reduce(m, nrows, ncols, piv)
        finally:
            free(m)
            free(piv)
        return r

    def nullspace(self, rows, int ncols):
        cdef int nrows = len(rows)
        cdef int *m = self._load(rows, nrows, ncols)
        cdef int *piv = <int *> malloc((ncols + 1) * sizeof(int))
        cdef int r, i, f, k
        basis = []
        try:
            r = self._reduce(m, nrows, ncols, piv)
            pivset = set(piv[i] for i in range(r))
            for f in range(ncols):
                if f in pivset:
                    continue
                v = [0] * ncols
                v[f] = 1
                for k in range(r):
                    if m[k * ncols + f] != 0:
                        v[piv[k]] = self._neg[m[k * ncols + f]]
                basis.append(v)
        finally:
            free(m)
            free(piv)
        return basis

    def matmul(self, a, b):
        cdef int n_a = len(a)
        if n_a == 0:
            return []
        cdef int kdim = len(a[0])
        cdef int n = len(b[0]) if len(b) else 0
        cdef int *ma = self._load(a, n_a, kdim)
        cdef int *mb = self._load(b, kdim, n)
        cdef int *mc = <int *> malloc((n_a * n + 1) * sizeof(int))
        cdef int i, j, k, x, acc
        cdef int q = self.q
        try:
            for i in range(n_a):
                for j in range(n):
                    acc = 0
                    for k in range(kdim):
                        x = ma[i * kdim + k]
                        if x != 0:
                            acc = self._add[acc * q + self._mul[x * q + mb[k * n + j]]]
                    mc[i * n + j] = acc
            out = [[mc[i * n + j] for j in range(n)] for i in range(n_a)]
        finally:
            free(ma)
            free(mb)
            free(mc)
        return out

    def is_invertible(self, a):
        cdef int n = len(a)
        if n == 0:
            return True
        return self.rank(a, n) == n
