"""Nilpotent quiver representations and 2-periodic complexes over small finite
fields: Hom spaces, automorphism counts, Krull-Schmidt decomposition,
isomorphism classes, homology, subcomplex counting and extension classes.

A complex X = (X^1, X^0, d^1, d^0) is stored as a graded vector space with one
block per (degree, vertex) pair, ordered (1, v) for all vertices and then
(0, v), together with square operator matrices on the total space: one per
arrow (acting in both degrees) and a final one, D, combining d^1 and d^0.
Matrices act on column vectors.  A module M is identified with the stalk
complex C_M concentrated in degree 0.
"""
from __future__ import annotations

import hashlib
import itertools
import random
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

from .gf import FiniteField, finite_field
from .quivercartan import Quiver, projective_data

Matrix = tuple  # tuple of row tuples

DEFAULT_MAX_DIM = 5
DEFAULT_MAX_Q = 9


class RepError(ValueError):
    """Malformed representation or complex data."""


class SizeError(RepError):
    """Enumeration exceeds the configured caps."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed; signals an enumeration bug."""


@dataclass
class Caps:
    """Enumeration caps; mutable configuration, not constants."""

    max_dim: int = DEFAULT_MAX_DIM
    max_q: int = DEFAULT_MAX_Q


CAPS = Caps()


def _freeze(m) -> Matrix:
    return tuple(tuple(r) for r in m)


def _zeros(r: int, c: int):
    return [[0] * c for _ in range(r)]


def _is_zero(m) -> bool:
    return not any(any(r) for r in m)


def check_q(q: int) -> FiniteField:
    if q > CAPS.max_q:
        raise SizeError(f"q = {q} exceeds the field-size cap {CAPS.max_q}")
    return finite_field(q)


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rep:
    """A nilpotent representation: one matrix (dim target x dim source) per arrow."""

    quiver: Quiver
    q: int
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "maps", tuple(_freeze(m) for m in self.maps))
        if len(self.dims) != self.quiver.n or len(self.maps) != len(self.quiver.arrows):
            raise RepError("representation data does not match the quiver")
        for (s, t), m in zip(self.quiver.arrow_indices, self.maps):
            if len(m) != self.dims[t] or any(len(r) != self.dims[s] for r in m):
                raise RepError("arrow matrix has the wrong shape")

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_nilpotent(self) -> bool:
        return C(self).is_nilpotent()


def zero_rep(Q: Quiver, q: int) -> Rep:
    return Rep(Q, q, (0,) * Q.n, tuple(() for _ in Q.arrows))


def semisimple_rep(Q: Quiver, q: int, dims: Sequence[int]) -> Rep:
    dims = tuple(dims)
    return Rep(Q, q, dims, tuple(_freeze(_zeros(dims[t], dims[s])) for s, t in Q.arrow_indices))


def simple_rep(Q: Quiver, q: int, vertex, power: int = 1) -> Rep:
    i = vertex if isinstance(vertex, int) else Q.index[str(vertex)]
    return semisimple_rep(Q, q, tuple(power if j == i else 0 for j in range(Q.n)))


def jordan_rep(Q: Quiver, q: int, k: int) -> Rep:
    """Single nilpotent Jordan block of size k on the first loop of the first looped vertex."""
    loops = [h for h, (s, t) in enumerate(Q.arrow_indices) if s == t]
    if not loops:
        raise RepError("quiver has no loop")
    h0 = loops[0]
    v = Q.arrow_indices[h0][0]
    dims = tuple(k if j == v else 0 for j in range(Q.n))
    maps = []
    for h, (s, t) in enumerate(Q.arrow_indices):
        m = _zeros(dims[t], dims[s])
        if h == h0:
            for i in range(k - 1):
                m[i][i + 1] = 1
        maps.append(m)
    return Rep(Q, q, dims, tuple(maps))


def projective_rep(Q: Quiver, q: int, vertex) -> Rep:
    """Indecomposable projective P_v of an acyclic quiver, with basis the paths out of v."""
    v = vertex if isinstance(vertex, int) else Q.index[str(vertex)]
    projective_data(Q)  # raises for cyclic quivers
    paths = [((), v)]
    frontier = [((), v)]
    while frontier:
        nxt = []
        for word, end in frontier:
            for h, (s, t) in enumerate(Q.arrow_indices):
                if s == end:
                    nxt.append((word + (h,), t))
        paths.extend(nxt)
        frontier = nxt
    by_vertex: dict[int, list] = {i: [] for i in range(Q.n)}
    for p in paths:
        by_vertex[p[1]].append(p)
    pos = {p: (p[1], by_vertex[p[1]].index(p)) for p in paths}
    dims = tuple(len(by_vertex[i]) for i in range(Q.n))
    maps = []
    for h, (s, t) in enumerate(Q.arrow_indices):
        m = _zeros(dims[t], dims[s])
        for p in by_vertex[s]:
            m[pos[(p[0] + (h,), t)][1]][pos[p][1]] = 1
        maps.append(m)
    return Rep(Q, q, dims, tuple(maps))


def rep_direct_sum(*reps: Rep) -> Rep:
    if not reps:
        raise RepError("empty direct sum")
    Q, q = reps[0].quiver, reps[0].q
    dims = tuple(sum(r.dims[i] for r in reps) for i in range(Q.n))
    maps = []
    for h, (s, t) in enumerate(Q.arrow_indices):
        m = _zeros(dims[t], dims[s])
        ro = co = 0
        for r in reps:
            for i, row in enumerate(r.maps[h]):
                for j, x in enumerate(row):
                    m[ro + i][co + j] = x
            ro += r.dims[t]
            co += r.dims[s]
        maps.append(m)
    return Rep(Q, q, dims, tuple(maps))


# ---------------------------------------------------------------------------
# 2-periodic complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cx2:
    """A 2-periodic complex of nilpotent representations in graded-operator form."""

    quiver: Quiver
    q: int
    dims1: tuple[int, ...]
    dims0: tuple[int, ...]
    ops: tuple[Matrix, ...]

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self.dims1) + tuple(self.dims0)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.sizes:
            out.append(acc)
            acc += s
        return tuple(out)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        return tuple(b for b, s in enumerate(self.sizes) for _ in range(s))

    @property
    def field(self) -> FiniteField:
        return finite_field(self.q)

    @property
    def arrow_ops(self) -> tuple[Matrix, ...]:
        return self.ops[:-1]

    @property
    def D(self) -> Matrix:
        return self.ops[-1]

    @property
    def dims(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.dims1, self.dims0)

    def is_module(self) -> bool:
        return not any(self.dims1)

    def is_zero(self) -> bool:
        return self.n == 0

    def _block(self, m, tb: int, sb: int):
        ro, co = self.offsets[tb], self.offsets[sb]
        return [list(m[ro + i][co:co + self.sizes[sb]]) for i in range(self.sizes[tb])]

    def x(self, h: int, degree: int):
        s, t = self.quiver.arrow_indices[h]
        nv = self.quiver.n
        shift = 0 if degree == 1 else nv
        return self._block(self.ops[h], t + shift, s + shift)

    def d1(self, v: int):
        return self._block(self.D, self.quiver.n + v, v)

    def d0(self, v: int):
        return self._block(self.D, v, self.quiver.n + v)

    def degree_rep(self, degree: int) -> Rep:
        dims = self.dims1 if degree == 1 else self.dims0
        return Rep(self.quiver, self.q, dims, tuple(self.x(h, degree) for h in range(len(self.quiver.arrows))))

    def module(self) -> Rep:
        if not self.is_module():
            raise RepError("complex is not a stalk complex in degree 0")
        return self.degree_rep(0)

    def is_nilpotent(self) -> bool:
        return _generated_algebra_nilpotent(self.field, self.arrow_ops, self.n)

    def validate(self) -> "Cx2":
        F = self.field
        n = self.n
        if len(self.ops) != len(self.quiver.arrows) + 1:
            raise RepError("wrong number of operators")
        for m in self.ops:
            if len(m) != n or any(len(r) != n for r in m):
                raise RepError("operator has the wrong shape")
        allowed = _allowed_pairs(self.quiver)
        bo = self.block_of
        for o, m in enumerate(self.ops):
            for i in range(n):
                for j in range(n):
                    if m[i][j] and (bo[i], bo[j]) not in allowed[o]:
                        raise RepError("operator does not respect the grading")
        D = [list(r) for r in self.D]
        if n and not _is_zero(F.matmul(D, D)):
            raise RepError("d^1 d^0 and d^0 d^1 must vanish")
        for A in self.arrow_ops:
            A = [list(r) for r in A]
            if n and F.matmul(A, D) != F.matmul(D, A):
                raise RepError("differentials must be morphisms of representations")
        if not self.is_nilpotent():
            raise RepError("representation is not nilpotent")
        return self

    def __str__(self):
        return f"Cx2(dims1={list(self.dims1)}, dims0={list(self.dims0)}, q={self.q})"


def _allowed_pairs(Q: Quiver) -> list[set]:
    nv = Q.n
    out = []
    for s, t in Q.arrow_indices:
        out.append({(t, s), (t + nv, s + nv)})
    out.append({(nv + v, v) for v in range(nv)} | {(v, nv + v) for v in range(nv)})
    return out


def _generated_algebra_nilpotent(F: FiniteField, gens, n: int) -> bool:
    """True iff every product of n generators vanishes (span-of-words iteration)."""
    gens = [[list(r) for r in g] for g in gens if not _is_zero(g)]
    if not gens or n == 0:
        return True
    flat = lambda m: [x for r in m for x in r]
    unflat = lambda v: [v[i * n:(i + 1) * n] for i in range(n)]
    layer = F.span_basis([flat(g) for g in gens], n * n)
    for _ in range(n + 1):
        if not layer:
            return True
        prods = [flat(F.matmul(g, unflat(w))) for g in gens for w in layer]
        layer = F.span_basis([p for p in prods if any(p)], n * n)
    return not layer


def complex_from_parts(Q: Quiver, q: int, dims1, dims0, x1, x0, d1, d0, validate: bool = True) -> Cx2:
    """Assemble a complex from per-arrow matrices in each degree and per-vertex differentials."""
    dims1, dims0 = tuple(dims1), tuple(dims0)
    nv = Q.n
    sizes = dims1 + dims0
    offs = [sum(sizes[:b]) for b in range(2 * nv)]
    n = sum(sizes)

    def place(m, blocks):
        for (tb, sb, sub) in blocks:
            for i, row in enumerate(sub):
                for j, x in enumerate(row):
                    if x:
                        m[offs[tb] + i][offs[sb] + j] = x

    ops = []
    for h, (s, t) in enumerate(Q.arrow_indices):
        m = _zeros(n, n)
        place(m, [(t, s, x1[h]), (t + nv, s + nv, x0[h])])
        ops.append(_freeze(m))
    m = _zeros(n, n)
    place(m, [(nv + v, v, d1[v]) for v in range(nv)] + [(v, nv + v, d0[v]) for v in range(nv)])
    ops.append(_freeze(m))
    X = Cx2(Q, q, dims1, dims0, tuple(ops))
    return X.validate() if validate else X


def _zero_maps(Q, dims):
    return [_zeros(dims[t], dims[s]) for s, t in Q.arrow_indices]


def C(M: Rep) -> Cx2:
    """Stalk complex 0 -> M with M in degree 0."""
    Q = M.quiver
    z = (0,) * Q.n
    return complex_from_parts(Q, M.q, z, M.dims, _zero_maps(Q, z), M.maps,
                              [_zeros(M.dims[v], 0) for v in range(Q.n)],
                              [_zeros(0, M.dims[v]) for v in range(Q.n)], validate=False)


def Cs(M: Rep) -> Cx2:
    """Stalk complex with M in degree 1."""
    Q = M.quiver
    z = (0,) * Q.n
    return complex_from_parts(Q, M.q, M.dims, z, M.maps, _zero_maps(Q, z),
                              [_zeros(0, M.dims[v]) for v in range(Q.n)],
                              [_zeros(M.dims[v], 0) for v in range(Q.n)], validate=False)


def _identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def K(A: Rep) -> Cx2:
    """Acyclic complex A --1--> A with d^1 the identity."""
    Q = A.quiver
    return complex_from_parts(Q, A.q, A.dims, A.dims, A.maps, A.maps,
                              [_identity(A.dims[v]) for v in range(Q.n)],
                              [_zeros(A.dims[v], A.dims[v]) for v in range(Q.n)], validate=False)


def Ks(A: Rep) -> Cx2:
    """Acyclic complex with d^0 the identity."""
    Q = A.quiver
    return complex_from_parts(Q, A.q, A.dims, A.dims, A.maps, A.maps,
                              [_zeros(A.dims[v], A.dims[v]) for v in range(Q.n)],
                              [_identity(A.dims[v]) for v in range(Q.n)], validate=False)


def zero_complex(Q: Quiver, q: int) -> Cx2:
    return C(zero_rep(Q, q))


def direct_sum(*xs: Cx2) -> Cx2:
    """Block direct sum; summands are interleaved block by block."""
    if not xs:
        raise RepError("empty direct sum")
    X0 = xs[0]
    Q, q = X0.quiver, X0.q
    nb = 2 * Q.n
    sizes = [sum(x.sizes[b] for x in xs) for b in range(nb)]
    offs = [sum(sizes[:b]) for b in range(nb)]
    n = sum(sizes)
    # position of each summand coordinate in the sum
    maps = []
    within = [0] * nb
    for x in xs:
        pos = []
        for b in range(nb):
            pos.extend(offs[b] + within[b] + i for i in range(x.sizes[b]))
        for b in range(nb):
            within[b] += x.sizes[b]
        maps.append(pos)
    ops = []
    for o in range(len(X0.ops)):
        m = _zeros(n, n)
        for x, pos in zip(xs, maps):
            for i, row in enumerate(x.ops[o]):
                for j, val in enumerate(row):
                    if val:
                        m[pos[i]][pos[j]] = val
        ops.append(_freeze(m))
    return Cx2(Q, q, tuple(sizes[:Q.n]), tuple(sizes[Q.n:]), tuple(ops))


def group_order(dims1, dims0, q: int) -> int:
    """|G| = product of |GL_{n}(F_q)| over all blocks."""
    out = 1
    for k in tuple(dims1) + tuple(dims0):
        out *= gl_order(k, q)
    return out


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------

def _hom_layout(X: Cx2, Y: Cx2):
    """Variable index for each entry (i, k) of a block-diagonal map X -> Y."""
    var = {}
    for b in range(len(X.sizes)):
        for i in range(Y.sizes[b]):
            for k in range(X.sizes[b]):
                var[(Y.offsets[b] + i, X.offsets[b] + k)] = len(var)
    return var


def _commutation_system(F: FiniteField, X: Cx2, Y: Cx2, var):
    """Rows of the linear system phi O^X - O^Y phi = 0 over all operators."""
    nX, nY = X.n, Y.n
    nvars = len(var)
    xb, yb = X.block_of, Y.block_of
    x_in_block = {}
    for k in range(nX):
        x_in_block.setdefault(xb[k], []).append(k)
    y_in_block = {}
    for k in range(nY):
        y_in_block.setdefault(yb[k], []).append(k)
    rows = []
    add, neg = F.add, F.neg
    for OX, OY in zip(X.ops, Y.ops):
        nzX = [[(k, v) for k, v in enumerate(col) if v] for col in zip(*OX)] if nX else []
        for i in range(nY):
            OYi = OY[i]
            nzY = [(k, v) for k, v in enumerate(OYi) if v]
            for j in range(nX):
                row = None
                # sum_k phi[i,k] OX[k,j]
                for k, v in nzX[j]:
                    if xb[k] != yb[i]:
                        continue
                    if row is None:
                        row = [0] * nvars
                    idx = var[(i, k)]
                    row[idx] = add(row[idx], v)
                # - sum_k OY[i,k] phi[k,j]
                for k, v in nzY:
                    if yb[k] != xb[j]:
                        continue
                    if row is None:
                        row = [0] * nvars
                    idx = var[(k, j)]
                    row[idx] = add(row[idx], neg(v))
                if row is not None and any(row):
                    rows.append(row)
    return rows


def _vector_to_map(vec, var, nY, nX):
    m = _zeros(nY, nX)
    for (i, k), idx in var.items():
        if vec[idx]:
            m[i][k] = vec[idx]
    return m


@lru_cache(maxsize=200000)
def hom_basis(X: Cx2, Y: Cx2) -> tuple:
    """Basis of the chain maps X -> Y as (dim Y x dim X) matrices."""
    if X.quiver != Y.quiver or X.q != Y.q:
        raise RepError("Hom between complexes over different quivers or fields")
    F = X.field
    var = _hom_layout(X, Y)
    if not var:
        return ()
    rows = _commutation_system(F, X, Y, var)
    basis = F.nullspace(rows, len(var))
    return tuple(_freeze(_vector_to_map(v, var, Y.n, X.n)) for v in basis)


def hom_dim(X: Cx2, Y: Cx2) -> int:
    return len(hom_basis(X, Y))


def end_basis(X: Cx2) -> tuple:
    return hom_basis(X, X)


def _combine(F: FiniteField, basis, coeffs, nr, nc):
    m = _zeros(nr, nc)
    for c, b in zip(coeffs, basis):
        if c:
            mc = F._mul[c]
            for i in range(nr):
                bi, mi = b[i], m[i]
                for j in range(nc):
                    if bi[j]:
                        mi[j] = F.add(mi[j], mc[bi[j]])
    return m


def iter_space(F: FiniteField, basis, nr, nc) -> Iterator[list]:
    """All F_q-linear combinations of a list of matrices."""
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        yield _combine(F, basis, coeffs, nr, nc)


def aut_count_enumerated(X: Cx2) -> int:
    """|Aut X| by testing every endomorphism for invertibility."""
    F = X.field
    basis = end_basis(X)
    if X.n == 0:
        return 1
    return sum(1 for m in iter_space(F, basis, X.n, X.n) if F.is_invertible(m))


def non_invertible_endomorphisms(X: Cx2) -> int:
    return X.q ** len(end_basis(X)) - aut_count_enumerated(X)


def find_isomorphism(X: Cx2, Y: Cx2, tries: int = 0, rng: random.Random | None = None):
    """An invertible chain map X -> Y found among basis elements and random combinations."""
    if X.sizes != Y.sizes:
        return None
    F = X.field
    basis = hom_basis(X, Y)
    if X.n == 0:
        return ()
    for b in basis:
        if F.is_invertible(b):
            return b
    rng = rng or random.Random(0)
    for _ in range(tries):
        coeffs = [rng.randrange(F.q) for _ in basis]
        m = _combine(F, basis, coeffs, X.n, X.n)
        if F.is_invertible(m):
            return _freeze(m)
    return None


# ---------------------------------------------------------------------------
# base change, subcomplexes and quotients
# ---------------------------------------------------------------------------

def _block_basis_change(F: FiniteField, sizes, parts):
    """Column basis matrix assembled block by block from ordered lists of row vectors.

    ``parts[b]`` is a list of groups of vectors of length sizes[b]; returns the
    big change-of-basis matrix P (columns = new basis) and, for each block and
    group, the new coordinate indices.
    """
    n = sum(sizes)
    P = _zeros(n, n)
    index = []
    col = 0
    off = 0
    for b, s in enumerate(sizes):
        groups = []
        for group in parts[b]:
            idx = []
            for vec in group:
                for i, x in enumerate(vec):
                    P[off + i][col] = x
                idx.append(col)
                col += 1
            groups.append(idx)
        index.append(groups)
        off += s
    if col != n:
        raise ConsistencyError("basis change is not square")
    return P, index


def subquotient(X: Cx2, U: Sequence | None, W: Sequence | None) -> Cx2:
    """The complex U/W for graded subcomplexes W <= U <= X (per-block row bases; None = all/zero)."""
    F = X.field
    sizes = X.sizes
    nb = len(sizes)
    parts = []
    for b, s in enumerate(sizes):
        Wb = [list(v) for v in (W[b] if W is not None else [])]
        Ub = [list(v) for v in (U[b] if U is not None else _identity(s))]
        Wb = F.span_basis(Wb, s) if Wb else []
        # complement of W inside U, then of U inside the whole block
        uc = []
        span = list(Wb)
        for v in Ub:
            if not F.in_span(span, v, s):
                span.append(v)
                uc.append(v)
        rest = [v for v in F.extend_basis(span, s)] if span else _identity(s)
        if len(Wb) + len(uc) + len(rest) != s:
            raise ConsistencyError("subspace bases are inconsistent")
        parts.append([Wb, uc, rest])
    P, index = _block_basis_change(F, sizes, parts)
    Pinv = F.inverse(P) if P else []
    keep = [i for b in range(nb) for i in index[b][1]]
    new_ops = []
    for O in X.ops:
        O2 = F.matmul(Pinv, F.matmul([list(r) for r in O], P)) if P else []
        new_ops.append(_freeze([[O2[i][j] for j in keep] for i in keep]))
    nv = X.quiver.n
    new_sizes = [len(index[b][1]) for b in range(nb)]
    return Cx2(X.quiver, X.q, tuple(new_sizes[:nv]), tuple(new_sizes[nv:]), tuple(new_ops))


def is_subcomplex(X: Cx2, W: Sequence) -> bool:
    """Whether the graded subspace W (per-block row bases) is stable under every operator."""
    F = X.field
    vecs = []
    for b, s in enumerate(X.sizes):
        off = X.offsets[b]
        for v in W[b]:
            big = [0] * X.n
            big[off:off + s] = v
            vecs.append(big)
    if not vecs:
        return True
    r = F.rank(vecs, X.n)
    for O in X.ops:
        imgs = F.matmul(vecs, F.transpose([list(r_) for r_ in O]))
        if F.rank(vecs + [v for v in imgs if any(v)], X.n) != r:
            return False
    return True


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homology:
    h0: Rep
    h1: Rep
    im_d0: tuple[int, ...]
    im_d1: tuple[int, ...]

    def is_acyclic(self) -> bool:
        return not any(self.h0.dims) and not any(self.h1.dims)


def _rep_subquotient(F: FiniteField, rep: Rep, U, W) -> Rep:
    X = C(rep)
    nv = rep.quiver.n
    none = [[] for _ in range(nv)]
    sub = subquotient(X, none + list(U), none + list(W))
    return sub.module()


def homology(X: Cx2) -> Homology:
    """H^0 = Ker d^0 / Im d^1 and H^1 = Ker d^1 / Im d^0 as representations."""
    F = X.field
    nv = X.quiver.n
    ker0, im1, ker1, im0 = [], [], [], []
    im_d0, im_d1 = [], []
    for v in range(nv):
        a1, a0 = X.dims1[v], X.dims0[v]
        d1 = X.d1(v)  # a0 x a1
        d0 = X.d0(v)  # a1 x a0
        ker0.append(F.nullspace(d0, a0) if a1 else _identity(a0))
        ker1.append(F.nullspace(d1, a1) if a0 else _identity(a1))
        img1 = F.span_basis(F.transpose(d1), a0) if a0 and a1 else []
        img0 = F.span_basis(F.transpose(d0), a1) if a0 and a1 else []
        im1.append(img1)
        im0.append(img0)
        im_d1.append(len(img1))
        im_d0.append(len(img0))
    h0 = _rep_subquotient(F, X.degree_rep(0), ker0, im1)
    h1 = _rep_subquotient(F, X.degree_rep(1), ker1, im0)
    return Homology(h0, h1, tuple(im_d0), tuple(im_d1))


# ---------------------------------------------------------------------------
# Krull-Schmidt decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndecomposableData:
    rep: Cx2
    residue_degree: int
    end_dim: int

    @property
    def rad_dim(self) -> int:
        return self.end_dim - self.residue_degree


def _flat(m):
    return [x for r in m for x in r]


def _local_certificate(F: FiniteField, basis, g, p, n):
    """Certify that End is local with radical R and residue field F_q[x]/(p).

    Returns the radical dimension on success, else None.
    """
    e = len(p) - 1
    N = n * n
    powers = [F.identity(n)]
    for _ in range(e):
        powers.append(F.matmul(powers[-1], g))
    pg = F.poly_eval_matrix(p, g)
    rad_vecs = []
    for a in basis:
        found = None
        for coeffs in itertools.product(range(F.q), repeat=e):
            cand = [list(r) for r in a]
            for c, pw in zip(coeffs, powers):
                if c:
                    nc = F.neg(c)
                    for i in range(n):
                        for j in range(n):
                            if pw[i][j]:
                                cand[i][j] = F.add(cand[i][j], F.mul(nc, pw[i][j]))
            if F.is_nilpotent(cand):
                found = cand
                break
        if found is None:
            return None
        rad_vecs.append(_flat(found))
    gp = pg
    for _ in range(e):
        rad_vecs.append(_flat(gp))
        gp = F.matmul(g, gp)
    R = F.span_basis([v for v in rad_vecs if any(v)], N)
    if len(basis) - len(R) != e:
        return None
    unflat = lambda v: [list(v[i * n:(i + 1) * n]) for i in range(n)]
    Rm = [unflat(v) for v in R]
    # two-sided ideal
    for a in basis:
        a = [list(r) for r in a]
        for r in Rm:
            for prod in (F.matmul(a, r), F.matmul(r, a)):
                if any(_flat(prod)) and not F.in_span(R, _flat(prod), N):
                    return None
    # nilpotent ideal: R^k = 0 for some k
    layer = R
    for _ in range(n + 1):
        if not layer:
            return len(R)
        prods = [_flat(F.matmul(unflat(x), r)) for x in layer for r in Rm]
        new = F.span_basis([v for v in prods if any(v)], N)
        if len(new) >= len(layer) and new:
            return None
        layer = new
    return None if layer else len(R)


def _fitting_split(X: Cx2, phi, factor):
    """Split X = Ker psi (+) Im psi with psi = factor(phi)^n; returns the two summands."""
    F = X.field
    n = X.n
    psi = F.matpow(F.poly_eval_matrix(factor, phi), n)
    kers, ims = [], []
    for b, s in enumerate(X.sizes):
        off = X.offsets[b]
        blk = [row[off:off + s] for row in psi[off:off + s]]
        kers.append(F.nullspace(blk, s) if s else [])
        ims.append(F.span_basis(F.transpose(blk), s) if s else [])
        if len(kers[-1]) + len(ims[-1]) != s:
            raise ConsistencyError("Fitting decomposition failed")
    none = [[] for _ in X.sizes]
    A = subquotient(X, kers, none)
    B = subquotient(X, ims, none)
    return A, B


def _seed_for(X: Cx2) -> int:
    h = hashlib.sha256(repr((X.sizes, X.ops)).encode()).digest()
    return int.from_bytes(h[:8], "big")


def decompose_complex(X: Cx2, max_random: int = 400) -> list[IndecomposableData]:
    """Krull-Schmidt decomposition into certified indecomposable summands."""
    if X.n == 0:
        return []
    F = X.field
    n = X.n
    basis = [[list(r) for r in b] for b in end_basis(X)]
    rng = random.Random(_seed_for(X))
    best = None  # (degree of irreducible factor, element, factor)
    checked = 0

    def candidates():
        yield from basis
        for _ in range(max_random):
            coeffs = [rng.randrange(F.q) for _ in basis]
            yield _combine(F, basis, coeffs, n, n)

    checkpoints = {len(basis), len(basis) + 8}
    for phi in candidates():
        checked += 1
        mp = F.minimal_polynomial(phi)
        factors = F.poly_factor_distinct(mp)
        if len(factors) >= 2:
            A, B = _fitting_split(X, phi, factors[0])
            return decompose_complex(A) + decompose_complex(B)
        p = factors[0]
        if best is None or len(p) > len(best[2]):
            best = (len(p) - 1, phi, p)
        if checked in checkpoints or checked % 64 == 0:
            rad = _local_certificate(F, basis, best[1], best[2], n)
            if rad is not None:
                return [IndecomposableData(X, len(basis) - rad, len(basis))]
    raise ConsistencyError("could not certify a Krull-Schmidt decomposition")


# ---------------------------------------------------------------------------
# fingerprints and catalog of isomorphism classes
# ---------------------------------------------------------------------------

def fingerprint(X: Cx2) -> tuple:
    """Cheap isomorphism invariants: dimensions, operator rank profile, dim End."""
    F = X.field
    ranks = []
    ops = [[list(r) for r in O] for O in X.ops]
    for O in ops:
        ranks.append(F.rank(O, X.n) if X.n else 0)
        ranks.append(F.rank(F.matmul(O, O), X.n) if X.n else 0)
    for A, B in itertools.combinations(ops, 2):
        ranks.append(F.rank(F.matmul(A, B), X.n) if X.n else 0)
    return (X.dims1, X.dims0, tuple(ranks), len(end_basis(X)))


def word_rank_signature(X: Cx2, max_len: int | None = None) -> tuple:
    """Ranks of the degree components of all operator words up to a length bound.

    For the quivers in scope this does not depend on q, so it can name
    indecomposables consistently across fields.
    """
    F = X.field
    n = X.n
    if n == 0:
        return ()
    nv = X.quiver.n
    parts = []
    for deg_t in (1, 0):
        for deg_s in (1, 0):
            rows = [i for i in range(n) if (X.block_of[i] < nv) == (deg_t == 1)]
            cols = [j for j in range(n) if (X.block_of[j] < nv) == (deg_s == 1)]
            parts.append((rows, cols))
    L = n if max_len is None else max_len
    ops = [[list(r) for r in O] for O in X.ops]
    out = []
    layer = [((), F.identity(n))]
    for _ in range(L):
        nxt = []
        for word, m in layer:
            for k, O in enumerate(ops):
                w = F.matmul(O, m)
                ranks = tuple(
                    F.rank([[w[i][j] for j in cols] for i in rows], len(cols)) if rows and cols else 0
                    for rows, cols in parts
                )
                out.append((word + (k,), ranks))
                if any(ranks):
                    nxt.append((word + (k,), w))
        layer = nxt
        if len(out) > 4096:
            break
    return tuple(out)


@dataclass
class IndecEntry:
    id: int
    rep: Cx2
    fingerprint: tuple
    residue_degree: int
    end_dim: int
    label: str = ""

    @property
    def is_module(self) -> bool:
        return self.rep.is_module()


@dataclass
class CxClass:
    """Isomorphism class of a complex with cached invariants."""

    id: int
    q: int
    rep: Cx2
    ks: tuple[int, ...]
    aut: int
    end_dim: int
    rad_end_dim: int
    h0: int = -1
    h1: int = -1
    im_d0: tuple[int, ...] = ()
    im_d1: tuple[int, ...] = ()
    label: str = ""
    acyclic: bool = False

    @property
    def gamma(self) -> int:
        return len(self.ks)

    @property
    def dims1(self):
        return self.rep.dims1

    @property
    def dims0(self):
        return self.rep.dims0

    def is_module(self) -> bool:
        return self.rep.is_module()

    def is_acyclic(self) -> bool:
        return self.acyclic

    def __hash__(self):
        return hash((self.q, self.id))

    def __eq__(self, other):
        return isinstance(other, CxClass) and (self.q, self.id, self.rep.quiver) == (other.q, other.id, other.rep.quiver)


class Catalog:
    """Append-only table of isomorphism classes for one quiver and field."""

    def __init__(self, quiver: Quiver, q: int):
        self.quiver = quiver
        self.q = q
        self.indecs: list[IndecEntry] = []
        self._indec_by_fp: dict[tuple, list[int]] = {}
        self.classes: list[CxClass] = []
        self._class_by_key: dict[tuple, int] = {}
        self._cache: dict[Cx2, int] = {}
        self._labels: dict[str, int] = {}
        self._lock = threading.RLock()

    # indecomposables ------------------------------------------------------
    def _indec_id(self, data: IndecomposableData) -> int:
        X = data.rep
        fp = fingerprint(X) + (data.residue_degree,)
        for iid in self._indec_by_fp.get(fp, ()):
            if find_isomorphism(X, self.indecs[iid].rep) is not None:
                return iid
        iid = len(self.indecs)
        entry = IndecEntry(iid, X, fp, data.residue_degree, data.end_dim)
        self.indecs.append(entry)
        self._indec_by_fp.setdefault(fp, []).append(iid)
        entry.label = self._make_label(entry)
        return iid

    def _make_label(self, entry: IndecEntry) -> str:
        X = entry.rep
        sig = None
        if X.is_module():
            base = self._module_base_label(X)
            if not base:
                base = "M" + "".join(map(str, X.dims0))
                sig = word_rank_signature(X)
        elif not any(X.dims0):
            shifted = C(X.degree_rep(1))
            base = self.classify(shifted).label + "*"
        else:
            hom = homology(X)
            nv = self.quiver.n
            d0_zero = all(_is_zero(X.d0(v)) for v in range(nv))
            d1_zero = all(_is_zero(X.d1(v)) for v in range(nv))
            if hom.is_acyclic() and d0_zero:
                base = "K(" + self.classify(C(X.degree_rep(1))).label + ")"
            elif hom.is_acyclic() and d1_zero:
                base = "Ks(" + self.classify(C(X.degree_rep(0))).label + ")"
            else:
                base = "X" + "".join(map(str, X.dims1)) + "." + "".join(map(str, X.dims0))
                sig = word_rank_signature(X)
        label = base
        if sig is not None:
            digest = hashlib.sha256(repr(sig).encode()).hexdigest()[:6]
            label = f"{base}_{digest}"
        if label in self._labels:
            label = f"{label}~{entry.id}"
        self._labels[label] = entry.id
        return label

    def _module_base_label(self, X: Cx2) -> str:
        Q = self.quiver
        d = X.dims0
        if sum(d) == 1:
            return "S" + Q.vertices[d.index(1)]
        loops = [s for s, t in Q.arrow_indices if s == t]
        if loops and d[loops[0]] == sum(d):
            if find_isomorphism(X, C(jordan_rep(Q, self.q, sum(d)))) is not None:
                return f"J{sum(d)}"
        if Q.is_acyclic():
            for v in range(Q.n):
                P = projective_rep(Q, self.q, v)
                if P.dims == d and find_isomorphism(X, C(P)) is not None:
                    return "P" + Q.vertices[v]
        return ""

    # classes ---------------------------------------------------------------
    def classify(self, X: Cx2) -> CxClass:
        """Catalog class of X, inserting new classes as needed."""
        if X.quiver != self.quiver or X.q != self.q:
            raise RepError("complex does not belong to this catalog")
        cid = self._cache.get(X)
        if cid is not None:
            return self.classes[cid]
        with self._lock:
            cid = self._cache.get(X)
            if cid is not None:
                return self.classes[cid]
            parts = decompose_complex(X)
            ids = tuple(sorted(self._indec_id(p) for p in parts))
            cid = self._class_by_key.get(ids)
            if cid is None:
                cid = self._new_class(X, ids, parts)
            self._cache[X] = cid
            return self.classes[cid]

    def _new_class(self, X: Cx2, ids: tuple[int, ...], parts) -> int:
        q = self.q
        end_dim = len(end_basis(X))
        mult = Counter(ids)
        semisimple = sum(m * m * self.indecs[i].residue_degree for i, m in mult.items())
        rad = end_dim - semisimple
        if rad < 0:
            raise ConsistencyError("negative radical dimension")
        aut = q ** rad
        for i, m in mult.items():
            aut *= gl_order(m, q ** self.indecs[i].residue_degree)
        cid = len(self.classes)
        cls = CxClass(cid, q, X, ids, aut, end_dim, rad)
        self.classes.append(cls)
        self._class_by_key[ids] = cid
        hom = homology(X)
        cls.im_d0, cls.im_d1 = hom.im_d0, hom.im_d1
        if X.is_module():
            cls.h0 = cid
            cls.h1 = self.zero_class().id if X.n else cid
        else:
            cls.h0 = self.classify(C(hom.h0)).id
            cls.h1 = self.classify(C(hom.h1)).id
        cls.acyclic = not any(hom.h0.dims) and not any(hom.h1.dims)
        cls.label = self._class_label(cls)
        return cid

    def _class_label(self, cls: CxClass) -> str:
        if not cls.ks:
            return "0"
        cnt = Counter(cls.ks)
        order = sorted(cnt, key=lambda i: (self.indecs[i].rep.n, self.indecs[i].label))
        out = []
        for i in order:
            lab = self.indecs[i].label
            out.append(lab if cnt[i] == 1 else f"{lab}^{cnt[i]}")
        return "+".join(out)

    def zero_class(self) -> CxClass:
        return self.classify(zero_complex(self.quiver, self.q))

    def module_class(self, M: Rep) -> CxClass:
        return self.classify(C(M))

    def indec_by_label(self, label: str) -> IndecEntry | None:
        iid = self._labels.get(label)
        return None if iid is None else self.indecs[iid]

    def class_from_indecs(self, ids: Iterable[int]) -> CxClass:
        ids = tuple(sorted(ids))
        cid = self._class_by_key.get(ids)
        if cid is not None:
            return self.classes[cid]
        reps = [self.indecs[i].rep for i in ids]
        X = direct_sum(*reps) if reps else zero_complex(self.quiver, self.q)
        return self.classify(X)

    def export(self) -> list[dict]:
        """Structured table of all classes."""
        rows = []
        for c in self.classes:
            rows.append({
                "id": c.id,
                "label": c.label,
                "dims1": list(c.dims1),
                "dims0": list(c.dims0),
                "orbit_size": group_order(c.dims1, c.dims0, self.q) // c.aut,
                "aut": c.aut,
                "h0": c.h0,
                "h1": c.h1,
                "krull_schmidt": [self.indecs[i].label for i in c.ks],
            })
        return rows


_catalogs: dict[tuple, Catalog] = {}
_catalogs_lock = threading.Lock()


def get_catalog(Q: Quiver, q: int) -> Catalog:
    key = (Q, q)
    cat = _catalogs.get(key)
    if cat is None:
        with _catalogs_lock:
            cat = _catalogs.get(key)
            if cat is None:
                check_q(q)
                cat = Catalog(Q, q)
                _catalogs[key] = cat
    return cat


def classify(X: Cx2) -> CxClass:
    return get_catalog(X.quiver, X.q).classify(X)


def is_isomorphic(X: Cx2, Y: Cx2) -> bool:
    if X.sizes != Y.sizes:
        return False
    return classify(X).id == classify(Y).id


def decompose(X: Cx2) -> list[IndecEntry]:
    cat = get_catalog(X.quiver, X.q)
    return [cat.indecs[i] for i in cat.classify(X).ks]


def rad_end_dim(X: Cx2) -> int:
    return classify(X).rad_end_dim


def aut_count(X: Cx2) -> int:
    """|Aut X| from the Krull-Schmidt data: q^{dim rad} * prod |GL_{m_i}(F_{q^{d_i}})|."""
    return classify(X).aut


# ---------------------------------------------------------------------------
# enumeration of complexes
# ---------------------------------------------------------------------------

def _all_matrices(F: FiniteField, r: int, c: int):
    for entries in itertools.product(range(F.q), repeat=r * c):
        yield [list(entries[i * c:(i + 1) * c]) for i in range(r)]


def enumerate_reps(Q: Quiver, dims: Sequence[int], q: int) -> Iterator[Rep]:
    """All nilpotent representations with the given dimension vector."""
    check_q(q)
    dims = tuple(dims)
    shapes = [(dims[t], dims[s]) for s, t in Q.arrow_indices]
    total = sum(r * c for r, c in shapes)
    for entries in itertools.product(range(q), repeat=total):
        maps, pos = [], 0
        for r, c in shapes:
            maps.append([list(entries[pos + i * c: pos + (i + 1) * c]) for i in range(r)])
            pos += r * c
        M = Rep(Q, q, dims, tuple(maps))
        if Q.is_acyclic() or C(M).is_nilpotent():
            yield M


@dataclass(frozen=True)
class EnumerationResult:
    classes: tuple[tuple[CxClass, int], ...]  # (class, orbit size)
    points: int

    def orbit_sum(self) -> int:
        return sum(size for _, size in self.classes)


def _module_hom_d(F, Xa: Rep, Xb: Rep):
    """Basis of representation morphisms Xa -> Xb as per-vertex matrix lists."""
    basis = hom_basis(C(Xa), C(Xb))
    Q = Xa.quiver
    nv = Q.n
    out = []
    A, B = C(Xa), C(Xb)
    for m in basis:
        per_v = []
        for v in range(nv):
            ro, co = B.offsets[nv + v], A.offsets[nv + v]
            per_v.append([list(m[ro + i][co:co + Xa.dims[v]]) for i in range(Xb.dims[v])])
        out.append(per_v)
    return out


def _combine_vertex_maps(F, basis, coeffs, shape_r, shape_c):
    nv = len(shape_r)
    out = [_zeros(shape_r[v], shape_c[v]) for v in range(nv)]
    for c, b in zip(coeffs, basis):
        if not c:
            continue
        for v in range(nv):
            for i in range(shape_r[v]):
                for j in range(shape_c[v]):
                    if b[v][i][j]:
                        out[v][i][j] = F.add(out[v][i][j], F.mul(c, b[v][i][j]))
    return out


def enumerate_complexes(Q: Quiver, dims1: Sequence[int], dims0: Sequence[int], q: int,
                        max_dim: int | None = None) -> EnumerationResult:
    """All isomorphism classes of complexes with the given dimension pair, with orbit sizes.

    Every point (x^1, x^0, d^1, d^0) of the variety is enumerated and classified.
    """
    dims1, dims0 = tuple(dims1), tuple(dims0)
    cap = CAPS.max_dim if max_dim is None else max_dim
    if sum(dims1) + sum(dims0) > cap:
        raise SizeError(f"total dimension {sum(dims1) + sum(dims0)} exceeds the cap {cap}")
    F = check_q(q)
    cat = get_catalog(Q, q)
    counts: Counter = Counter()
    points = 0
    reps1 = list(enumerate_reps(Q, dims1, q))
    reps0 = list(enumerate_reps(Q, dims0, q))
    nv = Q.n
    for X1 in reps1:
        for X0 in reps0:
            d1_basis = _module_hom_d(F, X1, X0)
            d0_basis = _module_hom_d(F, X0, X1)
            for c1 in itertools.product(range(q), repeat=len(d1_basis)):
                d1 = _combine_vertex_maps(F, d1_basis, c1, dims0, dims1)
                # linear constraints on d0: d1 d0 = 0 and d0 d1 = 0
                rows = []
                if d0_basis:
                    cols = []
                    for b in d0_basis:
                        col = []
                        for v in range(nv):
                            if dims1[v] and dims0[v]:
                                col.extend(_flat(F.matmul(d1[v], b[v])))
                                col.extend(_flat(F.matmul(b[v], d1[v])))
                        cols.append(col)
                    rows = [list(r) for r in zip(*cols)] if cols and cols[0] else []
                sol = F.nullspace([r for r in rows if any(r)], len(d0_basis)) if d0_basis else []
                sub = [_combine_vertex_maps(F, d0_basis, s, dims1, dims0) for s in sol]
                for c0 in itertools.product(range(q), repeat=len(sub)):
                    d0 = _combine_vertex_maps(F, sub, c0, dims1, dims0) if sub else [
                        _zeros(dims1[v], dims0[v]) for v in range(nv)]
                    X = complex_from_parts(Q, q, dims1, dims0, X1.maps, X0.maps, d1, d0, validate=False)
                    counts[cat.classify(X).id] += 1
                    points += 1
    classes = tuple(
        (cat.classes[cid], counts[cid]) for cid in sorted(counts)
    )
    G = group_order(dims1, dims0, q)
    for cls, size in classes:
        if size * cls.aut != G:
            raise ConsistencyError(
                f"orbit-stabilizer failed for class {cls.id}: {size} * {cls.aut} != {G}")
    return EnumerationResult(classes, points)


def enumerate_module_classes(Q: Quiver, dims: Sequence[int], q: int, max_dim: int | None = None):
    return enumerate_complexes(Q, (0,) * Q.n, dims, q, max_dim)


# ---------------------------------------------------------------------------
# subspaces and Hall numbers
# ---------------------------------------------------------------------------

def subspaces(q: int, n: int, r: int) -> Iterator[list[list[int]]]:
    """Every r-dimensional subspace of F_q^n once, as its reduced row-echelon basis."""
    if r == 0:
        yield []
        return
    for pivots in itertools.combinations(range(n), r):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(r)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield rows


def count_subspaces(q: int, n: int, r: int) -> int:
    return sum(1 for _ in subspaces(q, n, r))


def hall_number(Z: Cx2, X: Cx2 | CxClass, Y: Cx2 | CxClass) -> int:
    """#{subcomplexes W of Z : W ~ Y and Z/W ~ X}, by enumerating graded subspaces."""
    Xr = X.rep if isinstance(X, CxClass) else X
    Yr = Y.rep if isinstance(Y, CxClass) else Y
    if any(z != x + y for z, x, y in zip(Z.sizes, Xr.sizes, Yr.sizes)):
        return 0
    cat = get_catalog(Z.quiver, Z.q)
    xid, yid = cat.classify(Xr).id, cat.classify(Yr).id
    count = 0
    block_choices = [list(subspaces(Z.q, s, r)) for s, r in zip(Z.sizes, Yr.sizes)]
    for W in itertools.product(*block_choices):
        if not is_subcomplex(Z, W):
            continue
        if cat.classify(subquotient(Z, W, None)).id != yid:
            continue
        if cat.classify(subquotient(Z, None, W)).id != xid:
            continue
        count += 1
    return count


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionData:
    """Ext^1(X, Y) in the category of complexes: classes grouped by middle term."""

    ext_dim: int
    hom_dim: int
    middle_counts: tuple[tuple[int, int], ...]  # (class id, number of Ext classes)


def _ext_layout(X: Cx2, Y: Cx2):
    """Unknown entries c_O[i, j] (i in Y, j in X) allowed by each operator's block pattern."""
    allowed = _allowed_pairs(X.quiver)
    var = {}
    for o, pairs in enumerate(allowed):
        for tb, sb in sorted(pairs):
            for i in range(Y.sizes[tb]):
                for j in range(X.sizes[sb]):
                    var[(o, Y.offsets[tb] + i, X.offsets[sb] + j)] = len(var)
    return var


def _ext_system(F: FiniteField, X: Cx2, Y: Cx2, var):
    """Cocycle equations for Z = [[O^Y, c_O], [0, O^X]] to be a complex of representations."""
    nX, nY = X.n, Y.n
    nvars = len(var)
    D = len(X.ops) - 1
    add, neg = F.add, F.neg
    rows = []

    def acc(row, key, val):
        idx = var.get(key)
        if idx is None or not val:
            return
        row[idx] = add(row[idx], val)

    # D^2 = 0:  D_Y c_D + c_D D_X = 0
    # A D = D A: A_Y c_D + c_A D_X - D_Y c_A - c_D A_X = 0
    for i_out in range(nY):
        for j_out in range(nX):
            row = [0] * nvars
            for k in range(nY):
                v = Y.ops[D][i_out][k]
                if v:
                    acc(row, (D, k, j_out), v)
            for k in range(nX):
                v = X.ops[D][k][j_out]
                if v:
                    acc(row, (D, i_out, k), v)
            if any(row):
                rows.append(row)
    for a in range(D):
        AY, AX, DY, DX = Y.ops[a], X.ops[a], Y.ops[D], X.ops[D]
        for i_out in range(nY):
            for j_out in range(nX):
                row = [0] * nvars
                for k in range(nY):
                    if AY[i_out][k]:
                        acc(row, (D, k, j_out), AY[i_out][k])
                    if DY[i_out][k]:
                        acc(row, (a, k, j_out), neg(DY[i_out][k]))
                for k in range(nX):
                    if DX[k][j_out]:
                        acc(row, (a, i_out, k), DX[k][j_out])
                    if AX[k][j_out]:
                        acc(row, (D, i_out, k), neg(AX[k][j_out]))
                if any(row):
                    rows.append(row)
    return rows


def _coboundaries(F: FiniteField, X: Cx2, Y: Cx2, var):
    """Images c_O = O^Y f - f O^X of the block-diagonal maps f: X -> Y."""
    fvar = _hom_layout(X, Y)
    vecs = []
    for (i0, k0) in fvar:
        vec = [0] * len(var)
        for o, (OX, OY) in enumerate(zip(X.ops, Y.ops)):
            # (O^Y f)[i, j] with f = E_{i0,k0}: nonzero at j = k0, i with OY[i][i0]
            for i in range(Y.n):
                v = OY[i][i0]
                if v:
                    idx = var.get((o, i, k0))
                    if idx is None:
                        raise ConsistencyError("coboundary outside the cocycle pattern")
                    vec[idx] = F.add(vec[idx], v)
            # -(f O^X)[i, j]: nonzero at i = i0, j with OX[k0][j]
            for j in range(X.n):
                v = OX[k0][j]
                if v:
                    idx = var.get((o, i0, j))
                    if idx is None:
                        raise ConsistencyError("coboundary outside the cocycle pattern")
                    vec[idx] = F.add(vec[idx], F.neg(v))
        vecs.append(vec)
    return vecs


def _middle_term(X: Cx2, Y: Cx2, var, vec) -> Cx2:
    """Complex with Y as subcomplex and X as quotient, glued by the cocycle vec."""
    nv2 = len(X.sizes)
    sizes = [X.sizes[b] + Y.sizes[b] for b in range(nv2)]
    offs = [sum(sizes[:b]) for b in range(nv2)]
    ypos = [offs[Y.block_of[i]] + i - Y.offsets[Y.block_of[i]] for i in range(Y.n)]
    xpos = [offs[X.block_of[j]] + Y.sizes[X.block_of[j]] + j - X.offsets[X.block_of[j]] for j in range(X.n)]
    n = sum(sizes)
    ops = []
    for o in range(len(X.ops)):
        m = _zeros(n, n)
        for i in range(Y.n):
            for k in range(Y.n):
                if Y.ops[o][i][k]:
                    m[ypos[i]][ypos[k]] = Y.ops[o][i][k]
        for j in range(X.n):
            for k in range(X.n):
                if X.ops[o][j][k]:
                    m[xpos[j]][xpos[k]] = X.ops[o][j][k]
        ops.append(m)
    for (o, i, j), idx in var.items():
        if vec[idx]:
            ops[o][ypos[i]][xpos[j]] = vec[idx]
    nv = X.quiver.n
    return Cx2(X.quiver, X.q, tuple(sizes[:nv]), tuple(sizes[nv:]), tuple(_freeze(m) for m in ops))


def ext_space(X: Cx2, Y: Cx2):
    """(cocycle variable layout, basis of a complement of coboundaries in cocycles)."""
    F = X.field
    var = _ext_layout(X, Y)
    if not var:
        return var, []
    rows = _ext_system(F, X, Y, var)
    cocycles = F.nullspace(rows, len(var))
    cob = [v for v in _coboundaries(F, X, Y, var) if any(v)]
    B = F.span_basis(cob, len(var))
    comp = []
    span = list(B)
    for z in cocycles:
        if not F.in_span(span, z, len(var)):
            span.append(z)
            comp.append(z)
    return var, comp


def ext_dim(X: Cx2, Y: Cx2) -> int:
    return len(ext_space(X, Y)[1])


@lru_cache(maxsize=100000)
def extension_data(X: Cx2, Y: Cx2) -> ExtensionData:
    """Count Ext^1(X, Y) classes by the isomorphism class of their middle term.

    Classes on one line through the origin share a middle term, so one
    representative per line is classified.
    """
    F = X.field
    cat = get_catalog(X.quiver, X.q)
    var, comp = ext_space(X, Y)
    counts: Counter = Counter()
    split = direct_sum(Y, X)
    counts[cat.classify(split).id] += 1
    k = len(comp)
    for lead in range(k):
        for tail in itertools.product(range(F.q), repeat=k - lead - 1):
            coeffs = [0] * lead + [1] + list(tail)
            vec = [0] * len(var)
            for c, z in zip(coeffs, comp):
                if c:
                    for idx, x in enumerate(z):
                        if x:
                            vec[idx] = F.add(vec[idx], F.mul(c, x))
            Z = _middle_term(X, Y, var, vec)
            counts[cat.classify(Z).id] += F.q - 1
    return ExtensionData(k, hom_dim(X, Y), tuple(sorted(counts.items())))


def hall_structure(X: Cx2, Y: Cx2) -> dict[int, int]:
    """Hall numbers F^Z_{XY} for all middle terms Z, via Riedtmann's formula.

    F^Z_{XY} = |Ext^1(X,Y)_Z| |Aut Z| / (|Aut X| |Aut Y| |Hom(X,Y)|).
    """
    cat = get_catalog(X.quiver, X.q)
    ax, ay = cat.classify(X).aut, cat.classify(Y).aut
    data = extension_data(X, Y)
    out = {}
    denom = ax * ay * X.q ** data.hom_dim
    for cid, cnt in data.middle_counts:
        num = cnt * cat.classes[cid].aut
        if num % denom:
            raise ConsistencyError(f"non-integral Hall number {Fraction(num, denom)}")
        out[cid] = num // denom
    return out


# ---------------------------------------------------------------------------
# counting oracles for point-count polynomials
# ---------------------------------------------------------------------------

def count_matrices_of_rank(q: int, k: int, l: int, r: int) -> int:
    """Number of k x l matrices over F_q of rank r, by enumeration."""
    F = finite_field(q)
    return sum(1 for m in _all_matrices(F, k, l) if (F.rank(m, l) if k and l else 0) == r)


def count_gl(q: int, r: int, limit: int = 20000) -> int:
    """|GL_r(F_q)| by enumeration.

    Small cases test every matrix.  Larger ones count, row by row, the vectors of
    F_q^r outside the span of the rows chosen so far (the count does not depend
    on which independent rows were chosen, so one chain of rows suffices).
    """
    F = finite_field(q)
    if q ** (r * r) <= limit:
        return sum(1 for m in _all_matrices(F, r, r) if (F.rank(m, r) if r else 0) == r)
    total = 1
    chosen: list[list[int]] = []
    for _ in range(r):
        outside = [list(v) for v in itertools.product(range(q), repeat=r)
                   if not F.in_span(chosen, list(v), r)]
        total *= len(outside)
        chosen.append(outside[0])
    return total


# ---------------------------------------------------------------------------
# module classes by extension closure
# ---------------------------------------------------------------------------

_module_class_cache: dict[tuple, tuple[int, ...]] = {}


def module_classes(Q: Quiver, dims: Sequence[int], q: int) -> list[CxClass]:
    """All isomorphism classes of nilpotent modules with dimension vector ``dims``.

    Every nonzero nilpotent module has a simple submodule S_v, so each class
    of dimension d is a middle term of an extension of some class of
    dimension d - e_v by S_v.  Much cheaper than enumerating points.
    """
    dims = tuple(dims)
    if any(x < 0 for x in dims):
        return []
    cat = get_catalog(Q, q)
    key = (Q, q, dims)
    if key in _module_class_cache:
        return [cat.classes[c] for c in _module_class_cache[key]]
    if not any(dims):
        out = [cat.zero_class()]
    elif sum(dims) == 1:
        out = [cat.classify(C(semisimple_rep(Q, q, dims)))]
    else:
        found: dict[int, CxClass] = {}
        for v in range(Q.n):
            if not dims[v]:
                continue
            smaller = tuple(x - (1 if i == v else 0) for i, x in enumerate(dims))
            S = C(simple_rep(Q, q, v))
            for M in module_classes(Q, smaller, q):
                for cid, _ in extension_data(M.rep, S).middle_counts:
                    found.setdefault(cid, cat.classes[cid])
        out = [found[c] for c in sorted(found)]
    _module_class_cache[key] = tuple(c.id for c in out)
    return out


def dimension_vectors_up_to(Q: Quiver, total: int) -> Iterator[tuple[int, ...]]:
    """All dimension vectors with total dimension <= total, by increasing size."""
    for s in range(total + 1):
        for combo in itertools.product(range(s + 1), repeat=Q.n):
            if sum(combo) == s:
                yield combo
