"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import itertools
import random
import time
from fractions import Fraction

import numpy as np

from sdhall import fqrep, gf
from sdhall import hallengine as he
from sdhall import ncpresent as nc
from sdhall.exactscalar import eval_at_q, poincare_gl, poincare_grassmannian
from sdhall.quivercartan import (
    Quiver,
    a2_quiver,
    cartan_matrix,
    discrete_quiver,
    euler_form,
    jordan_quiver,
    kronecker_quiver,
    loop_quiver,
    phi_twist_exponent,
    point_quiver,
    projective_data,
    sym_euler_form,
)


# -- 1 ---------------------------------------------------------------------

def _random_quiver(rng: random.Random) -> Quiver:
    n = rng.randint(1, 5)
    verts = [str(i + 1) for i in range(n)]
    arrows = []
    for v in verts:
        arrows += [(v, v)] * rng.randint(0, 3)
    for _ in range(rng.randint(0, 4) if n > 1 else 0):
        s, t = rng.sample(verts, 2)
        arrows.append((s, t))
    return Quiver(tuple(verts), tuple(arrows))


def test_criterion_01_cartan_consistency(criterion):
    rng = random.Random(2024)
    start = time.perf_counter()
    ok = True
    for _ in range(30):
        Q = _random_quiver(rng)
        C = cartan_matrix(Q)
        for i, vi in enumerate(Q.vertices):
            for j, vj in enumerate(Q.vertices):
                loops = sum(1 for a in Q.arrows if a == (vi, vi))
                between = sum(1 for a in Q.arrows if a in ((vi, vj), (vj, vi)))
                expected = 2 - 2 * loops if i == j else -between
                ok &= C.a(i, j) == expected == sym_euler_form(Q, Q.simple(i), Q.simple(j))
    ok &= time.perf_counter() - start < 1
    assert criterion(1, "Cartan matrix equals symmetric Euler form on 30 random quivers", ok)


# -- 2 ---------------------------------------------------------------------

def _tables(q):
    F = gf.finite_field(q)
    add = np.array(F.add_table).reshape(q, q)
    mul = np.array(F.mul_table).reshape(q, q)
    neg = np.array(F.neg_table)
    return add, mul, neg


def _brute_gl(q: int, r: int) -> int:
    """Count invertible r x r matrices by evaluating every determinant."""
    add, mul, neg = _tables(q)
    entries = np.array(list(itertools.product(range(q), repeat=r * r)), dtype=np.int64)
    det = np.zeros(len(entries), dtype=np.int64)
    for perm in itertools.permutations(range(r)):
        sign = sum(1 for a in range(r) for b in range(a + 1, r) if perm[a] > perm[b]) % 2
        term = np.ones(len(entries), dtype=np.int64)
        for row, col in enumerate(perm):
            term = mul[term, entries[:, row * r + col]]
        if sign:
            term = neg[term]
        det = add[det, term]
    return int(np.count_nonzero(det))


def _brute_grassmannian(q: int, r: int, k: int) -> int:
    """Count r-dimensional subspaces of F_q^k as distinct sets of vectors."""
    add, mul, _ = _tables(q)
    vecs = np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64)
    weights = q ** np.arange(k)[::-1]
    code = lambda arr: (arr * weights).sum(axis=-1)
    level = {frozenset([0])}
    for _ in range(r):
        nxt = set()
        for U in level:
            Uv = vecs[sorted(U)]
            seen = set(U)
            for c in range(len(vecs)):
                if c in seen:
                    continue
                v = vecs[c]
                span = np.concatenate([add[Uv, mul[s, v]] for s in range(q)])
                W = frozenset(code(span).tolist())
                seen |= W
                nxt.add(W)
        level = nxt
    return len(level)


def test_criterion_02_point_count_dictionary(criterion):
    start = time.perf_counter()
    ok = True
    for q in (2, 3, 4, 5):
        for r in range(0, 4):
            ok &= eval_at_q(poincare_gl(r), q) == _brute_gl(q, r) if r else eval_at_q(poincare_gl(0), q) == 1
        for k in range(0, 5):
            for r in range(0, k + 1):
                ok &= eval_at_q(poincare_grassmannian(r, k), q) == _brute_grassmannian(q, r, k)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    assert criterion(2, f"GL and Grassmannian point counts match brute force ({elapsed:.1f}s)", ok)


# -- 3 ---------------------------------------------------------------------

def _ringel_hom_ext(M: fqrep.Rep, N: fqrep.Rep) -> tuple[int, int]:
    """Hom and Ext^1 from the standard two-term resolution map."""
    Q, F = M.quiver, gf.finite_field(M.q)
    m, n = M.dims, N.dims
    cols = [(v, a, b) for v in range(Q.n) for a in range(n[v]) for b in range(m[v])]
    rows = [(h, a, b) for h, (s, t) in enumerate(Q.arrow_indices) for a in range(n[t]) for b in range(m[s])]
    mat = [[0] * len(cols) for _ in rows]
    col_index = {c: k for k, c in enumerate(cols)}
    for r, (h, a, b) in enumerate(rows):
        s, t = Q.arrow_indices[h]
        # (N_h phi_s - phi_t M_h)[a][b]
        for c in range(n[s]):
            x = N.maps[h][a][c]
            if x:
                k = col_index[(s, c, b)]
                mat[r][k] = F.add(mat[r][k], x)
        for c in range(m[t]):
            x = M.maps[h][c][b]
            if x:
                k = col_index[(t, a, c)]
                mat[r][k] = F.sub(mat[r][k], x)
    rank = F.rank(mat, len(cols)) if rows and cols else 0
    return len(cols) - rank, len(rows) - rank


def test_criterion_03_euler_form_is_hom_minus_ext(criterion):
    start = time.perf_counter()
    ok, pairs = True, 0
    for Q in (jordan_quiver(), a2_quiver(), kronecker_quiver()):
        for q in (2, 3):
            classes = {}
            for d in fqrep.dimension_vectors_up_to(Q, 4):
                classes[d] = [c.rep.module() for c in fqrep.module_classes(Q, d, q)]
            for dm, Ms in classes.items():
                for dn, Ns in classes.items():
                    if sum(dm) + sum(dn) > 4:
                        continue
                    for M in Ms:
                        for N in Ns:
                            hom = fqrep.hom_dim(fqrep.C(M), fqrep.C(N))
                            ext = fqrep.ext_dim(fqrep.C(M), fqrep.C(N))
                            ok &= (hom, ext) == _ringel_hom_ext(M, N)
                            ok &= hom - ext == euler_form(Q, M.dims, N.dims)
                            pairs += 1
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60 and pairs > 100
    assert criterion(3, f"Euler form equals dim Hom - dim Ext^1 on {pairs} module pairs ({elapsed:.1f}s)", ok)


# -- 4 ---------------------------------------------------------------------

def test_criterion_04_b_calculus(criterion):
    start = time.perf_counter()
    ok, n = True, 0
    for Q in (jordan_quiver(), a2_quiver()):
        for q in (2, 3, 4):
            ctx = he.context(Q, q)
            S = fqrep.simple_rep(Q, q, 0)
            third = fqrep.jordan_rep(Q, q, 2) if Q.n == 1 else fqrep.projective_rep(Q, q, 0)
            mods = [S, fqrep.simple_rep(Q, q, 0, 2), third]
            rep = he.verify_b_relations(Q, q, mods)
            ok &= rep.ok and rep.summary[he.SKIP] == 0
            n += len(rep.cases)
            # frozen: b_S realized by K_S has |Aut K_S| = q - 1 and reduces to b_S
            ok &= ctx.raw_class(fqrep.K(S)).aut == q - 1
            ok &= ctx.reduce(ctx.b_of_module(S)) == ctx.b_element(Q.simple(0))
            # twist of b_A against C(B) is (-t)^{(A,B)}, checked against the raw realization
            for A in mods:
                for B in mods:
                    lhs = ctx.reduce(ctx.hall_product(ctx.b_of_module(A), ctx.delta(fqrep.C(B), False)))
                    rhs = ctx.reduce(ctx.hall_product(ctx.delta(fqrep.C(B), False), ctx.b_of_module(A)))
                    ok &= lhs == rhs.scale(ctx.vpow(sym_euler_form(Q, A.dims, B.dims)))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    assert criterion(4, f"b-calculus identities hold in {n} cases ({elapsed:.1f}s)", ok)


# -- 5 ---------------------------------------------------------------------

def test_criterion_05_stalk_products(criterion):
    start = time.perf_counter()
    ok, n = True, 0
    fqrep.CAPS.max_q = 9
    for Q in (jordan_quiver(), loop_quiver(2)):
        for q in (4, 9):
            for k in range(0, 4):
                for l in range(0, 4 - k):
                    rep = he.verify_eikfil(Q, 0, k, l, q)
                    ok &= rep.ok and rep.summary[he.SKIP] == 0
                    n += len(rep.cases)
    # frozen value: Jordan, k = l = 1, q = 4
    Q = jordan_quiver()
    ctx = he.context(Q, 4)
    S = fqrep.simple_rep(Q, 4, 0)
    both = he.HallBasisVector("S1", "S1", (0,))
    expected = ctx.element({both: 1, he.HallBasisVector("0", "0", (-1,)): Fraction(1, 3)})
    ok &= ctx.star(ctx.delta_module(S), ctx.delta_comodule(S)) == expected
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    assert criterion(5, f"closed form for C(S^k) * Cs(S^l) holds in {n} cases ({elapsed:.1f}s)", ok)


# -- 6 ---------------------------------------------------------------------

def test_criterion_06_commutation(criterion):
    start = time.perf_counter()
    Q = jordan_quiver()
    ok, notes = True, []
    for k in (1, 2):
        for l in (1, 2):
            rep = he.verify_commutation(Q, 0, k, l, 4)
            notes += rep.notes
            printed = [c for c in rep.cases if c.id.endswith("printed")]
            transcribed = [c for c in rep.cases if c.id.endswith("transcribed")]
            if printed and printed[0].status == he.PASS:
                continue
            ok &= bool(transcribed) and transcribed[0].status == he.PASS
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    title = "commutation identity holds for k, l <= 2 on Jordan at q = 4"
    if notes:
        title += "; " + "; ".join(notes)
    assert criterion(6, title, ok)


# -- 7 ---------------------------------------------------------------------

def test_criterion_07_serre(criterion):
    start = time.perf_counter()
    Q = a2_quiver()
    verdicts = set()
    ok = True
    for i, j in ((0, 1), (1, 0)):
        for q in (2, 3, 4):
            v = he.serre_variant_verdict(Q, i, j, 1, [q])
            ok &= sum(v.values()) == 1
            verdicts.add(tuple(sorted(k for k, good in v.items() if good)))
    ok &= len(verdicts) == 1
    D = discrete_quiver(2)
    rep = he.verify_quantum_relations(D, 3, max_l=1, include_serre=False)
    commuting = [c for c in rep.cases if c.id.split()[1] == "commute"]
    ok &= bool(commuting) and all(c.status == he.PASS for c in commuting)
    ok &= time.perf_counter() - start < 60
    held = "/".join(v[0] for v in verdicts if v) or "none"
    assert criterion(7, f"exactly one Serre sign variant vanishes on A2 at every q ({held})", ok)


# -- 8 ---------------------------------------------------------------------

def test_criterion_08_divided_powers(criterion):
    start = time.perf_counter()
    fqrep.CAPS.max_q = 49
    Q = jordan_quiver()
    ok = True
    base = [4, 9, 25, 49]
    for k in (2, 3):
        # the k-th power has coefficients of degree k in q, so k = 3 needs more points
        samples = base if k == 2 else sorted(set(base) | {2, 3, 5, 7})
        rep = he.verify_divided_power(Q, lambda q: fqrep.simple_rep(Q, q, 0), k, samples)
        ok &= rep.ok and rep.summary[he.SKIP] == 0
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    assert criterion(8, f"k-th power of C(S) has leading value k! at t = -1 ({elapsed:.1f}s)", ok)


# -- 9 ---------------------------------------------------------------------

def test_criterion_09_classical_bracket(criterion):
    start = time.perf_counter()
    ok = True
    fqrep.CAPS.max_q = 25
    for Q in (point_quiver(), jordan_quiver()):
        rep = he.verify_classical_bracket(Q, 0, [4, 9, 25])
        ok &= rep.ok and rep.summary[he.SKIP] == 0
    ok &= time.perf_counter() - start < 120
    assert criterion(9, "[e, -f] = h in the limit for the point and Jordan quivers", ok)


# -- 10 --------------------------------------------------------------------

def _random_word(rng, P, length):
    letters = []
    for (i, l) in P.index_set():
        letters += [nc.Generator("E", i, l), nc.Generator("F", i, l)]
    for i in range(P.cartan.n):
        letters += [nc.Generator("K", i, exp=1), nc.Generator("K", i, exp=-1)]
    return nc.NCPoly({tuple(rng.choice(letters) for _ in range(length)): 1})


def test_criterion_10_straightening(criterion):
    start = time.perf_counter()
    ok = True
    wanted = ("KK", "KE", "ef-commute", "ef-exchange")
    pres = [nc.quantum_presentation(cartan_matrix(Q, 3)) for Q in (jordan_quiver(), a2_quiver(), loop_quiver(2))]
    for P in pres:
        for inst in nc.relation_instances(P, 3):
            if inst.name.split()[0] in wanted:
                ok &= nc.straighten(inst.lhs - inst.rhs, P).is_zero()
    rng = random.Random(7)
    for P in pres:
        for _ in range(100 // len(pres) + 1):
            w = _random_word(rng, P, rng.randint(2, 5))
            a = nc.straighten(w, P)
            b = nc.straighten(w, P, strategy="random", rng=rng)
            ok &= a == b and nc.straighten(a, P) == a and nc.is_normal(a, P)
    for Q in (jordan_quiver(), a2_quiver()):
        P = nc.quantum_presentation(cartan_matrix(Q, 3))
        for i in range(Q.n):
            ok &= nc.classical_limit(nc.commutator(nc.e(i), nc.f(i)), P) == nc.h(i)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    assert criterion(10, f"relations straighten to zero; normal forms are confluent ({elapsed:.1f}s)", ok)


# -- 11 --------------------------------------------------------------------

def _basis_pool(Q, q):
    ctx = he.context(Q, q)
    mods = [None]
    for d in fqrep.dimension_vectors_up_to(Q, 2):
        if any(d):
            mods += [c.rep.module() for c in fqrep.module_classes(Q, d, q)]
    return ctx, mods


def test_criterion_11_associativity(criterion):
    start = time.perf_counter()
    rng = random.Random(11)
    ok, done = True, 0
    settings = [(jordan_quiver(), q) for q in (2, 3, 4)] + [(a2_quiver(), q) for q in (2, 3, 4)]
    pools = {s: _basis_pool(*s) for s in settings}
    while done < 200:
        Q, q = rng.choice(settings)
        ctx, mods = pools[(Q, q)]
        triple, size = [], 0
        for _ in range(3):
            M, N = rng.choice(mods), rng.choice(mods)
            size += sum(M.dims) if M else 0
            size += sum(N.dims) if N else 0
            alpha = tuple(rng.randint(-1, 1) for _ in range(Q.n))
            triple.append(ctx.basis(M, N, alpha))
        if size > 5:
            continue
        x, y, z = triple
        ok &= ctx.star(ctx.star(x, y), z) == ctx.star(x, ctx.star(y, z))
        done += 1
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    assert criterion(11, f"star product associative on {done} random triples ({elapsed:.1f}s)", ok)


# -- 12 --------------------------------------------------------------------

def _module_euler(M, N):
    return fqrep.hom_dim(fqrep.C(M), fqrep.C(N)) - fqrep.ext_dim(fqrep.C(M), fqrep.C(N))


def test_criterion_12_acyclic_shadow(criterion):
    start = time.perf_counter()
    ok = True
    for Q in (a2_quiver(), kronecker_quiver()):
        q = 2
        for i, v in enumerate(Q.vertices):
            P = fqrep.projective_rep(Q, q, i)
            S = fqrep.simple_rep(Q, q, i)
            # rad P_i is semisimple here since every path has length at most one
            R = fqrep.semisimple_rep(Q, q, projective_data(Q)[v].radical)
            phi = _module_euler(R, S) + 2 * _module_euler(P, R)
            ok &= phi == phi_twist_exponent(Q, v)
    fqrep.CAPS.max_q = 9
    for q in (4, 9):
        for variant in (he.ACYCLIC, he.STANDARD):
            rep = he.verify_quantum_relations(a2_quiver(), q, max_l=1, variant=variant)
            ok &= rep.ok and rep.summary[he.SKIP] == 0
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    assert criterion(12, f"twist exponents match Hom/Ext; A2 images satisfy the quantum group relations ({elapsed:.1f}s)", ok)
