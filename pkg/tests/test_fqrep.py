import itertools

import pytest

from sdhall.exactscalar import eval_at_q, poincare_gl, poincare_grassmannian
from sdhall.fqrep import (
    CAPS,
    C,
    Cs,
    K,
    Ks,
    RepError,
    SizeError,
    aut_count,
    aut_count_enumerated,
    check_q,
    classify,
    complex_from_parts,
    count_gl,
    count_matrices_of_rank,
    decompose,
    direct_sum,
    enumerate_complexes,
    enumerate_module_classes,
    ext_dim,
    get_catalog,
    hall_number,
    hall_structure,
    hom_dim,
    homology,
    is_isomorphic,
    jordan_rep,
    module_classes,
    projective_rep,
    rep_direct_sum,
    simple_rep,
)
from sdhall.quivercartan import a2_quiver, euler_form, jordan_quiver, kronecker_quiver, loop_quiver

JQ = jordan_quiver()
A2 = a2_quiver()


def small_complexes(Q, q):
    S = [simple_rep(Q, q, v) for v in range(Q.n)]
    out = []
    for M in S:
        out += [C(M), Cs(M), K(M), Ks(M)]
    if Q.arrows and Q.arrows[0][0] == Q.arrows[0][1]:
        out += [C(jordan_rep(Q, q, 2)), Cs(jordan_rep(Q, q, 2))]
    return out


@pytest.mark.parametrize("q", [2, 3, 4])
def test_aut_counts(q):
    J2 = jordan_rep(JQ, q, 2)
    S = simple_rep(JQ, q, 0)
    assert aut_count(C(J2)) == q * q - q
    assert aut_count(C(S)) == q - 1
    assert aut_count(K(S)) == q - 1
    assert aut_count(C(simple_rep(JQ, q, 0, 2))) == eval_at_q(poincare_gl(2), q)
    for X in small_complexes(JQ, q) + [direct_sum(C(S), Cs(S)), direct_sum(K(S), C(S))]:
        assert aut_count(X) == aut_count_enumerated(X)


@pytest.mark.parametrize("q", [2, 3])
def test_enumeration_orbit_stabilizer(q):
    for dims1, dims0 in [((0,), (2,)), ((1,), (1,)), ((1,), (2,))]:
        res = enumerate_complexes(JQ, dims1, dims0, q)
        assert res.orbit_sum() == res.points
    res = enumerate_complexes(A2, (0, 0), (1, 1), q)
    assert len(res.classes) == 2


@pytest.mark.parametrize("n,parts", [(1, 1), (2, 2), (3, 3), (4, 5)])
def test_jordan_module_classes_are_partitions(n, parts):
    assert len(module_classes(JQ, (n,), 2)) == parts
    if n <= 3:
        enum = enumerate_module_classes(JQ, (n,), 2)
        assert {c.id for c, _ in enum.classes} == {c.id for c in module_classes(JQ, (n,), 2)}


def test_a2_module_classes():
    q = 3
    assert len(module_classes(A2, (1, 1), q)) == 2
    P = projective_rep(A2, q, 0)
    assert P.dims == (1, 1)
    assert len(decompose(C(P))) == 1


@pytest.mark.parametrize("Q,q", [(JQ, 2), (JQ, 3), (A2, 2), (A2, 3)])
def test_hall_numbers_match_subcomplex_count(Q, q):
    pool = small_complexes(Q, q)
    for X, Y in itertools.product(pool, repeat=2):
        if sum(X.sizes) + sum(Y.sizes) > 4:
            continue
        cat = get_catalog(Q, q)
        for cid, F in hall_structure(X, Y).items():
            assert hall_number(cat.classes[cid].rep, X, Y) == F


@pytest.mark.parametrize("Q", [JQ, A2, kronecker_quiver(), loop_quiver(2)])
def test_hom_minus_ext_is_euler_form(Q):
    q = 2
    mods = [simple_rep(Q, q, v) for v in range(Q.n)]
    if Q is JQ:
        mods.append(jordan_rep(Q, q, 2))
    if Q.is_acyclic():
        mods += [projective_rep(Q, q, v) for v in range(Q.n)]
    for M, N in itertools.product(mods, repeat=2):
        h = hom_dim(C(M), C(N))
        e = ext_dim(C(M), C(N))
        assert h - e == euler_form(Q, M.dims, N.dims)


def test_homology():
    q = 3
    S = simple_rep(JQ, q, 0)
    assert homology(K(S)).is_acyclic()
    h = homology(C(jordan_rep(JQ, q, 2)))
    assert h.h0.dims == (2,) and h.h1.dims == (0,)
    h = homology(direct_sum(Ks(S), Cs(S)))
    assert h.h0.dims == (0,) and h.h1.dims == (1,) and h.im_d0 == (1,)


def test_isomorphism_and_sums():
    q = 2
    S = simple_rep(JQ, q, 0)
    assert is_isomorphic(direct_sum(C(S), K(S)), direct_sum(K(S), C(S)))
    assert not is_isomorphic(K(S), Ks(S))
    assert rep_direct_sum(S, S).dims == (2,)
    assert classify(C(rep_direct_sum(S, S))).gamma == 2


def test_invalid_complex_rejected():
    q = 2
    with pytest.raises(RepError):
        complex_from_parts(JQ, q, (1,), (1,), [[[0]]], [[[0]]], [[[1]]], [[[1]]])
    with pytest.raises(RepError):
        complex_from_parts(JQ, q, (0,), (1,), [[]], [[[1]]], [[]], [[]])


def test_caps():
    old = (CAPS.max_q, CAPS.max_dim)
    try:
        CAPS.max_q = 4
        with pytest.raises(SizeError):
            check_q(5)
        CAPS.max_dim = 1
        with pytest.raises(SizeError):
            enumerate_complexes(JQ, (1,), (1,), 2)
    finally:
        CAPS.max_q, CAPS.max_dim = old


@pytest.mark.parametrize("q", [2, 3])
def test_matrix_counts(q):
    for r in range(3):
        assert count_gl(q, r) == eval_at_q(poincare_gl(r), q)
    assert sum(count_matrices_of_rank(q, 2, 2, r) for r in range(3)) == q ** 4
    assert count_matrices_of_rank(q, 2, 2, 2) == count_gl(q, 2)


@pytest.mark.parametrize("q", [2, 3])
def test_hall_number_grading_and_split_sum(q):
    S = simple_rep(JQ, q, 0)
    pool = small_complexes(JQ, q)
    for X, Y in itertools.product(pool, repeat=2):
        if sum(X.sizes) + sum(Y.sizes) > 4:
            continue
        assert hall_number(direct_sum(Y, X), X, Y) >= 1
        wrong = direct_sum(Y, X, C(S))
        assert hall_number(wrong, X, Y) == 0
        for cid in hall_structure(X, Y):
            Z = get_catalog(JQ, q).classes[cid].rep
            assert Z.sizes == tuple(a + b for a, b in zip(X.sizes, Y.sizes))


@pytest.mark.parametrize("q", [2, 3])
def test_rank_counts_factor_through_point_counts(q):
    for k in range(3):
        for l in range(3):
            for r in range(min(k, l) + 1):
                expected = eval_at_q(poincare_gl(r) * poincare_grassmannian(r, k) * poincare_grassmannian(r, l), q)
                assert count_matrices_of_rank(q, k, l, r) == expected


@pytest.mark.parametrize("Q,q", [(JQ, 2), (JQ, 3), (A2, 2), (A2, 3)])
def test_nonsplit_extension_counts_divisible_by_q_minus_1(Q, q):
    cat = get_catalog(Q, q)
    pool = small_complexes(Q, q)
    for X, Y in itertools.product(pool, repeat=2):
        if sum(X.sizes) + sum(Y.sizes) > 4:
            continue
        split = classify(direct_sum(Y, X)).id
        ax, ay = classify(X).aut, classify(Y).aut
        hom = q ** hom_dim(X, Y)
        for cid, F in hall_structure(X, Y).items():
            count = F * ax * ay * hom // cat.classes[cid].aut
            assert F * ax * ay * hom % cat.classes[cid].aut == 0
            if cid != split:
                assert count % (q - 1) == 0
