import itertools
import random

import pytest
from hypothesis import given, strategies as st

from sdhall.exactscalar import MINUS_T, ONE, T, localize_at_minus1, nu, quantum_integer
from sdhall.ncpresent import (
    UNSIGNED,
    ClassicalLimitError,
    CutoffError,
    NCParseError,
    NCPoly,
    PresentationError,
    PrimitiveAliases,
    K,
    bidegree,
    classical_limit,
    classical_presentation,
    commutator,
    e,
    ef_exchange_rule,
    f,
    gkm_presentation,
    h,
    is_normal,
    parse_ncpoly,
    quantum_presentation,
    relation_instances,
    root_weight,
    serre_instances,
    serre_sum,
    straighten,
    verify_relation_instances,
)
from sdhall.quivercartan import (
    a2_quiver,
    cartan_matrix,
    discrete_quiver,
    gkm_cartan,
    jordan_quiver,
    loop_quiver,
)

A2 = quantum_presentation(cartan_matrix(a2_quiver()))
JQ = quantum_presentation(cartan_matrix(jordan_quiver(), l_max=3))
L2 = quantum_presentation(cartan_matrix(loop_quiver(2), l_max=3))


def test_straighten_examples():
    assert straighten(e(1) * K(0), A2) == K(0) * e(1) * MINUS_T
    expected = f(0) * e(0) + (K(0) - K(0, -1)) * nu(1)
    assert straighten(e(0) * f(0), A2) == expected
    assert straighten(e(0) * f(1), A2) == f(1) * e(0)


def test_ef_exchange_examples():
    assert ef_exchange_rule(0, 1, 1, A2) == f(0) * e(0) + (K(0) - K(0, -1)) * nu(1)
    assert ef_exchange_rule(0, 1, 1, JQ) == f(0) * e(0) + (K(0) - K(0, -1)) * nu(1)
    assert ef_exchange_rule(0, 2, 1, JQ) == f(0) * e(0, 2) + (e(0) * K(0) - e(0) * K(0, -1)) * nu(1)


def test_serre_examples():
    signed = serre_sum(A2, "E", 0, 1)
    assert signed == e(0) * e(0) * e(1) - e(0) * e(1) * e(0) * quantum_integer(2) + e(1) * e(0) * e(0)
    unsigned = serre_sum(A2, "E", 0, 1, sign_variant=UNSIGNED)
    assert unsigned == e(0) * e(0) * e(1) + e(0) * e(1) * e(0) * quantum_integer(2) + e(1) * e(0) * e(0)
    C = classical_presentation(cartan_matrix(a2_quiver()))
    assert serre_sum(C, "E", 0, 1) == e(0) * e(0) * e(1) - 2 * e(0) * e(1) * e(0) + e(1) * e(0) * e(0)
    D = quantum_presentation(cartan_matrix(discrete_quiver(2)))
    assert serre_sum(D, "F", 0, 1) == commutator(f(0), f(1))
    with pytest.raises(PresentationError):
        serre_sum(JQ, "E", 0, 0, 2)
    with pytest.raises(PresentationError):
        serre_sum(A2, "E", 0, 0)
    names = [r.name for r in serre_instances(A2)]
    assert "Serre E i=1 j=2 l=1" in names and "Serre F i=2 j=1 l=1" in names


@pytest.mark.parametrize("P", [A2, JQ, L2], ids=["a2", "jordan", "loop2"])
def test_quantum_relations_straighten_to_zero(P):
    rep = verify_relation_instances(P, max_l=3)
    assert rep.ok, rep.failures
    assert rep.checked > 0


def test_classical_and_gkm_relations():
    C = classical_presentation(cartan_matrix(a2_quiver()))
    rep = verify_relation_instances(C)
    assert rep.ok
    assert any(i.name.startswith("he ") for i in relation_instances(C))
    G = gkm_presentation(gkm_cartan("ab", ((0, 0), (0, 2)), (2, 1)))
    rep = verify_relation_instances(G)
    assert rep.ok
    names = [i.name for i in relation_instances(G)]
    assert "gkm-ee e1,1e1,2" in names
    assert straighten(commutator(e(0, 2), f(0, 2)), G) == h(0)
    assert straighten(commutator(e(0, 2), f(0, 2)), classical_presentation(
        cartan_matrix(jordan_quiver()))) == 2 * h(0)


def test_cutoff_and_presentation_errors():
    with pytest.raises(CutoffError):
        straighten(e(0, 4), JQ)
    with pytest.raises(CutoffError):
        straighten(e(0, 2), A2)
    with pytest.raises(PresentationError):
        straighten(K(0), classical_presentation(cartan_matrix(a2_quiver())))
    with pytest.raises(PresentationError):
        quantum_presentation(cartan_matrix(a2_quiver()), serre_sign_variant="maybe")


def test_classical_limit_examples():
    assert classical_limit(commutator(e(0), f(0)), A2) == h(0)
    assert classical_limit((K(0) - 1) / (-T - 1), A2) == h(0)
    assert classical_limit(K(0), A2) == NCPoly.scalar(1)
    with pytest.raises(ClassicalLimitError):
        classical_limit(K(0) / (T + 1), A2)


def test_parse_round_trip_and_errors():
    p = parse_ncpoly("e(1,1)*f(1,1) - f(1,1)*e(1,1)")
    assert p == commutator(e(0), f(0))
    assert parse_ncpoly("[e(1), f(1)]") == p
    assert parse_ncpoly("1/(1-t^2)*K(1) - t^-1*Kinv(1)") == K(0) * nu(1) - K(0, -1) / T
    q = straighten(parse_ncpoly("e(2,1)*K(1)*f(1,1)"), A2)
    assert parse_ncpoly(str(q)) == q
    for bad in ("e(1", "e(0,1)", "K(1,2)", "e(1)*", "x", "", "e(1)^-1"):
        with pytest.raises(NCParseError):
            parse_ncpoly(bad)


def test_primitive_aliases():
    pa = PrimitiveAliases()
    assert pa.s(0) == e(0)
    pa.define(0, 2, e(0) * e(0) * ONE / 2)
    assert pa.s(0, 2) == e(0, 2) + e(0) * e(0) / 2
    with pytest.raises(PresentationError):
        pa.define(0, 2, f(0))
    with pytest.raises(PresentationError):
        pa.s(0, 3)


letters_a2 = st.sampled_from([e(0), e(1), f(0), f(1), K(0), K(1), K(0, -1)])
letters_j = st.sampled_from([e(0, 1), e(0, 2), f(0, 1), f(0, 2), K(0), K(0, -1)])


def _word(parts):
    out = NCPoly.scalar(1)
    for x in parts:
        out = out * x
    return out


@given(st.sampled_from(["a2", "jordan"]), st.data())
def test_straighten_invariants(which, data):
    P, letters = (A2, letters_a2) if which == "a2" else (JQ, letters_j)
    w = _word(data.draw(st.lists(letters, min_size=1, max_size=5)))
    nf = straighten(w, P)
    assert is_normal(nf, P)
    assert straighten(nf, P) == nf
    seed = data.draw(st.integers(0, 1000))
    assert straighten(w, P, strategy="random", rng=random.Random(seed)) == nf
    (word,) = w.terms
    for out in nf.terms:
        assert root_weight(out) == root_weight(word)


def test_bidegree():
    (w,) = (e(0) * K(1) * f(1) * K(1, -1)).terms
    assert bidegree(w) == ((((0, 1), 1),), (((1, 1), 1),), ())


@given(st.lists(st.sampled_from([e(0), e(1), f(0), f(1), K(0), K(1)]), min_size=1, max_size=4))
def test_classical_limit_of_words_is_integral(parts):
    out = classical_limit(_word(parts), A2)
    for c in out.terms.values():
        v = localize_at_minus1(c)
        assert v.regular_at_minus1 and v.value_at_minus1.denominator == 1


@pytest.mark.parametrize("Q", [jordan_quiver(), a2_quiver(), loop_quiver(2)], ids=["jordan", "a2", "loop2"])
def test_classical_limit_of_commutators_matches_classical_bracket(Q):
    C = cartan_matrix(Q, l_max=2)
    Pq, Pc = quantum_presentation(C), classical_presentation(C)
    gens = [(kind, i, l, (e if kind == "E" else f)(i, l))
            for (i, l) in Pq.index_set() for kind in ("E", "F")]
    gens += [("H", i, 0, h(i)) for i in range(C.n)]
    for (ka, ia, la, x), (kb, ib, lb, y) in itertools.product(gens, repeat=2):
        # e_{il} with l >= 2 is not primitive, so its bracket with f_{ik} is not the classical one
        if ia == ib and {ka, kb} == {"E", "F"} and max(la, lb) >= 2:
            continue
        assert classical_limit(commutator(x, y), Pq) == straighten(commutator(x, y), Pc)
