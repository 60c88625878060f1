from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from sdhall.exactscalar import (
    MINUS_T,
    ONE,
    T,
    EvaluationError,
    ExactScalarError,
    QuadraticRational,
    RationalFunction,
    ReconstructionError,
    eval_at_q,
    eval_at_v,
    format_rational_function,
    localize_at_minus1,
    minus_t_power_i,
    nu,
    parse_rational_function,
    phi_factor,
    poincare_gl,
    poincare_grassmannian,
    quantum_binomial,
    quantum_factorial,
    quantum_integer,
    reconstruct,
    reconstruct_in_q,
    reconstruct_in_v,
    sqrt_of_q,
)
from sdhall.fqrep import count_gl, count_subspaces

small = st.integers(-4, 4)
polys = st.lists(small, min_size=1, max_size=4)


@st.composite
def ratfuncs(draw):
    num = draw(polys)
    den = draw(polys.filter(lambda p: any(p)))
    return RationalFunction(num, den)


@given(ratfuncs(), ratfuncs(), ratfuncs())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RationalFunction()
    if a:
        assert a / a == ONE


@given(ratfuncs())
def test_canonical_form_is_unique(a):
    doubled = RationalFunction(
        [2 * x for x in a.num] + [0], [0] + [2 * x for x in a.den]
    ) * T
    assert doubled == a
    assert hash(doubled) == hash(a)


@given(ratfuncs())
def test_parse_format_round_trip(a):
    assert parse_rational_function(format_rational_function(a)) == a


def test_format_examples():
    assert format_rational_function(ONE / (T * T - 1)) == "1/(t^2 - 1)"
    assert str(RationalFunction()) == "0"


def test_parse_errors():
    for bad in ("1/", "t^", "(1+t", "x", ""):
        with pytest.raises(ExactScalarError):
            parse_rational_function(bad)
    with pytest.raises(ZeroDivisionError):
        parse_rational_function("1/(t-t)")


@pytest.mark.parametrize("n", range(0, 21))
def test_quantum_integer_specializes_to_n(n):
    v = localize_at_minus1(quantum_integer(n))
    assert v.regular_at_minus1 and v.value_at_minus1 == n
    assert localize_at_minus1(quantum_factorial(n)).value_at_minus1 == factorial(n)


def test_quantum_integer_two():
    assert quantum_integer(2) == -T - 1 / T


@pytest.mark.parametrize("m,n", [(m, n) for m in range(9) for n in range(m + 1)])
def test_quantum_binomial_specializes(m, n):
    assert localize_at_minus1(quantum_binomial(m, n)).value_at_minus1 == comb(m, n)


def test_phi_and_nu():
    assert phi_factor(0) == ONE
    assert phi_factor(2) == (1 - T ** 2) * (1 - T ** 4)
    assert phi_factor(1, -2) == 1 - T ** -2
    assert nu(1) == ONE / (1 - T ** 2)
    with pytest.raises(ExactScalarError):
        phi_factor(-1)
    assert minus_t_power_i(-2, 3) == MINUS_T ** -3
    with pytest.raises(ExactScalarError):
        minus_t_power_i(1, 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_point_counts_against_enumeration(q):
    for r in range(3):
        assert eval_at_q(poincare_gl(r), q) == count_gl(q, r)
    for k in range(4):
        for r in range(k + 1):
            assert eval_at_q(poincare_grassmannian(r, k), q) == count_subspaces(q, k, r)


def test_sqrt_and_quadratic_arithmetic():
    assert sqrt_of_q(9) == 3
    s2 = sqrt_of_q(2)
    assert isinstance(s2, QuadraticRational)
    assert s2 * s2 == 2
    assert (1 + s2) * (1 - s2) == -1
    assert s2 ** -2 == Fraction(1, 2)
    assert sqrt_of_q(8) == 2 * s2
    with pytest.raises(ExactScalarError):
        _ = s2 + sqrt_of_q(3)


@given(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from([2, 3, 5]))
def test_quadratic_inverse(a, b, d):
    x = QuadraticRational(a, b, d)
    if x:
        assert x * x.inverse() == 1


def test_eval_at_q_uses_minus_t_equals_sqrt_q():
    assert eval_at_q(MINUS_T, 4) == 2
    assert eval_at_q(T * T, 3) == 3
    assert eval_at_q(ONE / (T * T - 1), 4) == Fraction(1, 3)


def test_localization():
    v = localize_at_minus1((T ** 2 - 1) / (T + 1))
    assert v.regular_at_minus1 and v.value_at_minus1 == -2
    assert not localize_at_minus1(ONE / (T + 1)).regular_at_minus1
    assert (ONE / (T + 1) ** 2).valuation_at_minus1() == -2


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=1, max_size=2).filter(lambda p: any(p)))
def test_reconstruct_in_q_round_trip(num, den):
    f = RationalFunction(num, den).substitute_power(2)
    qs = [q for q in (2, 3, 4, 5, 7, 8, 9, 11, 13) if RationalFunction(den).evaluate(q) != 0]
    samples = [(q, eval_at_q(f, q)) for q in qs]
    assert reconstruct_in_q(samples, degree_bound=3) == f


@given(st.integers(0, 4), st.data())
def test_reconstruct_in_v_round_trip(d, data):
    num = data.draw(st.lists(st.integers(-3, 3), min_size=d + 1, max_size=d + 1))
    den = data.draw(st.lists(st.integers(-3, 3), min_size=d + 1, max_size=d + 1).filter(any))
    f = RationalFunction(num, den)
    points, v0 = [], 2
    while len(points) < 2 * d + 2:
        try:
            points.append((Fraction(v0), eval_at_v(f, Fraction(v0))))
        except EvaluationError:
            pass
        v0 += 1
    assert reconstruct(points, d) == f


def test_reconstruct_examples():
    f = ONE / (T * T - 1)
    assert reconstruct_in_q([(q, eval_at_q(f, q)) for q in (4, 9, 25)]) == f
    g = T * T + 1
    assert reconstruct_in_q([(q, eval_at_q(g, q)) for q in (5, 10, 26)]) == g
    h = MINUS_T ** 3 + 1
    assert reconstruct_in_v([(sqrt_of_q(q), eval_at_q(h, q)) for q in (2, 3, 5, 7, 11)]) == h


def test_reconstruct_failures():
    with pytest.raises(ReconstructionError):
        reconstruct_in_q([(2, 1), (2, 3)])
    with pytest.raises(ReconstructionError):
        reconstruct_in_q([(2, 1), (3, 5), (4, 2), (5, 7)], degree_bound=0)
