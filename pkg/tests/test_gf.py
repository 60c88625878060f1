import random

import pytest
from hypothesis import given, strategies as st

from sdhall import gf
from sdhall.gf import FieldError, finite_field, prime_power

QS = [2, 3, 4, 5, 7, 8, 9]


@pytest.fixture(params=sorted(gf.BACKENDS))
def backend(request):
    old = gf.backend_name()
    gf.set_backend(request.param)
    yield request.param
    gf.set_backend(old)


def test_prime_power():
    assert prime_power(8) == (2, 3)
    assert prime_power(49) == (7, 2)
    for bad in (1, 6, 12):
        with pytest.raises(FieldError):
            prime_power(bad)


def test_unknown_backend():
    with pytest.raises(FieldError):
        gf.set_backend("fortran")


@pytest.mark.parametrize("q", QS)
def test_field_axioms(q):
    F = finite_field(q)
    els = list(F.elements())
    for a in els:
        assert F.add(a, 0) == a and F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
    rng = random.Random(q)
    for _ in range(200):
        a, b, c = (rng.randrange(q) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))


@pytest.mark.parametrize("q", QS)
def test_multiplicative_group_is_cyclic(q):
    F = finite_field(q)
    orders = []
    for a in range(1, q):
        k, x = 1, a
        while x != 1:
            x, k = F.mul(x, a), k + 1
        orders.append(k)
    assert max(orders) == q - 1


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        finite_field(5).inv(0)


def _rand_matrix(rng, q, r, c):
    return [[rng.randrange(q) for _ in range(c)] for _ in range(r)]


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_linear_algebra(backend, q):
    F = finite_field(q)
    assert F.backend == backend
    rng = random.Random(q * 7)
    for _ in range(40):
        n = rng.randint(1, 4)
        a = _rand_matrix(rng, q, n, n)
        if F.is_invertible(a):
            assert F.matmul(a, F.inverse(a)) == F.identity(n)
            assert F.rank(a) == n
        else:
            assert F.rank(a) < n
            with pytest.raises(ZeroDivisionError):
                F.inverse(a)
        m = _rand_matrix(rng, q, rng.randint(1, 4), rng.randint(1, 4))
        ncols = len(m[0])
        ns = F.nullspace(m, ncols)
        assert len(ns) + F.rank(m, ncols) == ncols
        for v in ns:
            assert F.matmul(m, [[x] for x in v]) == [[0]] * len(m)


@pytest.mark.skipif("compiled" not in gf.BACKENDS, reason="extension not built")
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 5, 8, 9]))
def test_backend_parity(seed, q):
    rng = random.Random(seed)
    r, c = rng.randint(1, 5), rng.randint(1, 5)
    a = _rand_matrix(rng, q, r, c)
    b = _rand_matrix(rng, q, c, rng.randint(1, 5))
    results = {}
    old = gf.backend_name()
    try:
        for name in gf.BACKENDS:
            gf.set_backend(name)
            F = finite_field(q)
            results[name] = (F.matmul(a, b), F.rank(a, c), F.rref(a, c), F.nullspace(a, c))
    finally:
        gf.set_backend(old)
    assert results["python"] == results["compiled"]
