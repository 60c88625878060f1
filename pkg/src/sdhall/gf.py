"""Finite fields F_q (q = p^e) as lookup tables, plus the linear-algebra
backend selected at import: the compiled ``_gfcore`` extension when it is
built, otherwise the pure-Python ``_gfcore_py`` module.

Elements are integers ``0 .. q-1`` read as base-p digit vectors of a
polynomial modulo a fixed irreducible polynomial of degree e.
"""
from __future__ import annotations

import itertools
import threading
from functools import lru_cache

from . import _gfcore_py

try:  # pragma: no cover - exercised only when the extension is built
    from . import _gfcore as _gfcore_c
except ImportError:  # pragma: no cover
    _gfcore_c = None

BACKENDS = {"python": _gfcore_py}
if _gfcore_c is not None:
    BACKENDS["compiled"] = _gfcore_c

_backend_name = "compiled" if _gfcore_c is not None else "python"
_backend_lock = threading.Lock()


class FieldError(ValueError):
    """Unsupported field size."""


def backend_name() -> str:
    return _backend_name


def set_backend(name: str) -> None:
    """Switch the kernel backend for fields created afterwards."""
    global _backend_name
    if name not in BACKENDS:
        raise FieldError(f"backend {name!r} is not available; have {sorted(BACKENDS)}")
    with _backend_lock:
        _backend_name = name
        finite_field.cache_clear()


def prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, m = 0, q
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, e


def _irreducible_modulus(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible polynomial of degree e over F_p (coefficients low to high)."""
    if e == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=e):
        poly = tuple(tail) + (1,)
        if poly[0] == 0:
            continue
        if _is_irreducible_prime(poly, p):
            return poly
    raise FieldError("no irreducible polynomial found")


def _is_irreducible_prime(poly, p):
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            div = tuple(tail) + (1,)
            if not _pmod_prime(poly, div, p):
                return False
    return True


def _pmod_prime(a, b, p):
    a = list(a)
    while len(a) >= len(b):
        c = a[-1] % p
        shift = len(a) - len(b)
        if c:
            for i, y in enumerate(b):
                a[i + shift] = (a[i + shift] - c * y) % p
        a.pop()
    while a and a[-1] % p == 0:
        a.pop()
    return a


class FiniteField:
    """Arithmetic tables and linear-algebra kernels for F_q."""

    def __init__(self, q: int):
        p, e = prime_power(q)
        self.q, self.p, self.e = q, p, e
        self.modulus = _irreducible_modulus(p, e)
        digits = [self._digits(x) for x in range(q)]
        add = [0] * (q * q)
        mul = [0] * (q * q)
        for a in range(q):
            for b in range(q):
                add[a * q + b] = self._encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
                mul[a * q + b] = self._encode(self._polymulmod(digits[a], digits[b]))
        neg = [0] * q
        inv = [0] * q
        for a in range(q):
            neg[a] = next(b for b in range(q) if add[a * q + b] == 0)
            if a:
                inv[a] = next(b for b in range(1, q) if mul[a * q + b] == 1)
        self.add_table = add
        self.mul_table = mul
        self.neg_table = neg
        self.inv_table = inv
        self._add = [add[i * q:(i + 1) * q] for i in range(q)]
        self._mul = [mul[i * q:(i + 1) * q] for i in range(q)]
        self.ops = BACKENDS[_backend_name].FieldOps(q, add, mul, neg, inv)
        self.backend = _backend_name

    def _digits(self, x):
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, digits):
        x = 0
        for d in reversed(digits):
            x = x * self.p + d
        return x

    def _polymulmod(self, a, b):
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        mod = self.modulus
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for i, y in enumerate(mod):
                    prod[k - e + i] = (prod[k - e + i] - c * y) % p
        return prod[:e]

    # scalar arithmetic ---------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.inv_table[a]

    def power(self, a: int, k: int) -> int:
        out = 1
        for _ in range(k):
            out = self._mul[out][a]
        return out

    def elements(self) -> range:
        return range(self.q)

    def __repr__(self):
        return f"FiniteField({self.q})"

    # matrices ------------------------------------------------------------
    def identity(self, n: int):
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def zeros(self, r: int, c: int):
        return [[0] * c for _ in range(r)]

    def matmul(self, a, b):
        return self.ops.matmul(a, b)

    def matadd(self, a, b):
        add = self._add
        return [[add[x][y] for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

    def matscale(self, a, c):
        mc = self._mul[c]
        return [[mc[x] for x in row] for row in a]

    def rank(self, rows, ncols=None):
        if not rows:
            return 0
        return self.ops.rank(rows, len(rows[0]) if ncols is None else ncols)

    def rref(self, rows, ncols):
        return self.ops.rref(rows, ncols)

    def nullspace(self, rows, ncols):
        if not rows:
            return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
        return self.ops.nullspace(rows, ncols)

    def is_invertible(self, a) -> bool:
        return self.ops.is_invertible(a)

    def inverse(self, a):
        """Inverse of a square matrix; raises ZeroDivisionError if singular."""
        n = len(a)
        if n == 0:
            return []
        aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
        red, pivots = self.rref(aug, 2 * n)
        if len(pivots) < n or pivots[n - 1] != n - 1:
            raise ZeroDivisionError("singular matrix")
        return [row[n:] for row in red]

    def span_basis(self, rows, ncols):
        """Reduced row-echelon basis of the span of the given row vectors."""
        if not rows:
            return []
        return self.rref(rows, ncols)[0]

    def extend_basis(self, rows, ncols):
        """Standard basis vectors completing the span of ``rows`` to the whole space."""
        red, pivots = self.rref(rows, ncols) if rows else ([], [])
        pivset = set(pivots)
        return [[1 if j == c else 0 for j in range(ncols)] for c in range(ncols) if c not in pivset]

    def in_span(self, basis, vec, ncols) -> bool:
        if not any(vec):
            return True
        return self.rank(list(basis) + [list(vec)], ncols) == self.rank(list(basis), ncols) if basis else False

    def transpose(self, a, nrows=None):
        if not a:
            return []
        return [list(col) for col in zip(*a)]

    def is_nilpotent(self, a) -> bool:
        n = len(a)
        if n == 0:
            return True
        p = a
        k = 1
        while k < n:
            p = self.matmul(p, p)
            k *= 2
        return not any(any(r) for r in p)

    def matpow(self, a, k: int):
        out = self.identity(len(a))
        base = a
        while k:
            if k & 1:
                out = self.matmul(out, base)
            base = self.matmul(base, base)
            k >>= 1
        return out

    # polynomials over F_q (coefficient lists, lowest degree first) ---------
    def poly_trim(self, a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def poly_mul(self, a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        add, mul = self._add, self._mul
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = add[out[i + j]][mul[x][y]]
        return self.poly_trim(out)

    def poly_divmod(self, a, b):
        a = self.poly_trim(a)
        b = self.poly_trim(b)
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        inv_lead = self.inv(b[-1])
        quo = [0] * max(len(a) - len(b) + 1, 1)
        while len(a) >= len(b) and a:
            shift = len(a) - len(b)
            c = self.mul(a[-1], inv_lead)
            quo[shift] = c
            nc = self.neg(c)
            for i, y in enumerate(b):
                a[i + shift] = self.add(a[i + shift], self.mul(nc, y))
            a = self.poly_trim(a)
        return self.poly_trim(quo), a

    def poly_gcd(self, a, b):
        a, b = self.poly_trim(a), self.poly_trim(b)
        while b:
            a, b = b, self.poly_divmod(a, b)[1]
        if a:
            s = self.inv(a[-1])
            a = [self.mul(s, x) for x in a]
        return a

    def poly_eval_matrix(self, poly, m):
        """poly(m) by Horner's rule."""
        n = len(m)
        acc = self.zeros(n, n)
        for c in reversed(self.poly_trim(poly)):
            acc = self.matmul(acc, m)
            for i in range(n):
                acc[i][i] = self.add(acc[i][i], c)
        return acc

    def minimal_polynomial(self, m):
        """Monic minimal polynomial of a square matrix via Krylov dependence of its powers."""
        n = len(m)
        if n == 0:
            return [1]
        vecs = []
        power = self.identity(n)
        for k in range(n + 1):
            vecs.append([x for row in power for x in row])
            # columns = flattened powers; solve for dependence
            cols = [[vecs[j][i] for j in range(len(vecs))] for i in range(n * n)]
            ns = self.nullspace(cols, len(vecs))
            if ns:
                rel = ns[0]
                # normalise so that the top coefficient is 1
                top = max(i for i, x in enumerate(rel) if x)
                s = self.inv(rel[top])
                return [self.mul(s, x) for x in rel[: top + 1]]
            power = self.matmul(power, m)
        raise AssertionError("minimal polynomial not found")

    def monic_polys(self, degree: int):
        for tail in itertools.product(range(self.q), repeat=degree):
            yield list(tail) + [1]

    def poly_factor_distinct(self, poly):
        """Distinct monic irreducible factors of a monic polynomial, by trial division."""
        f = self.poly_trim(poly)
        factors = []
        d = 1
        while 2 * d <= len(f) - 1:
            for cand in self.monic_polys(d):
                if 2 * d > len(f) - 1:
                    break
                quo, rem = self.poly_divmod(f, cand)
                if rem:
                    continue
                factors.append(cand)
                while not rem:
                    f = quo
                    quo, rem = self.poly_divmod(f, cand)
            d += 1
        if len(f) > 1:
            factors.append(f)
        return factors


@lru_cache(maxsize=None)
def finite_field(q: int) -> FiniteField:
    """Shared field instance for q."""
    return FiniteField(q)
