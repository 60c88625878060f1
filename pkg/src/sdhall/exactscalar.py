"""Exact scalars: rational functions in ``t`` over Q, quantum integers and
binomials, point-count polynomials, evaluation at ``t = -1`` and at finite-field
sample points, and rational-function reconstruction from samples.

Polynomials are tuples of coefficients in increasing degree.  A Laurent
polynomial is stored as a fraction whose denominator carries a power of ``t``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class ExactScalarError(ValueError):
    """Raised for invalid arguments to exact-scalar operations."""


class EvaluationError(ExactScalarError):
    """Raised when a rational function has a pole at the evaluation point."""


class ReconstructionError(ExactScalarError):
    """Raised when no rational function within the degree bound fits the samples."""


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient tuples, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, c):
    return _trim(x * c for x in a)


def _pdivmod(a, b):
    """Division with remainder over Q."""
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] -= c * y
        a = list(_trim(a))
    return _trim(q), _trim(a)


def _content(p):
    """Positive gcd of integer coefficients."""
    g = 0
    for c in p:
        g = math.gcd(g, int(c))
    return g


def _to_integer(p):
    """Scale a rational polynomial to a primitive integer polynomial; return (poly, scale)."""
    den = 1
    for c in p:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    ip = tuple(int(Fraction(c) * den) for c in p)
    g = _content(ip) or 1
    return tuple(c // g for c in ip), Fraction(g, den)


def _pgcd(a, b):
    """Monic-free primitive gcd of two integer polynomials."""
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, (_to_integer(r)[0] if r else ())
    if not a:
        return ()
    g, _ = _to_integer(a)
    if g[-1] < 0:
        g = _pneg(g)
    return g


def _peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# RationalFunction
# ---------------------------------------------------------------------------

class RationalFunction:
    """An element of Q(t) in canonical reduced form.

    The canonical form is ``num / den`` with integer coefficient tuples,
    polynomial gcd 1, joint content 1 and a positive leading coefficient in
    ``den``.  Two values are equal iff their canonical tuples are identical.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Sequence[Rational] = (), den: Sequence[Rational] = (1,)):
        num, den = _trim(Fraction(c) for c in num), _trim(Fraction(c) for c in den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = (), (1,)
        else:
            n_int, n_scale = _to_integer(num)
            d_int, d_scale = _to_integer(den)
            g = _pgcd(n_int, d_int)
            if len(g) > 1:
                n_int, r1 = _pdivmod(n_int, g)
                d_int, r2 = _pdivmod(d_int, g)
                assert not r1 and not r2
                n_int, s1 = _to_integer(n_int)
                d_int, s2 = _to_integer(d_int)
                n_scale *= s1
                d_scale *= s2
            scale = n_scale / d_scale
            if d_int[-1] < 0:
                d_int, scale = _pneg(d_int), -scale
            # absorb the rational scale into integer numerator/denominator
            self.num = tuple(c * scale.numerator for c in n_int)
            self.den = tuple(c * scale.denominator for c in d_int)
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def const(cls, c: Rational) -> "RationalFunction":
        return cls((c,))

    @classmethod
    def t(cls) -> "RationalFunction":
        return cls((0, 1))

    @classmethod
    def t_power(cls, k: int) -> "RationalFunction":
        if k >= 0:
            return cls((0,) * k + (1,))
        return cls((1,), (0,) * (-k) + (1,))

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunction")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(_padd(self.num, o.num), self.den)
        return RationalFunction(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den)
        )

    __radd__ = __add__

    def __neg__(self):
        r = RationalFunction.__new__(RationalFunction)
        r.num, r.den, r._hash = _pneg(self.num), self.den, None
        return r

    def __sub__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunction(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (RationalFunction.const(1) / self) ** (-k)
        out = RationalFunction.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ExactScalarError("not a constant")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # substitution -----------------------------------------------------------
    def substitute_neg(self) -> "RationalFunction":
        """Return f(-t)."""
        flip = lambda p: tuple(c if i % 2 == 0 else -c for i, c in enumerate(p))
        return RationalFunction(flip(self.num), flip(self.den))

    def substitute_power(self, k: int) -> "RationalFunction":
        """Return f(t^k) for k >= 1."""
        spread = lambda p: tuple(
            p[i // k] if i % k == 0 else 0 for i in range((len(p) - 1) * k + 1)
        ) if p else ()
        return RationalFunction(spread(self.num), spread(self.den))

    def evaluate(self, x):
        """Evaluate at t = x for a rational or QuadraticRational x."""
        d = _peval(self.den, x)
        if d == 0:
            raise EvaluationError(f"pole at t = {x}")
        n = _peval(self.num, x)
        if isinstance(d, QuadraticRational) or isinstance(n, QuadraticRational):
            return QuadraticRational.coerce(n, _radicand_of(x, n, d)) / d
        return Fraction(n) / Fraction(d)

    def valuation_at_minus1(self) -> int:
        """Order of vanishing at t = -1 (negative for a pole)."""
        if not self.num:
            raise ExactScalarError("valuation of zero")
        return _root_multiplicity(self.num, -1) - _root_multiplicity(self.den, -1)

    # printing -------------------------------------------------------------
    def __str__(self):
        return format_rational_function(self)

    def __repr__(self):
        return f"RationalFunction({format_rational_function(self)!r})"


def _root_multiplicity(p, x):
    m = 0
    p = tuple(Fraction(c) for c in p)
    while p and _peval(p, x) == 0:
        p, r = _pdivmod(p, (-x, 1))
        assert not r
        m += 1
    return m


def _radicand_of(*vals):
    for v in vals:
        if isinstance(v, QuadraticRational):
            return v.d
    return 1


def _format_poly_terms(coeffs_by_exp: dict) -> str:
    """Format {exponent: Fraction} in decreasing exponent order."""
    parts = []
    for e in sorted(coeffs_by_exp, reverse=True):
        c = coeffs_by_exp[e]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = "t" if e == 1 else f"t^{e}"
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_rational_function(f: RationalFunction) -> str:
    """Unique text form of the canonical value."""
    if not f.num:
        return "0"
    nz = [i for i, c in enumerate(f.den) if c]
    if len(nz) == 1:
        k, c = nz[0], f.den[nz[0]]
        return _format_poly_terms({i - k: Fraction(a, c) for i, a in enumerate(f.num) if a})
    num = _format_poly_terms({i: Fraction(a) for i, a in enumerate(f.num) if a})
    den = _format_poly_terms({i: Fraction(a) for i, a in enumerate(f.den) if a})
    if len(f.num) == 1 or num.lstrip("-").replace("/", "").isdigit():
        return f"{num}/({den})"
    return f"({num})/({den})"


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(\^)|([-+*/()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExactScalarError(f"unexpected character at position {pos}: {text[pos:]!r}")
        num, var, caret, op = m.groups()
        out.append(("num", int(num)) if num else ("t",) if var else ("^",) if caret else (op,))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks, self.i = tokens, 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise ExactScalarError(f"unexpected end of input, expected {kind or 'token'!r}")
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ExactScalarError(f"expected {kind!r}, got {tok[0]!r} at token {self.i}")
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            acc = acc * rhs if op == "*" else acc / rhs
        return acc

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            exp = self.take("num")[1]
            return base ** (sign * exp)
        return base

    def atom(self):
        kind = self.peek()
        if kind == "num":
            return RationalFunction.const(self.take()[1])
        if kind == "t":
            self.take()
            return RationalFunction.t()
        if kind == "(":
            self.take()
            v = self.expr()
            self.take(")")
            return v
        raise ExactScalarError(f"unexpected token {kind!r} at token {self.i}")


def parse_rational_function(text: str) -> RationalFunction:
    """Parse the plain-text grammar, e.g. ``1/(t^2-1)`` or ``-t - t^-1``."""
    p = _Parser(_tokenize(text))
    if p.peek() is None:
        raise ExactScalarError("empty expression")
    v = p.expr()
    if p.i != len(p.toks):
        raise ExactScalarError(f"trailing input at token {p.i}")
    return v


# ---------------------------------------------------------------------------
# QuadraticRational: a + b*sqrt(d)
# ---------------------------------------------------------------------------

def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Write n = s^2 * d with d squarefree; return (s, d)."""
    if n <= 0:
        raise ExactScalarError("positive integer required")
    s, d, f = 1, 1, 2
    m = n
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            s *= f
        if m % f == 0:
            m //= f
            d *= f
        f += 1
    return s, d * m


@dataclass(frozen=True)
class QuadraticRational:
    """Exact element a + b*sqrt(d) of Q(sqrt(d)), d a squarefree integer > 1."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def coerce(cls, x, d: int):
        if isinstance(x, QuadraticRational):
            if x.d != d and x.b != 0:
                raise ExactScalarError("mixing different quadratic fields")
            return x if x.d == d else cls(x.a, 0, d)
        return cls(Fraction(x), 0, d)

    def _other(self, o):
        if isinstance(o, QuadraticRational):
            if o.d != self.d and o.b != 0 and self.b != 0:
                raise ExactScalarError("mixing different quadratic fields")
            if o.d != self.d:
                if o.b == 0:
                    return QuadraticRational(o.a, 0, self.d)
                return None
            return o
        if isinstance(o, (int, Fraction)):
            return QuadraticRational(o, 0, self.d)
        raise TypeError

    def __add__(self, o):
        try:
            o2 = self._other(o)
        except TypeError:
            return NotImplemented
        if o2 is None:
            return QuadraticRational(o.a + self.a, o.b, o.d)
        return QuadraticRational(self.a + o2.a, self.b + o2.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticRational(-self.a, -self.b, self.d)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        try:
            o2 = self._other(o)
        except TypeError:
            return NotImplemented
        if o2 is None:
            return QuadraticRational(o.a * self.a, o.b * self.a, o.d)
        return QuadraticRational(
            self.a * o2.a + self.b * o2.b * self.d, self.a * o2.b + self.b * o2.a, self.d
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadraticRational(self.a / n, -self.b / n, self.d)

    def __truediv__(self, o):
        if isinstance(o, QuadraticRational):
            return self * o.inverse()
        if isinstance(o, (int, Fraction)):
            return QuadraticRational(self.a / o, self.b / o, self.d)
        return NotImplemented

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadraticRational(1, 0, self.d)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        if isinstance(o, QuadraticRational):
            if self.b == 0 and o.b == 0:
                return self.a == o.a
            return (self.a, self.b, self.d) == (o.a, o.b, o.d)
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        rad = f"sqrt({self.d})"
        b = self.b
        bpart = rad if b == 1 else f"-{rad}" if b == -1 else f"{b}*{rad}"
        if self.a == 0:
            return bpart
        return f"{self.a} + {bpart}" if b > 0 else f"{self.a} - {bpart.lstrip('-')}"


Scalar = Union[int, Fraction, QuadraticRational]


def sqrt_of_q(q: int):
    """Exact sqrt(q): a Fraction for perfect squares, else a QuadraticRational."""
    s, d = squarefree_decomposition(q)
    if d == 1:
        return Fraction(s)
    return QuadraticRational(0, s, d)


def scalar_is_rational(x) -> bool:
    return not isinstance(x, QuadraticRational) or x.b == 0


def scalar_to_fraction(x) -> Fraction:
    if isinstance(x, QuadraticRational):
        if x.b != 0:
            raise ExactScalarError(f"{x} is irrational")
        return x.a
    return Fraction(x)


def format_scalar(x) -> str:
    if isinstance(x, QuadraticRational):
        return str(x) if x.b else str(x.a)
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# quantum combinatorics
# ---------------------------------------------------------------------------

T = RationalFunction.t()
MINUS_T = -T
ONE = RationalFunction.const(1)
ZERO = RationalFunction()


@lru_cache(maxsize=None)
def quantum_integer(n: int) -> RationalFunction:
    """[n] = ((-t)^n - (-t)^-n) / ((-t) - (-t)^-1)."""
    if n == 0:
        return ZERO
    if n < 0:
        return -quantum_integer(-n)
    # sum_{j=0}^{n-1} (-t)^{n-1-2j}
    acc = ZERO
    for j in range(n):
        acc = acc + MINUS_T ** (n - 1 - 2 * j)
    return acc


@lru_cache(maxsize=None)
def quantum_factorial(n: int) -> RationalFunction:
    if n < 0:
        raise ExactScalarError("negative factorial")
    acc = ONE
    for k in range(1, n + 1):
        acc = acc * quantum_integer(k)
    return acc


@lru_cache(maxsize=None)
def quantum_binomial(m: int, n: int) -> RationalFunction:
    """Gaussian binomial with brackets taken at -t."""
    if not 0 <= n <= m:
        raise ExactScalarError(f"quantum_binomial requires 0 <= n <= m, got ({m}, {n})")
    return quantum_factorial(m) / (quantum_factorial(n) * quantum_factorial(m - n))


@lru_cache(maxsize=None)
def phi_factor(r: int, exponent: int = 2) -> RationalFunction:
    """phi_r(t^exponent) = (1 - x)(1 - x^2)...(1 - x^r) at x = t^exponent."""
    if r < 0:
        raise ExactScalarError("r must be non-negative")
    if exponent not in (2, -2):
        raise ExactScalarError("exponent must be +2 or -2")
    acc = ONE
    for j in range(1, r + 1):
        acc = acc * (ONE - RationalFunction.t_power(exponent * j))
    return acc


def nu(r: int) -> RationalFunction:
    """nu_r = 1 / phi_r(t^2)."""
    return ONE / phi_factor(r, 2)


def minus_t_power_i(a_ii: int, k: int) -> RationalFunction:
    """(-t)_(i)^k = (-t)^(k * a_ii / 2)."""
    if a_ii % 2:
        raise ExactScalarError("diagonal Cartan entry must be even")
    return MINUS_T ** (k * a_ii // 2)


@lru_cache(maxsize=None)
def poincare_gl(r: int) -> RationalFunction:
    """Point-count polynomial of GL_r: |GL_r(F_q)| at t^2 = q."""
    if r < 0:
        raise ExactScalarError("r must be non-negative")
    return (
        MINUS_T ** (r * r + r * (r - 1) // 2)
        * (MINUS_T - MINUS_T ** -1) ** r
        * quantum_factorial(r)
    )


@lru_cache(maxsize=None)
def poincare_grassmannian(r: int, k: int) -> RationalFunction:
    """Point-count polynomial of Gr(r, k): number of r-subspaces of F_q^k at t^2 = q."""
    if not 0 <= r <= k:
        raise ExactScalarError(f"poincare_grassmannian requires 0 <= r <= k, got ({r}, {k})")
    return MINUS_T ** (r * (k - r)) * quantum_binomial(k, r)


# ---------------------------------------------------------------------------
# localization and evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalizationVerdict:
    regular_at_minus1: bool
    value_at_minus1: Fraction | None = None


def localize_at_minus1(f: RationalFunction) -> LocalizationVerdict:
    """Evaluate at t = -1 when the reduced denominator does not vanish there."""
    f = RationalFunction.coerce(f)
    d = _peval(f.den, -1)
    if d == 0:
        return LocalizationVerdict(False, None)
    return LocalizationVerdict(True, Fraction(_peval(f.num, -1), d))


def eval_at_v(f: RationalFunction, v0) -> Scalar:
    """Evaluate under the dictionary -t = v0 (so q = v0^2)."""
    return RationalFunction.coerce(f).evaluate(-v0)


def eval_at_q(f: RationalFunction, q: int) -> Scalar:
    """Evaluate at -t = sqrt(q)."""
    return eval_at_v(f, sqrt_of_q(q))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def _split_components(x, d: int | None):
    """Rational components of x in the basis (1, sqrt(d))."""
    if isinstance(x, QuadraticRational):
        return (x.a, x.b)
    return (Fraction(x), Fraction(0))


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction], nvars: int):
    """Solve rows * x = rhs over Q.  Returns a particular solution (free vars zero) or None."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(nvars):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            return None
    x = [Fraction(0)] * nvars
    for i, c in enumerate(piv_cols):
        x[c] = m[i][-1]
    return x


def _fit(samples, dn: int, dd: int):
    """Fit N/D with deg N <= dn and monic deg D = dd to samples (x, y); None if inconsistent."""
    nvars = dn + 1 + dd
    rows, rhs = [], []
    for x, y in samples:
        # sum_j n_j x^j - y * sum_{j<dd} d_j x^j = y * x^dd
        coeffs = [x ** j for j in range(dn + 1)] + [-(y * x ** j) for j in range(dd)]
        target = y * x ** dd
        comps = [_split_components(c, None) for c in coeffs]
        tcomp = _split_components(target, None)
        for k in range(2):
            row = [c[k] for c in comps]
            if k == 1 and not any(row) and tcomp[1] == 0:
                continue
            rows.append(row)
            rhs.append(tcomp[k])
    sol = _solve_rational(rows, rhs, nvars)
    if sol is None:
        return None
    num = tuple(sol[: dn + 1])
    den = tuple(sol[dn + 1:]) + (Fraction(1),)
    for x, _ in samples:
        if _peval(den, x) == 0:
            return None
    return num, den


def _equation_count(samples) -> int:
    return sum(2 if isinstance(x, QuadraticRational) and x.b != 0 else 1 for x, _ in samples)


def reconstruct_in_variable(samples, degree_bound: int | None = None, min_checks: int = 1):
    """Minimal-total-degree rational interpolation in an abstract variable x.

    ``samples`` are pairs (x0, value); x0 may be rational or QuadraticRational
    (an irrational x0 contributes two rational equations).  Candidate degree
    pairs are tried by increasing total degree, then increasing denominator
    degree; a candidate is admissible only if it leaves at least
    ``min_checks`` equations beyond its unknowns, which then act as
    consistency checks.  ``degree_bound`` caps both degrees.  With
    2*bound + 2 equations or more the result is the unique fit within the
    bound.
    Returns (numerator, denominator) coefficient tuples in x.
    """
    samples = [(x, y) for x, y in samples]
    xs = [x for x, _ in samples]
    if len(set(map(str, xs))) != len(xs):
        raise ReconstructionError("sample points must be distinct")
    neq = _equation_count(samples)
    max_total = neq - 1 - min_checks
    if degree_bound is not None:
        max_total = min(max_total, 2 * degree_bound)
    for total in range(0, max_total + 1):
        for dd in range(0, total + 1):
            dn = total - dd
            if degree_bound is not None and (dn > degree_bound or dd > degree_bound):
                continue
            fit = _fit(samples, dn, dd)
            if fit is not None:
                return fit
    raise ReconstructionError("no rational function within the degree bound fits the samples")


def reconstruct(samples: Iterable[tuple], degree_bound: int) -> RationalFunction:
    """Rational function in v = -t matching samples (v0, value); returned in t."""
    num, den = reconstruct_in_variable(list(samples), degree_bound)
    return RationalFunction(num, den).substitute_neg()


def reconstruct_in_q(samples: Iterable[tuple], degree_bound: int | None = None,
                     min_checks: int = 1) -> RationalFunction:
    """Rational function in q = t^2 matching samples (q0, value); returned in t."""
    num, den = reconstruct_in_variable(list(samples), degree_bound, min_checks)
    return RationalFunction(num, den).substitute_power(2)


def reconstruct_in_v(samples: Iterable[tuple], degree_bound: int | None = None,
                     min_checks: int = 1) -> RationalFunction:
    """As :func:`reconstruct` but with an optional adaptive degree search."""
    num, den = reconstruct_in_variable(list(samples), degree_bound, min_checks)
    return RationalFunction(num, den).substitute_neg()
