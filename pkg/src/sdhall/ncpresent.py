"""Noncommutative polynomials in Borcherds-Bozec style generators.

Words are tuples of :class:`Generator` letters and coefficients are
:class:`RationalFunction` values in t.  ``straighten`` rewrites a polynomial
into the triangular normal form (F-letters)(K- or h-letters)(E-letters),
using only the defining commutation relations; Serre relations are not used
for rewriting, their alternating sums are built by :func:`serre_sum` and
decided elsewhere.

Vertices are 0-based indices into the Cartan data and print 1-based.
"""
from __future__ import annotations

import random
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .exactscalar import (
    ExactScalarError,
    MINUS_T,
    ONE,
    RationalFunction,
    localize_at_minus1,
    minus_t_power_i,
    nu,
    quantum_binomial,
)
from .quivercartan import CartanData

QUANTUM = "quantum_BB"
CLASSICAL = "classical_BB"
GKM = "gkm_with_charge"
VARIANTS = (QUANTUM, CLASSICAL, GKM)

SIGNED = "signed"
UNSIGNED = "unsigned"

_KIND_RANK = {"F": 0, "K": 1, "H": 1, "E": 2}
_EPS = RationalFunction((-1, -1))  # -t - 1


class PresentationError(ValueError):
    """Bad presentation data or a generator outside the cutoff."""


class CutoffError(PresentationError):
    """A generator index lies outside the Cartan data or the l cutoff."""


class ClassicalLimitError(ValueError):
    """A coefficient has a pole at t = -1 after substitution."""


class NCParseError(ValueError):
    """Malformed element text."""


# ---------------------------------------------------------------------------
# generators and polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """One letter: E/F with index (i, l), K with an exponent, or H."""

    kind: str
    i: int
    l: int = 1
    exp: int = 1

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise PresentationError(f"unknown generator kind {self.kind!r}")
        if self.kind == "K" and self.exp == 0:
            raise PresentationError("K exponent must be nonzero")
        if self.kind in ("E", "F") and self.l < 1:
            raise PresentationError("generator level must be positive")

    @property
    def rank(self) -> int:
        return _KIND_RANK[self.kind]

    def sort_key(self):
        return (self.rank, self.kind, self.i, self.l, abs(self.exp), self.exp < 0)

    def __str__(self):
        v = self.i + 1
        if self.kind == "E":
            return f"e({v},{self.l})"
        if self.kind == "F":
            return f"f({v},{self.l})"
        if self.kind == "H":
            return f"h({v})"
        base = f"K({v})" if self.exp > 0 else f"Kinv({v})"
        return base if abs(self.exp) == 1 else f"{base}^{abs(self.exp)}"


Word = tuple  # tuple[Generator, ...]


def _coef(x) -> RationalFunction:
    return RationalFunction.coerce(x)


def _fmt_poly_ascending(coeffs) -> str:
    parts = []
    for e, c in enumerate(coeffs):
        if c == 0:
            continue
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = "t" if e == 1 else f"t^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out


def format_coefficient(c: RationalFunction) -> str:
    """Compact text with ascending powers, denominator normalized to a positive low term."""
    c = _coef(c)
    if not c.num:
        return "0"
    num, den = [Fraction(x) for x in c.num], [Fraction(x) for x in c.den]
    low = next(i for i, x in enumerate(den) if x)
    if den[low] < 0:
        num, den = [-x for x in num], [-x for x in den]
    # pull a pure power of t out of the denominator
    if sum(1 for x in den if x) == 1:
        k, d = low, den[low]
        terms = {i - k: x / d for i, x in enumerate(num) if x}
        if all(e >= 0 for e in terms):
            top = max(terms)
            return _fmt_poly_ascending([terms.get(e, 0) for e in range(top + 1)])
        return " + ".join(_mono(x, e) for e, x in sorted(terms.items())).replace("+ -", "- ")
    n_txt, d_txt = _fmt_poly_ascending(num), _fmt_poly_ascending(den)
    if sum(1 for x in num if x) > 1:
        n_txt = f"({n_txt})"
    return f"{n_txt}/({d_txt})"


def _mono(c: Fraction, e: int) -> str:
    sign = "-" if c < 0 else ""
    a = abs(c)
    if e == 0:
        return f"{sign}{a}"
    mono = "t" if e == 1 else f"t^{e}"
    return f"{sign}{mono}" if a == 1 else f"{sign}{a}*{mono}"


class NCPoly:
    """Finite sum of words with nonzero rational-function coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, object] | None = None):
        clean: dict = {}
        for w, c in (terms or {}).items():
            c = _coef(c)
            if c:
                clean[tuple(w)] = c
        self.terms = clean

    # constructors ---------------------------------------------------------
    @classmethod
    def scalar(cls, c) -> "NCPoly":
        return cls({(): c})

    @classmethod
    def word(cls, *letters: Generator, coeff=1) -> "NCPoly":
        return cls({tuple(letters): coeff})

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return NCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            c = _coef(other)
            return NCPoly({w: x * c for w, x in self.terms.items()})
        other = _as_poly(other)
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                out[w] = out[w] + c if w in out else c
        return NCPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self * other
        return _as_poly(other) * self

    def __truediv__(self, other):
        if isinstance(other, NCPoly):
            if not other.is_scalar() or not other.terms:
                raise NCParseError("can only divide by a nonzero scalar")
            other = other.terms[()]
        c = _coef(other)
        return NCPoly({w: x / c for w, x in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = NCPoly.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _as_poly(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(w == () for w in self.terms)

    def coefficient(self, word: Iterable[Generator]):
        return self.terms.get(tuple(word), RationalFunction())

    def map_coefficients(self, fn) -> "NCPoly":
        return NCPoly({w: fn(c) for w, c in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _word_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for w, c in self.sorted_terms():
            word = "*".join(str(g) for g in w)
            neg = (-c)
            txt_c, txt_n = format_coefficient(c), format_coefficient(neg)
            negative = txt_c.startswith("-") and not txt_n.startswith("-")
            shown = txt_n if negative else txt_c
            if not word:
                body = shown
            elif shown == "1":
                body = word
            else:
                if _needs_parens(shown):
                    shown = f"({shown})"
                body = f"{shown}*{word}"
            pieces.append(("-" if negative else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"NCPoly({str(self)!r})"


def _needs_parens(txt: str) -> bool:
    depth = 0
    for k, ch in enumerate(txt):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > 0 and txt[k - 1] != "^":
            return True
    return False


def _word_key(w: Word):
    return (-len(w), tuple(g.sort_key() for g in w))


def _as_poly(x) -> NCPoly:
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, (int, Fraction, RationalFunction)):
        return NCPoly.scalar(x)
    if isinstance(x, Generator):
        return NCPoly.word(x)
    raise TypeError(f"cannot use {type(x).__name__} as NCPoly")


def e(i: int, l: int = 1) -> NCPoly:
    return NCPoly.word(Generator("E", i, l))


def f(i: int, l: int = 1) -> NCPoly:
    return NCPoly.word(Generator("F", i, l))


def K(i: int, n: int = 1) -> NCPoly:
    return NCPoly.word(Generator("K", i, exp=n)) if n else NCPoly.scalar(1)


def h(i: int) -> NCPoly:
    return NCPoly.word(Generator("H", i))


def commutator(x, y) -> NCPoly:
    x, y = _as_poly(x), _as_poly(y)
    return x * y - y * x


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """Cartan data plus the relation family used for straightening."""

    cartan: CartanData
    variant: str = QUANTUM
    serre_sign_variant: str = SIGNED
    l_max: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise PresentationError(f"unknown variant {self.variant!r}")
        if self.serre_sign_variant not in (SIGNED, UNSIGNED):
            raise PresentationError(f"unknown Serre sign variant {self.serre_sign_variant!r}")

    @property
    def is_quantum(self) -> bool:
        return self.variant == QUANTUM

    @property
    def cutoff(self) -> int:
        return self.cartan.l_max if self.l_max is None else self.l_max

    def a(self, i: int, j: int) -> int:
        return self.cartan.a(i, j)

    def level_cap(self, i: int) -> int:
        if self.cartan.is_real(i):
            return 1
        if self.variant == GKM and self.cartan.charge is not None:
            return self.cartan.charge[i]
        return self.cutoff

    def index_set(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, l) for i in range(self.cartan.n) for l in range(1, self.level_cap(i) + 1))

    def check(self, g: Generator) -> None:
        if not 0 <= g.i < self.cartan.n:
            raise CutoffError(f"vertex {g.i + 1} outside the Cartan data")
        if g.kind in ("E", "F") and g.l > self.level_cap(g.i):
            raise CutoffError(f"index ({g.i + 1},{g.l}) outside the cutoff")
        if g.kind == "H" and self.is_quantum:
            return
        if g.kind == "K" and not self.is_quantum:
            raise PresentationError("K letters belong to the quantum presentation")

    def commute_in_block(self, x: Generator, y: Generator) -> bool:
        return self.a(x.i, y.i) == 0


def quantum_presentation(cartan: CartanData, **kw) -> Presentation:
    return Presentation(cartan, QUANTUM, **kw)


def classical_presentation(cartan: CartanData, **kw) -> Presentation:
    return Presentation(cartan, CLASSICAL, **kw)


def gkm_presentation(cartan: CartanData, **kw) -> Presentation:
    return Presentation(cartan, GKM, **kw)


# ---------------------------------------------------------------------------
# rewriting
# ---------------------------------------------------------------------------

def ef_exchange_rule(i: int, l: int, k: int, P: Presentation) -> NCPoly:
    """e_{il} f_{ik} written as f e K-terms minus e f K^{-1}-terms of lower level."""
    P.check(Generator("E", i, l))
    P.check(Generator("F", i, k))
    a_ii = P.a(i, i)
    out = NCPoly()
    for r in range(0, min(k, l) + 1):
        m, s = k - r, l - r
        base = _word_fe(i, m, s)
        coef = minus_t_power_i(a_ii, -r * (m - s)) * nu(r)
        out = out + NCPoly({base + _kword(i, r): coef})
        if r >= 1:
            coef2 = minus_t_power_i(a_ii, r * (m - s)) * nu(r)
            out = out - NCPoly({_word_ef(i, s, m) + _kword(i, -r): coef2})
    return out


def _word_fe(i, m, s):
    w = ()
    if m:
        w += (Generator("F", i, m),)
    if s:
        w += (Generator("E", i, s),)
    return w


def _word_ef(i, s, m):
    w = ()
    if s:
        w += (Generator("E", i, s),)
    if m:
        w += (Generator("F", i, m),)
    return w


def _kword(i, n):
    return (Generator("K", i, exp=n),) if n else ()


def _pair_rewrite(x: Generator, y: Generator, P: Presentation):
    """Replacement for the adjacent pair x y, or None when it is already in order."""
    if x.rank > y.rank:
        return _swap_across(x, y, P)
    if x.rank < y.rank:
        return None
    if x.kind == "K" and y.kind == "K":
        if x.i == y.i:
            n = x.exp + y.exp
            return [(_kword(x.i, n), ONE)]
        if x.i > y.i:
            return [((y, x), ONE)]
        return None
    if x.kind == "H" and y.kind == "H":
        return [((y, x), ONE)] if x.i > y.i else None
    if x.kind != y.kind:
        # H next to K only in a mixed quantum word; keep K before H
        if x.kind == "H" and y.kind == "K":
            return [((y, x), ONE)]
        return None
    # E,E or F,F
    if (x.i, x.l) > (y.i, y.l) and P.commute_in_block(x, y):
        return [((y, x), ONE)]
    return None


def _swap_across(x: Generator, y: Generator, P: Presentation):
    """x has a larger block rank than y."""
    quantum = P.is_quantum
    if x.kind == "E" and y.kind == "F":
        if x.i != y.i or (not quantum and x.l != y.l):
            return [((y, x), ONE)]
        if quantum:
            return list(ef_exchange_rule(x.i, x.l, y.l, P).terms.items())
        weight = 1 if P.variant == GKM else x.l
        return [((y, x), ONE), ((Generator("H", x.i),), _coef(weight))]
    if x.kind == "E" and y.kind == "K":
        # e_{jl} K_i^n = (-t)^{-n l a_ij} K_i^n e_{jl}
        c = MINUS_T ** (-y.exp * x.l * P.a(y.i, x.i))
        return [((y, x), c)]
    if x.kind == "K" and y.kind == "F":
        c = MINUS_T ** (-x.exp * y.l * P.a(x.i, y.i))
        return [((y, x), c)]
    if x.kind == "E" and y.kind == "H":
        # e h = h e - b e
        b = _h_weight(y.i, x, P)
        return [((y, x), ONE), ((x,), _coef(-b))]
    if x.kind == "H" and y.kind == "F":
        b = _h_weight(x.i, y, P)
        return [((y, x), ONE), ((y,), _coef(-b))]
    raise PresentationError(f"no rewrite for {x}{y}")


def _h_weight(i: int, g: Generator, P: Presentation) -> int:
    """The scalar b in [h_i, e_g] = b e_g."""
    if P.variant == GKM:
        return P.a(i, g.i)
    return g.l * P.a(i, g.i)


def _reducible_positions(w: Word, P: Presentation):
    return [p for p in range(len(w) - 1) if _pair_rewrite(w[p], w[p + 1], P) is not None]


def _first_reducible(w: Word, P: Presentation):
    for p in range(len(w) - 1):
        rw = _pair_rewrite(w[p], w[p + 1], P)
        if rw is not None:
            return p, rw
    return None, None


def _nf_word(w: Word, P: Presentation) -> dict:
    cache = P._cache
    hit = cache.get(w)
    if hit is not None:
        return hit
    p, rw = _first_reducible(w, P)
    if p is None:
        out = {w: ONE}
    else:
        out = {}
        pre, post = w[:p], w[p + 2:]
        for sub, c in rw:
            for nw, nc in _nf_word(pre + tuple(sub) + post, P).items():
                v = c * nc
                out[nw] = out[nw] + v if nw in out else v
        out = {k: v for k, v in out.items() if v}
    with P._lock:
        cache.setdefault(w, out)
    return out


def _nf_word_random(w: Word, P: Presentation, rng: random.Random) -> dict:
    positions = _reducible_positions(w, P)
    if not positions:
        return {w: ONE}
    p = rng.choice(positions)
    rw = _pair_rewrite(w[p], w[p + 1], P)
    out: dict = {}
    pre, post = w[:p], w[p + 2:]
    for sub, c in rw:
        for nw, nc in _nf_word_random(pre + tuple(sub) + post, P, rng).items():
            v = c * nc
            out[nw] = out[nw] + v if nw in out else v
    return {k: v for k, v in out.items() if v}


def _expand_h_quantum(p: NCPoly) -> NCPoly:
    """Replace h_i by (K_i - 1)/(-t - 1) inside quantum words."""
    if not any(g.kind == "H" for w in p.terms for g in w):
        return p
    out = NCPoly()
    for w, c in p.terms.items():
        acc = NCPoly.scalar(c)
        for g in w:
            if g.kind == "H":
                acc = acc * ((K(g.i) - 1) / _EPS)
            else:
                acc = acc * NCPoly.word(g)
        out = out + acc
    return out


def straighten(p, P: Presentation, strategy: str = "leftmost", rng: random.Random | None = None) -> NCPoly:
    """Normal form with all F-letters left, then K or h letters, then E-letters."""
    p = _as_poly(p)
    for w in p.terms:
        for g in w:
            P.check(g)
    if P.is_quantum:
        p = _expand_h_quantum(p)
    out: dict = {}
    for w, c in p.terms.items():
        if strategy == "leftmost":
            nf = _nf_word(w, P)
        elif strategy == "random":
            nf = _nf_word_random(w, P, rng or random.Random(0))
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        for nw, nc in nf.items():
            v = c * nc
            out[nw] = out[nw] + v if nw in out else v
    return NCPoly(out)


def is_normal(p: NCPoly, P: Presentation) -> bool:
    return all(not _reducible_positions(w, P) for w in p.terms)


def bidegree(w: Word) -> tuple:
    """(E-weight, F-weight, net K-exponent per vertex) of a word."""
    ew: dict = {}
    fw: dict = {}
    kw: dict = {}
    for g in w:
        if g.kind == "E":
            ew[(g.i, g.l)] = ew.get((g.i, g.l), 0) + 1
        elif g.kind == "F":
            fw[(g.i, g.l)] = fw.get((g.i, g.l), 0) + 1
        elif g.kind == "K":
            kw[g.i] = kw.get(g.i, 0) + g.exp
    return (
        tuple(sorted(ew.items())),
        tuple(sorted(fw.items())),
        tuple(sorted((i, n) for i, n in kw.items() if n)),
    )


def root_weight(w: Word) -> tuple:
    """Net root-lattice weight sum l*(E) - l*(F) per vertex; preserved by every rewrite."""
    acc: dict = {}
    for g in w:
        if g.kind == "E":
            acc[g.i] = acc.get(g.i, 0) + g.l
        elif g.kind == "F":
            acc[g.i] = acc.get(g.i, 0) - g.l
    return tuple(sorted((i, n) for i, n in acc.items() if n))


# ---------------------------------------------------------------------------
# Serre sums
# ---------------------------------------------------------------------------

def serre_sum(P: Presentation, side: str, i: int, j: int, l: int = 1, sign_variant: str | None = None) -> NCPoly:
    """sum_k (+-1)^k binom(n, k) x_i^{n-k} x_{jl} x_i^k with n = 1 - l a_ij."""
    if not P.cartan.is_real(i):
        raise PresentationError("Serre sums need a real vertex i")
    if (j, l) == (i, 1):
        raise PresentationError("(j, l) must differ from (i, 1)")
    kind = {"E": "E", "F": "F"}.get(side.upper())
    if kind is None:
        raise PresentationError("side must be E or F")
    variant = sign_variant or P.serre_sign_variant
    coeff_b = P.a(i, j) if P.variant == GKM else l * P.a(i, j)
    n = 1 - coeff_b
    xi = NCPoly.word(Generator(kind, i, 1))
    xj = NCPoly.word(Generator(kind, j, l))
    out = NCPoly()
    for k in range(n + 1):
        b = quantum_binomial(n, k) if P.is_quantum else _coef(comb(n, k))
        if variant == SIGNED and k % 2:
            b = -b
        out = out + (xi ** (n - k)) * xj * (xi ** k) * b
    return out


# ---------------------------------------------------------------------------
# relation instances
# ---------------------------------------------------------------------------

@dataclass
class RelationInstance:
    name: str
    lhs: NCPoly
    rhs: NCPoly


@dataclass
class Report:
    presentation: str
    checked: int
    failures: list = field(default_factory=list)
    serre: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def relation_instances(P: Presentation, max_l: int | None = None) -> list[RelationInstance]:
    """Defining relations with all indices at most max_l, excluding Serre relations."""
    cap = P.cutoff if max_l is None else max_l
    idx = [(i, l) for (i, l) in P.index_set() if l <= cap]
    verts = range(P.cartan.n)
    out: list[RelationInstance] = []
    if P.is_quantum:
        for i in verts:
            out.append(RelationInstance(f"KK K{i+1}Kinv{i+1}", K(i) * K(i, -1), NCPoly.scalar(1)))
            out.append(RelationInstance(f"KK Kinv{i+1}K{i+1}", K(i, -1) * K(i), NCPoly.scalar(1)))
            for j in verts:
                out.append(RelationInstance(f"KK K{i+1}K{j+1}", K(i) * K(j), K(j) * K(i)))
        for i in verts:
            for (j, l) in idx:
                c = MINUS_T ** (l * P.a(i, j))
                out.append(RelationInstance(f"KE K{i+1}e{j+1},{l}", K(i) * e(j, l), e(j, l) * K(i) * c))
                out.append(RelationInstance(f"KE K{i+1}f{j+1},{l}", K(i) * f(j, l), f(j, l) * K(i) / c))
        for (i, k) in idx:
            for (j, l) in idx:
                if (i, k) < (j, l) and P.a(i, j) == 0:
                    out.append(RelationInstance(f"commute e{i+1},{k}e{j+1},{l}", e(i, k) * e(j, l), e(j, l) * e(i, k)))
                    out.append(RelationInstance(f"commute f{i+1},{k}f{j+1},{l}", f(i, k) * f(j, l), f(j, l) * f(i, k)))
                if i != j:
                    out.append(RelationInstance(f"ef-commute e{i+1},{k}f{j+1},{l}", e(i, k) * f(j, l), f(j, l) * e(i, k)))
        for (i, k) in idx:
            for (j, l) in idx:
                if i == j:
                    lhs, rhs = nu_relation_sides(P, i, l, k)
                    out.append(RelationInstance(f"ef-exchange i={i+1} l={l} k={k}", lhs, rhs))
        return out
    gkm = P.variant == GKM
    tag = (lambda n: f"gkm-{n}") if gkm else (lambda n: n)
    for i in verts:
        for j in verts:
            out.append(RelationInstance(f"{tag('hh')} h{i+1}h{j+1}", commutator(h(i), h(j)), NCPoly()))
    for (i, k) in idx:
        for (j, l) in idx:
            rhs = NCPoly()
            if i == j and k == l:
                rhs = h(i) * (1 if gkm else k)
            out.append(RelationInstance(f"{tag('ef')} e{i+1},{k}f{j+1},{l}", commutator(e(i, k), f(j, l)), rhs))
    for i in verts:
        for (j, l) in idx:
            b = P.a(i, j) if gkm else l * P.a(i, j)
            out.append(RelationInstance(f"{tag('he')} h{i+1}e{j+1},{l}", commutator(h(i), e(j, l)), e(j, l) * b))
            out.append(RelationInstance(f"{tag('he')} h{i+1}f{j+1},{l}", commutator(h(i), f(j, l)), f(j, l) * (-b)))
    for (i, k) in idx:
        for (j, l) in idx:
            if (i, k) < (j, l) and P.a(i, j) == 0:
                out.append(RelationInstance(f"{tag('ee')} e{i+1},{k}e{j+1},{l}", commutator(e(i, k), e(j, l)), NCPoly()))
                out.append(RelationInstance(f"{tag('ff')} f{i+1},{k}f{j+1},{l}", commutator(f(i, k), f(j, l)), NCPoly()))
    return out


def nu_relation_sides(P: Presentation, i: int, l: int, k: int) -> tuple[NCPoly, NCPoly]:
    """Both sides of the two-sided nu-sum linking e_{il} f_{ik} and f_{ik} e_{il}."""
    a_ii = P.a(i, i)
    lhs, rhs = NCPoly(), NCPoly()
    for r in range(0, min(k, l) + 1):
        m, s = k - r, l - r
        lhs = lhs + NCPoly({_word_ef(i, s, m) + _kword(i, -r): minus_t_power_i(a_ii, r * (m - s)) * nu(r)})
        rhs = rhs + NCPoly({_word_fe(i, m, s) + _kword(i, r): minus_t_power_i(a_ii, -r * (m - s)) * nu(r)})
    return lhs, rhs


def serre_instances(P: Presentation, max_l: int | None = None) -> list[RelationInstance]:
    """Serre sums for every real i and index (j, l) != (i, 1); decided by the Hall oracle."""
    cap = P.cutoff if max_l is None else max_l
    out = []
    for i in P.cartan.real_vertices:
        for (j, l) in P.index_set():
            if l > cap or (j, l) == (i, 1):
                continue
            for side in ("E", "F"):
                out.append(RelationInstance(f"Serre {side} i={i+1} j={j+1} l={l}", serre_sum(P, side, i, j, l), NCPoly()))
    return out


def verify_relation_instances(P: Presentation, max_l: int | None = None) -> Report:
    insts = relation_instances(P, max_l)
    rep = Report(P.variant, len(insts))
    for inst in insts:
        diff = straighten(inst.lhs - inst.rhs, P)
        if diff:
            rep.failures.append((inst.name, str(diff)))
    rep.serre = [inst.name for inst in serre_instances(P, max_l)]
    return rep


# ---------------------------------------------------------------------------
# classical limit
# ---------------------------------------------------------------------------

def _f_sign(w: Word) -> int:
    return -1 if sum(1 for g in w if g.kind == "F") % 2 else 1


def _binom_general(n: int, j: int) -> int:
    num = 1
    for k in range(j):
        num *= n - k
    den = 1
    for k in range(1, j + 1):
        den *= k
    return num // den


def classical_limit(p, P: Presentation) -> NCPoly:
    """Value at t = -1 of an element written in e, the rescaled f and K (or h) letters.

    F-letters of the input are read as the rescaled generators -f, which is
    the normalization under which e and f satisfy [e, f] = h in the limit.
    K_i becomes 1 + (-t-1) h_i and every coefficient must be regular at t = -1.
    """
    if not P.is_quantum:
        raise PresentationError("classical_limit takes a quantum presentation")
    p = _as_poly(p)
    p = NCPoly({w: c * _f_sign(w) for w, c in p.terms.items()})
    nf = straighten(p, P)
    nf = NCPoly({w: c * _f_sign(w) for w, c in nf.terms.items()})
    order = 0
    for c in nf.terms.values():
        order = max(order, -c.valuation_at_minus1())
    acc: dict = {}
    for w, c in nf.terms.items():
        fpart = tuple(g for g in w if g.kind == "F")
        epart = tuple(g for g in w if g.kind == "E")
        kpart = [(g.i, g.exp) for g in w if g.kind == "K"]
        for hword, (n_eps, k) in _k_expansion(kpart, order).items():
            key = fpart + hword + epart
            v = c * (_EPS ** n_eps) * k
            acc[key] = acc[key] + v if key in acc else v
    out = {}
    for w, c in acc.items():
        if not c:
            continue
        verdict = localize_at_minus1(c)
        if not verdict.regular_at_minus1:
            raise ClassicalLimitError(f"coefficient {format_coefficient(c)} of {'*'.join(map(str, w)) or '1'} has a pole at t = -1")
        if verdict.value_at_minus1:
            out[w] = verdict.value_at_minus1
    return NCPoly(out)


def _k_expansion(kpart, order: int) -> dict:
    """prod_i (1 + eps h_i)^{n_i} truncated at eps^order: {h-word: (eps power, integer)}."""
    terms = {(): 1}
    for i, n in kpart:
        new: dict = {}
        for hw, c in terms.items():
            for j in range(order + 1):
                b = _binom_general(n, j)
                if not b:
                    continue
                total = len(hw) + j
                if total > order:
                    break
                w = tuple(sorted(hw + (Generator("H", i),) * j, key=lambda g: g.i))
                new[w] = new.get(w, 0) + c * b
        terms = {w: c for w, c in new.items() if c}
    return {w: (len(w), c) for w, c in terms.items()}


# ---------------------------------------------------------------------------
# primitive aliases
# ---------------------------------------------------------------------------

class PrimitiveAliases:
    """User-defined s_{il} = e_{il} + (polynomial in lower e's); s_{i1} = e_{i1} built in."""

    def __init__(self):
        self._alias: dict = {}

    def define(self, i: int, l: int, correction: NCPoly) -> None:
        if l < 2:
            raise PresentationError("s_{i1} is fixed to e_{i1}")
        for w in correction.terms:
            if any(g.kind != "E" or g.l >= l for g in w):
                raise PresentationError("the correction must use lower e letters only")
        self._alias[(i, l)] = correction

    def s(self, i: int, l: int = 1) -> NCPoly:
        if l == 1:
            return e(i, 1)
        if (i, l) not in self._alias:
            raise PresentationError(f"no primitive generator defined for ({i+1},{l})")
        return e(i, l) + self._alias[(i, l)]


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_NC_TOKEN = re.compile(
    r"\s*(?:(?P<gen>Kinv|K|e|f|h)\s*\(\s*(?P<a>\d+)\s*(?:,\s*(?P<b>\d+)\s*)?\)"
    r"|(?P<num>\d+)|(?P<t>t)|(?P<op>[-+*/^()\[\],]))"
)


def _nc_tokens(text: str):
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _NC_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise NCParseError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        if m.group("gen"):
            toks.append(("gen", (m.group("gen"), int(m.group("a")), m.group("b")), m.start()))
        elif m.group("num"):
            toks.append(("num", int(m.group("num")), m.start()))
        elif m.group("t"):
            toks.append(("t", None, m.start()))
        else:
            toks.append((m.group("op"), None, m.start()))
        pos = m.end()
    return toks


class _NCParser:
    def __init__(self, toks, text):
        self.toks, self.i, self.text = toks, 0, text

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise NCParseError("unexpected end of input")
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise NCParseError(f"expected {kind!r} at position {tok[2]}, got {tok[0]!r}")
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
            n = self.take("num")[1] * sign
            if n < 0:
                if not base.is_scalar() or not base.terms:
                    raise NCParseError("negative powers only apply to scalars")
                return NCPoly.scalar(base.terms[()] ** n)
            return base ** n
        return base

    def atom(self):
        kind = self.peek()
        if kind == "num":
            return NCPoly.scalar(self.take()[1])
        if kind == "t":
            self.take()
            return NCPoly.scalar(RationalFunction.t())
        if kind == "gen":
            name, a, b = self.take()[1]
            if a < 1:
                raise NCParseError("vertices are numbered from 1")
            if name in ("e", "f"):
                if b is None:
                    b = "1"
                return NCPoly.word(Generator("E" if name == "e" else "F", a - 1, int(b)))
            if b is not None:
                raise NCParseError(f"{name}() takes one argument")
            if name == "K":
                return K(a - 1)
            if name == "Kinv":
                return K(a - 1, -1)
            return h(a - 1)
        if kind == "(":
            self.take()
            v = self.expr()
            self.take(")")
            return v
        if kind == "[":
            self.take()
            x = self.expr()
            self.take(",")
            y = self.expr()
            self.take("]")
            return commutator(x, y)
        pos = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        raise NCParseError(f"unexpected token {kind!r} at position {pos}")


def parse_ncpoly(text: str) -> NCPoly:
    """Parse e.g. ``e(1,1)*f(1,1) - f(1,1)*e(1,1)`` or ``1/(1-t^2)*K(1)``."""
    toks = _nc_tokens(text)
    if not toks:
        raise NCParseError("empty expression")
    p = _NCParser(toks, text)
    try:
        v = p.expr()
    except ExactScalarError as exc:
        raise NCParseError(str(exc)) from exc
    if p.i != len(toks):
        raise NCParseError(f"trailing input at position {toks[p.i][2]}")
    return v
