"""Reduced twisted Hall algebra of 2-periodic complexes at a fixed field size.

Raw elements are combinations of isomorphism classes of complexes; their
product is the Hall product twisted by (-t)^(<X^1,Y^1> + <X^0,Y^0>) with
-t = sqrt(q).  Reduction rewrites a class Z as a multiple of
delta(C(H^0 Z) + Cs(H^1 Z)) * b_gamma, and the reduced product ``star`` works
on the basis of such vectors.  Symbolic elements have rational-function
coefficients reconstructed from several field sizes.
"""
from __future__ import annotations

import json
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Sequence

from . import fqrep
from .exactscalar import (
    MINUS_T,
    QuadraticRational,
    RationalFunction,
    ReconstructionError,
    eval_at_q,
    format_scalar,
    localize_at_minus1,
    minus_t_power_i,
    phi_factor,
    reconstruct_in_q,
    reconstruct_in_v,
    scalar_is_rational,
    scalar_to_fraction,
    sqrt_of_q,
)
from .fqrep import C, Cs, K, Ks, Cx2, Rep, direct_sum, get_catalog
from .ncpresent import (
    NCPoly,
    format_coefficient,
    nu_relation_sides,
    quantum_presentation,
    serre_sum,
)
from .quivercartan import Quiver, cartan_matrix, euler_form, phi_twist_exponent, projective_data, sym_euler_form

_EPS = RationalFunction((-1, -1))  # -t - 1


class HallError(ValueError):
    """Malformed Hall expression or unsupported operation."""


# ---------------------------------------------------------------------------
# keys and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class HallBasisVector:
    """delta(C(pos) + Cs(neg)) * b_alpha; pos and neg are module class labels."""

    pos: str
    neg: str
    alpha: tuple[int, ...]

    def __str__(self):
        parts = []
        if self.pos != "0":
            parts.append(f"C({self.pos})")
        if self.neg != "0":
            parts.append(f"Cs({self.neg})")
        delta = parts[0] if len(parts) == 1 else f"[{'+'.join(parts)}]" if parts else ""
        b = f"b([{','.join(map(str, self.alpha))}])" if any(self.alpha) else ""
        if delta and b:
            return f"{delta}*{b}"
        return delta or b or "1"


@dataclass(frozen=True, order=True)
class RawVector:
    """An isomorphism class of complexes, named by its catalog label."""

    label: str

    def __str__(self):
        return f"#[{self.label}]"


def _sort_key(k):
    if isinstance(k, HallBasisVector):
        return (0, k.pos == "0" and k.neg == "0", k.pos, k.neg, k.alpha)
    return (1, k.label)


def _norm_scalar(c):
    if isinstance(c, QuadraticRational) and c.b == 0:
        return c.a
    if isinstance(c, int):
        return Fraction(c)
    return c


class HallElement:
    """Finite combination of basis or raw vectors over one quiver.

    ``q`` is a field size for exact fixed-q coefficients or None for
    rational-function coefficients in t.
    """

    __slots__ = ("quiver", "q", "terms")

    def __init__(self, quiver: Quiver, q: int | None, terms=None):
        self.quiver = quiver
        self.q = q
        clean = {}
        for k, c in (terms or {}).items():
            c = RationalFunction.coerce(c) if q is None else _norm_scalar(c)
            if c:
                clean[k] = c
        self.terms = clean

    def _check(self, other: "HallElement"):
        if other.quiver != self.quiver or other.q != self.q:
            raise HallError("elements live over different quivers or field sizes")

    def _coerce(self, other):
        if isinstance(other, HallElement):
            self._check(other)
            return other
        return HallElement(self.quiver, self.q, {unit_key(self.quiver): other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return HallElement(self.quiver, self.q, out)

    __radd__ = __add__

    def __neg__(self):
        return HallElement(self.quiver, self.q, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "HallElement":
        return HallElement(self.quiver, self.q, {k: x * c for k, x in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, HallElement):
            raise HallError("use star() or hall_product() to multiply elements")
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1 / Fraction(c) if isinstance(c, int) else 1 / c)

    def __eq__(self, other):
        if not isinstance(other, HallElement):
            if other == 0:
                return not self.terms
            return NotImplemented
        return (self.quiver, self.q) == (other.quiver, other.q) and self.terms == other.terms

    def __hash__(self):
        return hash((self.q, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key):
        return self.terms.get(key, 0 if self.q is not None else RationalFunction())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def is_reduced(self) -> bool:
        return all(isinstance(k, HallBasisVector) for k in self.terms)

    def evaluate(self, q: int) -> "HallElement":
        """Specialize a symbolic element at -t = sqrt(q)."""
        if self.q is not None:
            if self.q != q:
                raise HallError("element already lives at another field size")
            return self
        return HallElement(self.quiver, q, {k: eval_at_q(c, q) for k, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        fmt = format_coefficient if self.q is None else format_scalar
        pieces = []
        for k, c in self.sorted_terms():
            txt, ntxt = fmt(c), fmt(-c)
            negative = txt.startswith("-") and not ntxt.startswith("-")
            shown = ntxt if negative else txt
            body = str(k)
            if body == "1":
                body = shown
            elif shown != "1":
                if _has_top_level_sign(shown):
                    shown = f"({shown})"
                body = f"{shown}*{body}"
            pieces.append(("-" if negative else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"HallElement({str(self)!r}, q={self.q})"

    def to_dict(self) -> dict:
        return {str(k): str(c) if self.q is None else format_scalar(c) for k, c in self.sorted_terms()}


def _has_top_level_sign(txt: str) -> bool:
    depth = 0
    for k, ch in enumerate(txt):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > 0 and txt[k - 1] not in "^e":
            return True
    return False


def unit_key(Q: Quiver) -> HallBasisVector:
    return HallBasisVector("0", "0", (0,) * Q.n)


# ---------------------------------------------------------------------------
# fixed-q context
# ---------------------------------------------------------------------------

def _check_cap(deg1: int, deg0: int) -> None:
    # measured per degree so that b_A, realized through K_A, fits whenever A does
    size = max(deg1, deg0)
    if size > fqrep.CAPS.max_dim:
        raise fqrep.SizeError(f"product of degree dimension {size} exceeds the cap {fqrep.CAPS.max_dim}")


class HallContext:
    """Caches for one quiver and one field size."""

    def __init__(self, quiver: Quiver, q: int):
        self.quiver = quiver
        self.q = q
        self.catalog = get_catalog(quiver, q)
        self.v = sqrt_of_q(q)
        self._lock = threading.RLock()
        self._module_cid: dict[str, int] = {}
        self._basis_cid: dict[tuple, int] = {}
        self._raw_cid: dict[str, int] = {}
        self._reduce_cache: dict[int, tuple] = {}
        self._raw_prod_cache: dict[tuple, dict] = {}
        self._star_cache: dict[tuple, dict] = {}
        self.zero = C(fqrep.zero_rep(quiver, q))
        self._register_module(self.catalog.classify(self.zero))

    # scalars ------------------------------------------------------------
    def vpow(self, k: int):
        """(-t)^k = sqrt(q)^k."""
        return _norm_scalar(self.v ** k)

    def scalar(self, c):
        if isinstance(c, RationalFunction):
            return _norm_scalar(eval_at_q(c, self.q))
        return _norm_scalar(c)

    def element(self, terms) -> HallElement:
        return HallElement(self.quiver, self.q, terms)

    # classes --------------------------------------------------------------
    def _register_module(self, cls: fqrep.CxClass) -> str:
        with self._lock:
            self._module_cid.setdefault(cls.label, cls.id)
        return cls.label

    def module_label(self, M: Rep) -> str:
        return self._register_module(self.catalog.classify(C(M)))

    def module_rep(self, label: str) -> Rep:
        cid = self._module_cid.get(label)
        if cid is None:
            raise HallError(f"unknown module class {label!r} at q = {self.q}")
        return self.catalog.classes[cid].rep.module()

    def module_dims(self, label: str) -> tuple[int, ...]:
        return self.catalog.classes[self._module_cid[label]].rep.dims0

    def raw_class(self, X: Cx2) -> fqrep.CxClass:
        cls = self.catalog.classify(X)
        with self._lock:
            self._raw_cid.setdefault(cls.label, cls.id)
        return cls

    def raw_key(self, X: Cx2) -> RawVector:
        return RawVector(self.raw_class(X).label)

    def raw_cid(self, key: RawVector) -> int:
        cid = self._raw_cid.get(key.label)
        if cid is None:
            raise HallError(f"unknown complex class {key.label!r} at q = {self.q}")
        return cid

    def basis_cid(self, key: HallBasisVector) -> int:
        pk = (key.pos, key.neg)
        cid = self._basis_cid.get(pk)
        if cid is None:
            parts = []
            if key.pos != "0":
                parts.append(C(self.module_rep(key.pos)))
            if key.neg != "0":
                parts.append(Cs(self.module_rep(key.neg)))
            X = direct_sum(*parts) if parts else self.zero
            cid = self.raw_class(X).id
            with self._lock:
                self._basis_cid[pk] = cid
        return cid

    def class_of(self, cid: int) -> fqrep.CxClass:
        return self.catalog.classes[cid]

    def gamma(self, key: HallBasisVector) -> int:
        return self.class_of(self.basis_cid(key)).gamma

    # reduction --------------------------------------------------------------
    def reduce_class(self, cid: int) -> tuple[HallBasisVector, object]:
        """delta_Z = f * delta(C(H^0) + Cs(H^1)) * b_gamma."""
        hit = self._reduce_cache.get(cid)
        if hit is not None:
            return hit
        cls = self.class_of(cid)
        h0, h1 = self.class_of(cls.h0), self.class_of(cls.h1)
        l0, l1 = self._register_module(h0), self._register_module(h1)
        gamma = tuple(a - b for a, b in zip(cls.im_d1, cls.im_d0))
        d0, d1 = h0.rep.dims0, h1.rep.dims0
        expo = euler_form(self.quiver, tuple(a - b for a, b in zip(d0, d1)), gamma)
        f = self.vpow(expo) * Fraction(h0.aut * h1.aut, cls.aut)
        out = (HallBasisVector(l0, l1, gamma), _norm_scalar(f))
        with self._lock:
            self._reduce_cache[cid] = out
        return out

    def reduce(self, x: HallElement) -> HallElement:
        out: dict = {}
        for k, c in x.terms.items():
            if isinstance(k, HallBasisVector):
                items = [(k, 1)]
            else:
                bk, f = self.reduce_class(self.raw_cid(k))
                items = [(bk, f)]
            for bk, f in items:
                v = c * f
                out[bk] = out[bk] + v if bk in out else v
        return self.element(out)

    # products ---------------------------------------------------------------
    def raw_product_classes(self, cx: int, cy: int) -> dict:
        """delta_X * delta_Y as {class id: coefficient}, twist included."""
        X, Y = self.class_of(cx).rep, self.class_of(cy).rep
        _check_cap(sum(X.dims1) + sum(Y.dims1), sum(X.dims0) + sum(Y.dims0))
        key = (cx, cy)
        hit = self._raw_prod_cache.get(key)
        if hit is not None:
            return hit
        expo = euler_form(self.quiver, X.dims1, Y.dims1) + euler_form(self.quiver, X.dims0, Y.dims0)
        tw = self.vpow(expo)
        out = {cid: _norm_scalar(tw * F) for cid, F in fqrep.hall_structure(X, Y).items()}
        for cid in out:
            with self._lock:
                self._raw_cid.setdefault(self.class_of(cid).label, cid)
        with self._lock:
            self._raw_prod_cache[key] = out
        return out

    def star_basis(self, k1: HallBasisVector, k2: HallBasisVector) -> dict:
        _check_cap(sum(self.module_dims(k1.neg)) + sum(self.module_dims(k2.neg)),
                   sum(self.module_dims(k1.pos)) + sum(self.module_dims(k2.pos)))
        key = (k1, k2)
        hit = self._star_cache.get(key)
        if hit is not None:
            return hit
        Q = self.quiver
        m2 = self.module_dims(k2.pos)
        n2 = self.module_dims(k2.neg)
        expo = sym_euler_form(Q, k1.alpha, tuple(a - b for a, b in zip(m2, n2)))
        tw = self.vpow(expo)
        alpha = tuple(a + b for a, b in zip(k1.alpha, k2.alpha))
        out: dict = {}
        for cid, c in self.raw_product_classes(self.basis_cid(k1), self.basis_cid(k2)).items():
            bk, f = self.reduce_class(cid)
            nk = HallBasisVector(bk.pos, bk.neg, tuple(a + b for a, b in zip(bk.alpha, alpha)))
            v = c * f * tw
            out[nk] = out[nk] + v if nk in out else v
        out = {k: _norm_scalar(v) for k, v in out.items() if v}
        with self._lock:
            self._star_cache[key] = out
        return out

    def star(self, x: HallElement, y: HallElement) -> HallElement:
        x, y = self.reduce(x), self.reduce(y)
        out: dict = {}
        for k1, c1 in x.terms.items():
            for k2, c2 in y.terms.items():
                for k, c in self.star_basis(k1, k2).items():
                    v = c1 * c2 * c
                    out[k] = out[k] + v if k in out else v
        return self.element(out)

    def to_raw(self, x: HallElement) -> HallElement:
        """Rewrite basis vectors as raw combinations (b_alpha realized through K and Ks)."""
        out: dict = {}
        for k, c in x.terms.items():
            if isinstance(k, RawVector):
                part = {k: 1}
            else:
                cid = self.basis_cid(k)
                delta = self.element({RawVector(self.class_of(cid).label): 1})
                part = self.hall_product(delta, self.b_raw(k.alpha)).terms
            for rk, rc in part.items():
                v = c * rc
                out[rk] = out[rk] + v if rk in out else v
        return self.element(out)

    def hall_product(self, x: HallElement, y: HallElement) -> HallElement:
        """Product on raw classes, before reduction."""
        x = x if all(isinstance(k, RawVector) for k in x.terms) else self.to_raw(x)
        y = y if all(isinstance(k, RawVector) for k in y.terms) else self.to_raw(y)
        out: dict = {}
        for k1, c1 in x.terms.items():
            for k2, c2 in y.terms.items():
                for cid, c in self.raw_product_classes(self.raw_cid(k1), self.raw_cid(k2)).items():
                    rk = RawVector(self.class_of(cid).label)
                    v = c1 * c2 * c
                    out[rk] = out[rk] + v if rk in out else v
        return self.element(out)

    # named elements -----------------------------------------------------
    def delta(self, X: Cx2, reduced: bool = True) -> HallElement:
        raw = self.element({self.raw_key(X): 1})
        return self.reduce(raw) if reduced else raw

    def delta_module(self, M: Rep) -> HallElement:
        return self.element({HallBasisVector(self.module_label(M), "0", (0,) * self.quiver.n): 1})

    def delta_comodule(self, N: Rep) -> HallElement:
        return self.element({HallBasisVector("0", self.module_label(N), (0,) * self.quiver.n): 1})

    def basis(self, M: Rep | None, N: Rep | None, alpha=None) -> HallElement:
        n = self.quiver.n
        pos = self.module_label(M) if M is not None else "0"
        neg = self.module_label(N) if N is not None else "0"
        return self.element({HallBasisVector(pos, neg, tuple(alpha) if alpha else (0,) * n): 1})

    def b_element(self, alpha) -> HallElement:
        return self.element({HallBasisVector("0", "0", tuple(alpha)): 1})

    def b_of_module(self, A: Rep) -> HallElement:
        """b_A = |Aut K_A| delta(K_A) as a raw element."""
        X = K(A)
        return self.element({self.raw_key(X): self.raw_class(X).aut})

    def bs_of_module(self, A: Rep) -> HallElement:
        X = Ks(A)
        return self.element({self.raw_key(X): self.raw_class(X).aut})

    def b_raw(self, alpha) -> HallElement:
        """Raw realization of b_alpha with semisimple A (positive part) and B (negative part)."""
        Q = self.quiver
        pos = tuple(max(a, 0) for a in alpha)
        neg = tuple(max(-a, 0) for a in alpha)
        out = self.element({self.raw_key(self.zero): 1})
        if any(pos):
            out = self.hall_product(out, self.b_of_module(fqrep.semisimple_rep(Q, self.q, pos)))
        if any(neg):
            out = self.hall_product(out, self.bs_of_module(fqrep.semisimple_rep(Q, self.q, neg)))
        return out

    def unit(self) -> HallElement:
        return self.element({unit_key(self.quiver): 1})


_contexts: dict[tuple, HallContext] = {}
_contexts_lock = threading.Lock()


def context(Q: Quiver, q: int) -> HallContext:
    key = (Q, q)
    ctx = _contexts.get(key)
    if ctx is None:
        with _contexts_lock:
            ctx = _contexts.get(key)
            if ctx is None:
                ctx = HallContext(Q, q)
                _contexts[key] = ctx
    return ctx


def _ctx_of(x: HallElement) -> HallContext:
    if x.q is None:
        raise HallError("symbolic elements must be evaluated at a field size first")
    return context(x.quiver, x.q)


def star(x: HallElement, y: HallElement, q: int | None = None) -> HallElement:
    if q is not None and x.q != q:
        raise HallError("field size mismatch")
    return _ctx_of(x).star(x, y)


def hall_product(x: HallElement, y: HallElement, q: int | None = None) -> HallElement:
    if q is not None and x.q != q:
        raise HallError("field size mismatch")
    return _ctx_of(x).hall_product(x, y)


def reduce(x: HallElement, q: int | None = None) -> HallElement:
    return _ctx_of(x).reduce(x)


def star_power(x: HallElement, k: int) -> HallElement:
    ctx = _ctx_of(x)
    out = ctx.unit()
    for _ in range(k):
        out = ctx.star(out, x)
    return out


def commutator(x: HallElement, y: HallElement) -> HallElement:
    ctx = _ctx_of(x)
    return ctx.star(x, y) - ctx.star(y, x)


# ---------------------------------------------------------------------------
# symbolic lifting and classical limit
# ---------------------------------------------------------------------------

def lift_symbolic(build: Callable[[int], HallElement], q_samples: Iterable[int],
                  degree_bound: int | None = None, mode: str = "auto") -> HallElement:
    """Reconstruct rational-function coefficients from values at several q.

    ``mode`` is "q" (fit in q = t^2), "v" (fit in v = -t) or "auto", which
    tries q first for a coefficient with rational values and otherwise v.
    """
    qs = sorted(set(q_samples))
    if not qs:
        raise ReconstructionError("no samples")
    values = [build(q) for q in qs]
    Q = values[0].quiver
    support = set(values[0].terms)
    for q, val in zip(qs, values):
        if any(isinstance(k, RawVector) for k in val.terms):
            raise ReconstructionError("raw classes cannot be lifted; reduce first")
        if set(val.terms) != support:
            raise ReconstructionError(f"support at q = {q} differs from q = {qs[0]}")
    out = {}
    for k in support:
        pts = [(q, val.terms[k]) for q, val in zip(qs, values)]
        out[k] = _lift_coefficient(pts, degree_bound, mode)
    return HallElement(Q, None, out)


def _lift_coefficient(pts, degree_bound, mode):
    rational = all(scalar_is_rational(c) for _, c in pts)
    if mode in ("auto", "q") and rational:
        try:
            return reconstruct_in_q([(q, scalar_to_fraction(c)) for q, c in pts], degree_bound)
        except ReconstructionError:
            if mode == "q":
                raise
    elif mode == "q":
        raise ReconstructionError("q-mode needs rational values")
    return reconstruct_in_v([(sqrt_of_q(q), c) for q, c in pts], degree_bound)


@dataclass(frozen=True)
class ClassicalElement:
    """Limit at t = -1: {(basis vector without b, h-vertex multiset): rational}."""

    quiver: Quiver
    terms: tuple

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __eq__(self, other):
        return isinstance(other, ClassicalElement) and self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for (key, hs), c in self.terms:
            word = [] if str(key) == "1" else [str(key)]
            word += [f"h({i + 1})" for i in hs]
            body = "*".join(word)
            a = abs(c)
            if not body:
                body = str(a)
            elif a != 1:
                body = f"{a}*{body}"
            pieces.append(("-" if c < 0 else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out


def h_element(Q: Quiver, alpha, coeff=1) -> ClassicalElement:
    """h_alpha = sum_i alpha_i h_i in the limit algebra."""
    unit = HallBasisVector("0", "0", (0,) * Q.n)
    terms = {(unit, (i,)): Fraction(coeff) * a for i, a in enumerate(alpha) if a}
    return ClassicalElement(Q, tuple(sorted(terms.items(), key=_cl_key)))


def _cl_key(kv):
    (key, hs), _ = kv
    return (_sort_key(key), hs)


def classical_limit_hall(x: HallElement) -> ClassicalElement:
    """Substitute b_alpha = prod_i (1 + (-t-1) h_i)^{alpha_i} and evaluate at t = -1."""
    if x.q is not None:
        raise HallError("classical limits need a symbolic element")
    order = max((-c.valuation_at_minus1() for c in x.terms.values()), default=0)
    order = max(order, 0)
    acc: dict = {}
    n = x.quiver.n
    for k, c in x.terms.items():
        if isinstance(k, RawVector):
            raise HallError("reduce before taking a classical limit")
        base = HallBasisVector(k.pos, k.neg, (0,) * n)
        for hs, coeff in _b_expansion(k.alpha, order).items():
            v = c * (_EPS ** len(hs)) * coeff
            key = (base, hs)
            acc[key] = acc[key] + v if key in acc else v
    out = {}
    for key, c in acc.items():
        if not c:
            continue
        verdict = localize_at_minus1(c)
        if not verdict.regular_at_minus1:
            from .ncpresent import ClassicalLimitError

            raise ClassicalLimitError(f"coefficient {format_coefficient(c)} of {key[0]} has a pole at t = -1")
        if verdict.value_at_minus1:
            out[key] = verdict.value_at_minus1
    return ClassicalElement(x.quiver, tuple(sorted(out.items(), key=_cl_key)))


def _binom_general(n: int, j: int) -> int:
    num, den = 1, 1
    for k in range(j):
        num *= n - k
        den *= k + 1
    return num // den


def _b_expansion(alpha, order: int) -> dict:
    terms = {(): 1}
    for i, a in enumerate(alpha):
        if not a:
            continue
        new: dict = {}
        for hs, c in terms.items():
            for j in range(order - len(hs) + 1):
                b = _binom_general(a, j)
                if b:
                    w = tuple(sorted(hs + (i,) * j))
                    new[w] = new.get(w, 0) + c * b
        terms = {w: c for w, c in new.items() if c}
    return terms


# ---------------------------------------------------------------------------
# generator images
# ---------------------------------------------------------------------------

STANDARD = "standard"
ACYCLIC = "acyclic"


def projective_resolution_complex(Q: Quiver, q: int, i: int, dual: bool = False) -> Cx2:
    """rad P_i -> P_i in degrees (1, 0), or with the degrees swapped when ``dual``."""
    P = fqrep.projective_rep(Q, q, i)
    rad = projective_data(Q)[Q.vertices[i]].radical
    # the trivial path at i is the first basis vector there; no other path ends at i
    keep = [list(range(1 if v == i else 0, P.dims[v])) for v in range(Q.n)]
    rmaps = tuple(tuple(tuple(P.maps[h][r][c] for c in keep[s]) for r in keep[t])
                  for h, (s, t) in enumerate(Q.arrow_indices))
    inc = [[[1 if r == keep[v][c] else 0 for c in range(rad[v])] for r in range(P.dims[v])] for v in range(Q.n)]
    if not dual:
        zero = [[[0] * P.dims[v] for _ in range(rad[v])] for v in range(Q.n)]
        return fqrep.complex_from_parts(Q, q, rad, P.dims, rmaps, P.maps, inc, zero)
    zero = [[[0] * rad[v] for _ in range(P.dims[v])] for v in range(Q.n)]
    neg = [[[fqrep.check_q(q).neg(x) for x in row] for row in m] for m in inc]
    return fqrep.complex_from_parts(Q, q, P.dims, rad, P.maps, rmaps, zero, neg)


def bb_generator_image(ctx: HallContext, kind: str, i: int, l: int = 1, variant: str = STANDARD,
                       symbolic: bool = False) -> HallElement:
    """Image of e_{il} (kind "E"), f_{il} ("F") or K_i^{l} ("K", l may be negative).

    The acyclic variant builds e_i and f_i from the projective resolution
    0 -> rad P_i -> P_i -> S_i -> 0 twisted by b_{rad P_i}; it is available at
    a fixed q only.
    """
    Q = ctx.quiver
    n = Q.n
    e_i = tuple(1 if j == i else 0 for j in range(n))
    if kind == "K":
        key = HallBasisVector("0", "0", tuple(l * x for x in e_i))
        return HallElement(Q, None, {key: 1}) if symbolic else ctx.element({key: 1})
    if kind not in ("E", "F"):
        raise HallError(f"unknown generator kind {kind!r}")
    if variant == ACYCLIC:
        if l != 1:
            raise HallError("the acyclic images exist for l = 1 only")
        if symbolic:
            raise HallError("the acyclic images are computed at a fixed q")
        rad = projective_data(Q)[Q.vertices[i]].radical
        phi = phi_twist_exponent(Q, Q.vertices[i])
        cx = ctx.delta(projective_resolution_complex(Q, ctx.q, i, dual=(kind == "F")))
        if kind == "E":
            b = ctx.b_element(tuple(-x for x in rad))
            return ctx.star(b, cx).scale(ctx.vpow(phi))
        return ctx.star(ctx.b_element(rad), cx).scale(ctx.vpow(1 + phi))
    if variant != STANDARD:
        raise HallError(f"unknown image variant {variant!r}")
    lab = ctx.module_label(fqrep.simple_rep(Q, ctx.q, i, l))
    alpha = (0,) * n
    key = HallBasisVector(lab, "0", alpha) if kind == "E" else HallBasisVector("0", lab, alpha)
    pref = MINUS_T ** (l * l - l)
    if symbolic:
        return HallElement(Q, None, {key: pref})
    return ctx.element({key: ctx.scalar(pref)})


def image_of_ncpoly(p: NCPoly, ctx: HallContext, variant: str = STANDARD) -> HallElement:
    """Evaluate a quantum polynomial on the generator images at the context's q."""
    out = ctx.element({})
    for w, c in p.terms.items():
        acc = ctx.unit().scale(ctx.scalar(c))
        for g in w:
            if g.kind == "H":
                img = (bb_generator_image(ctx, "K", g.i, 1, variant) - ctx.unit()).scale(ctx.scalar(1 / _EPS))
            elif g.kind == "K":
                img = bb_generator_image(ctx, "K", g.i, g.exp, variant)
            else:
                img = bb_generator_image(ctx, g.kind, g.i, g.l, variant)
            acc = ctx.star(acc, img)
        out = out + acc
    return out


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

PASS, FAIL, SKIP = "pass", "fail", "skipped"


@dataclass
class CaseRecord:
    id: str
    lhs: str
    rhs: str
    status: str
    reason: str = ""

    def to_dict(self) -> dict:
        d = {"id": self.id, "lhs": self.lhs, "rhs": self.rhs, "status": self.status}
        if self.reason:
            d["reason"] = self.reason
        return d


@dataclass
class VerificationReport:
    suite: str
    quiver: str
    q: list
    cases: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, case_id: str, lhs, rhs, ok: bool | None = None, reason: str = "") -> CaseRecord:
        if ok is None:
            ok = lhs == rhs
        rec = CaseRecord(case_id, str(lhs), str(rhs), PASS if ok else FAIL, reason)
        self.cases.append(rec)
        return rec

    def skip(self, case_id: str, reason: str) -> None:
        self.cases.append(CaseRecord(case_id, "", "", SKIP, reason))

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.cases.extend(other.cases)
        self.notes.extend(other.notes)
        self.q = sorted(set(self.q) | set(other.q))
        return self

    @property
    def summary(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.cases:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.summary[FAIL] == 0 and bool(self.cases)

    def sorted(self) -> "VerificationReport":
        self.cases.sort(key=lambda c: c.id)
        return self

    def to_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "quiver": self.quiver,
            "q": list(self.q),
            "cases": [c.to_dict() for c in sorted(self.cases, key=lambda c: c.id)],
            "summary": self.summary,
        }
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_text(self) -> str:
        lines = [f"suite {self.suite} on {self.quiver}, q = {','.join(map(str, self.q))}"]
        for c in sorted(self.cases, key=lambda c: c.id):
            line = f"  [{c.status}] {c.id}"
            if c.status == FAIL:
                line += f"\n      lhs: {c.lhs}\n      rhs: {c.rhs}"
            if c.reason:
                line += f" ({c.reason})"
            lines.append(line)
        s = self.summary
        lines.append(f"summary: {s[PASS]} pass, {s[FAIL]} fail, {s[SKIP]} skipped")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines)


def quiver_name(Q: Quiver) -> str:
    return f"Q(vertices={list(Q.vertices)}, arrows={[list(a) for a in Q.arrows]})"


def _run_cases(cases, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda fn: fn(), cases))
    return [fn() for fn in cases]


def _guard(report: VerificationReport, case_id: str, fn):
    try:
        fn()
    except (fqrep.SizeError, ReconstructionError) as exc:
        report.skip(case_id, str(exc))


def _vec(Q: Quiver, i: int, k: int = 1):
    return tuple(k if j == i else 0 for j in range(Q.n))


def verify_eikfil(Q: Quiver, i: int, k: int, l: int, q: int) -> VerificationReport:
    """delta(C(S^k)) * delta(Cs(S^l)) against the closed-form sum, and the reversed order."""
    rep = VerificationReport("eikfil", quiver_name(Q), [q])
    ctx = context(Q, q)

    def run():
        a_ii = cartan_matrix(Q).a(i, i)
        Sk, Sl = fqrep.simple_rep(Q, q, i, k), fqrep.simple_rep(Q, q, i, l)
        ek, fl = ctx.delta_module(Sk), ctx.delta_comodule(Sl)
        lhs = ctx.star(ek, fl)
        lhs_rev = ctx.star(fl, ek)
        rhs = ctx.element({})
        rhs_rev = ctx.element({})
        tinv2 = RationalFunction.t_power(-2)
        for r in range(min(k, l) + 1):
            coef = tinv2 ** (r * (k + l - r)) / phi_factor(r, -2)
            M = fqrep.simple_rep(Q, q, i, k - r)
            N = fqrep.simple_rep(Q, q, i, l - r)
            rhs = rhs + ctx.basis(M, N, _vec(Q, i, -r)).scale(ctx.scalar(minus_t_power_i(a_ii, r * (l - k)) * coef))
            rhs_rev = rhs_rev + ctx.basis(M, N, _vec(Q, i, r)).scale(
                ctx.scalar(minus_t_power_i(a_ii, -r * (l - k)) * coef))
        rep.add(f"q={q} i={i + 1} k={k} l={l} C*Cs", lhs, rhs)
        rep.add(f"q={q} i={i + 1} k={k} l={l} Cs*C", lhs_rev, rhs_rev)

    _guard(rep, f"q={q} i={i + 1} k={k} l={l}", run)
    return rep


def commutation_sides(ctx: HallContext, i: int, k: int, l: int, form: str = "printed"):
    """Both sides of the commutation identity between C(S^k) and Cs(S^l) terms."""
    Q, q = ctx.quiver, ctx.q
    a_ii = cartan_matrix(Q).a(i, i)
    if form == "printed":
        lhs, rhs = ctx.element({}), ctx.element({})
        for r in range(min(k, l) + 1):
            c = RationalFunction.t_power(-2 * r * (k + l) + 2 * r * (r + 1)) / phi_factor(r, 2)
            ek = ctx.delta_module(fqrep.simple_rep(Q, q, i, k - r))
            fl = ctx.delta_comodule(fqrep.simple_rep(Q, q, i, l - r))
            left = ctx.star(ctx.star(ek, fl), ctx.b_element(_vec(Q, i, -r)))
            right = ctx.star(ctx.star(fl, ek), ctx.b_element(_vec(Q, i, r)))
            lhs = lhs + left.scale(ctx.scalar(minus_t_power_i(a_ii, r * (l - k)) * c))
            rhs = rhs + right.scale(ctx.scalar(minus_t_power_i(a_ii, -r * (l - k)) * c))
        return lhs, rhs
    if form == "transcribed":
        # the nu-sum relation for e_{il} f_{ik} mapped through the generator images
        P = quantum_presentation(cartan_matrix(Q, l_max=max(k, l, 1)))
        lp, rp = nu_relation_sides(P, i, l, k)
        return image_of_ncpoly(lp, ctx), image_of_ncpoly(rp, ctx)
    raise HallError(f"unknown form {form!r}")


def verify_commutation(Q: Quiver, i: int, k: int, l: int, q: int) -> VerificationReport:
    rep = VerificationReport("commutation", quiver_name(Q), [q])
    ctx = context(Q, q)

    def run():
        lhs, rhs = commutation_sides(ctx, i, k, l, "printed")
        rec = rep.add(f"q={q} i={i + 1} k={k} l={l} printed", lhs, rhs)
        if rec.status == FAIL:
            lt, rt = commutation_sides(ctx, i, k, l, "transcribed")
            rep.add(f"q={q} i={i + 1} k={k} l={l} transcribed", lt, rt)
            held = "transcribed" if lt == rt else "neither"
            rep.notes.append(f"k={k} l={l} q={q}: printed form fails; {held} form holds")

    _guard(rep, f"q={q} i={i + 1} k={k} l={l}", run)
    return rep


def verify_serre(Q: Quiver, i: int, j: int, l: int, q: int, sign_variant: str = "signed",
                 image_variant: str = STANDARD) -> VerificationReport:
    """Serre sums on both sides mapped through the generator images must vanish."""
    rep = VerificationReport(f"serre-{sign_variant}", quiver_name(Q), [q])
    ctx = context(Q, q)

    def run():
        P = quantum_presentation(cartan_matrix(Q, l_max=max(l, 1)), serre_sign_variant=sign_variant)
        for side in ("E", "F"):
            img = image_of_ncpoly(serre_sum(P, side, i, j, l), ctx, image_variant)
            rep.add(f"q={q} {side} i={i + 1} j={j + 1} l={l} {sign_variant}", img, ctx.element({}))

    _guard(rep, f"q={q} i={i + 1} j={j + 1} l={l}", run)
    return rep


def serre_variant_verdict(Q: Quiver, i: int, j: int, l: int, qs: Sequence[int]) -> dict:
    """For each sign variant, whether the Serre images vanish at every q."""
    return {v: all(verify_serre(Q, i, j, l, q, v).ok for q in qs) for v in ("signed", "unsigned")}


def verify_b_relations(Q: Quiver, q: int, modules: Sequence[Rep] | None = None) -> VerificationReport:
    """b_A * b_B = b_{A+B}, K/C twists, b_alpha twist against basis elements and b_alpha b_-alpha = 1."""
    rep = VerificationReport("b-relations", quiver_name(Q), [q])
    ctx = context(Q, q)
    mods = list(modules) if modules is not None else default_b_modules(Q, q)

    def run():
        for a_idx, A in enumerate(mods):
            la = ctx.module_label(A)
            for b_idx, B in enumerate(mods):
                lb = ctx.module_label(B)
                tag = f"q={q} A={la} B={lb}"
                lhs = ctx.reduce(ctx.hall_product(ctx.b_of_module(A), ctx.b_of_module(B)))
                rhs = ctx.reduce(ctx.b_of_module(fqrep.rep_direct_sum(A, B)))
                rep.add(f"{tag} b-product", lhs, rhs)
                alpha = tuple(x + y for x, y in zip(A.dims, B.dims))
                rep.add(f"{tag} product=b_alpha", lhs, ctx.b_element(alpha))
                bA = ctx.reduce(ctx.b_of_module(A))
                cB, csB = ctx.delta_module(B), ctx.delta_comodule(B)
                s = sym_euler_form(Q, A.dims, B.dims)
                rep.add(f"{tag} twist-C", ctx.star(bA, cB), ctx.star(cB, bA).scale(ctx.vpow(s)))
                rep.add(f"{tag} twist-Cs", ctx.star(bA, csB), ctx.star(csB, bA).scale(ctx.vpow(-s)))
                bsA = ctx.reduce(ctx.bs_of_module(A))
                rep.add(f"{tag} dual-twist-C", ctx.star(bsA, cB), ctx.star(cB, bsA).scale(ctx.vpow(-s)))
            bA = ctx.reduce(ctx.b_of_module(A))
            bsA = ctx.reduce(ctx.bs_of_module(A))
            rep.add(f"q={q} A={la} b_A*bs_A", ctx.star(bA, bsA), ctx.unit())
        for y in basis_sample(ctx, mods):
            for alpha in _alpha_sample(Q):
                k = next(iter(y.terms))
                e = sym_euler_form(Q, alpha, tuple(a - b for a, b in zip(ctx.module_dims(k.pos), ctx.module_dims(k.neg))))
                b = ctx.b_element(alpha)
                rep.add(f"q={q} alpha={list(alpha)} y={k} twist", ctx.star(b, y), ctx.star(y, b).scale(ctx.vpow(e)))
                b2 = ctx.b_element(tuple(-x for x in alpha))
                rep.add(f"q={q} alpha={list(alpha)} y={k} merge", ctx.star(ctx.star(b, b2), y), y)

    _guard(rep, f"q={q}", run)
    return rep


def default_b_modules(Q: Quiver, q: int) -> list[Rep]:
    """S, S^2 and J_2 at a looped vertex; simples, a square and P_1 for acyclic quivers."""
    mods = [fqrep.simple_rep(Q, q, 0), fqrep.simple_rep(Q, q, 0, 2)]
    if any(s == t for s, t in Q.arrow_indices):
        mods.append(fqrep.jordan_rep(Q, q, 2))
    if Q.n > 1:
        mods.append(fqrep.simple_rep(Q, q, 1))
    if Q.is_acyclic() and Q.arrows:
        mods.append(fqrep.projective_rep(Q, q, 0))
    return mods


def _alpha_sample(Q: Quiver):
    out = [tuple(1 if j == i else 0 for j in range(Q.n)) for i in range(Q.n)]
    out.append(tuple(-1 if j == 0 else 0 for j in range(Q.n)))
    if Q.n > 1:
        out.append(tuple(1 if j == 0 else -1 if j == 1 else 0 for j in range(Q.n)))
    return out


def basis_sample(ctx: HallContext, mods: Sequence[Rep]) -> list[HallElement]:
    out = []
    for M in mods:
        out.append(ctx.basis(M, None))
        out.append(ctx.basis(None, M))
    out.append(ctx.basis(mods[0], mods[0]))
    return out


def central_twist_exponent(Q: Quiver, kcls: fqrep.CxClass, beta1, beta0) -> int:
    """Exponent E with delta_K * y = (-t)^E y * delta_K for an acyclic K."""
    K1, K0 = kcls.rep.dims1, kcls.rep.dims0
    i1, i0 = kcls.im_d1, kcls.im_d0  # images of k^1 and k^0

    def lin(a, b, c=1):
        return tuple(x + c * y for x, y in zip(a, b))

    return (
        euler_form(Q, lin(K1, i1, -2), beta1)
        + euler_form(Q, lin(K0, i0, -2), beta0)
        + euler_form(Q, beta1, lin(tuple(2 * x for x in i0), K1, -1))
        + euler_form(Q, beta0, lin(tuple(2 * x for x in i1), K0, -1))
    )


def verify_central_twist(Q: Quiver, Kcx: Cx2, targets: Sequence[Cx2], q: int) -> VerificationReport:
    """delta_K * delta_Y = (-t)^E delta_Y * delta_K after reduction."""
    rep = VerificationReport("central-twist", quiver_name(Q), [q])
    ctx = context(Q, q)

    def run():
        kcls = ctx.raw_class(Kcx)
        if not kcls.is_acyclic():
            raise HallError("the twisting complex must be acyclic")
        dk = ctx.delta(Kcx)
        for Y in targets:
            ycls = ctx.raw_class(Y)
            E = central_twist_exponent(Q, kcls, Y.dims1, Y.dims0)
            dy = ctx.delta(Y)
            rep.add(f"q={q} K={kcls.label} Y={ycls.label}", ctx.star(dk, dy), ctx.star(dy, dk).scale(ctx.vpow(E)))

    _guard(rep, f"q={q}", run)
    return rep


def verify_divided_power(Q: Quiver, X: Callable[[int], Rep], k: int, q_samples: Sequence[int],
                         degree_bound: int | None = None) -> VerificationReport:
    """Leading coefficient of the k-th star power of delta(C(X)) at t = -1 is k!."""
    rep = VerificationReport("divided-power", quiver_name(Q), sorted(q_samples))

    def build(q):
        ctx = context(Q, q)
        return star_power(ctx.delta_module(X(q)), k)

    def run():
        sym = lift_symbolic(build, q_samples, degree_bound)
        q0 = min(q_samples)
        ctx = context(Q, q0)
        full = HallBasisVector(ctx.module_label(fqrep.rep_direct_sum(*[X(q0)] * k)), "0", (0,) * Q.n)
        lead = localize_at_minus1(sym.coefficient(full))
        rep.add(f"k={k} leading", lead.value_at_minus1, Fraction(factorial(k)))
        for key, c in sym.sorted_terms():
            if key == full:
                continue
            verdict = localize_at_minus1(c)
            if verdict.regular_at_minus1 and verdict.value_at_minus1 == 0:
                continue
            g = ctx.gamma(key)
            rep.add(f"k={k} term {key} gamma", g, f"< {k}", g < k)

    _guard(rep, f"k={k}", run)
    return rep


def verify_classical_bracket(Q: Quiver, i: int, q_samples: Sequence[int],
                             degree_bound: int | None = None) -> VerificationReport:
    """[e, -f] = h_i in the limit, with e = delta(C(S_i)) and f = delta(Cs(S_i))."""
    rep = VerificationReport("classical-bracket", quiver_name(Q), sorted(q_samples))

    def build(q):
        ctx = context(Q, q)
        S = fqrep.simple_rep(Q, q, i)
        e_, f_ = ctx.delta_module(S), ctx.delta_comodule(S)
        return ctx.star(e_, -f_) - ctx.star(-f_, e_)

    def run():
        sym = lift_symbolic(build, q_samples, degree_bound)
        lim = classical_limit_hall(sym)
        rep.add(f"i={i + 1} [e,-f]", lim, h_element(Q, _vec(Q, i)))

    _guard(rep, f"i={i + 1}", run)
    return rep


def quantum_relation_cases(Q: Quiver, max_l: int = 2, include_serre: bool = True,
                           sign_variant: str = "signed", variant: str = STANDARD) -> list:
    """(name, lhs, rhs) polynomial pairs for the defining relations of the images.

    The acyclic images satisfy the quantum group relations normalized as
    e_i f_i - f_i e_i = (K_i - K_i^-1) / (v^-1 - v) with v = -t.
    """
    from .ncpresent import e as ne, f as nf, K as nK, relation_instances, serre_instances

    if variant == ACYCLIC:
        max_l = 1
    P = quantum_presentation(cartan_matrix(Q, l_max=max_l), serre_sign_variant=sign_variant)
    cases = [(r.name, r.lhs, r.rhs) for r in relation_instances(P, max_l)]
    if variant == ACYCLIC:
        scale = RationalFunction((0, 1), (-1, 0, 1))  # 1 / (v^-1 - v) = t / (t^2 - 1)
        cases = [c for c in cases if not c[0].startswith("ef-exchange")]
        for i in range(Q.n):
            cases.append((f"ef-bracket i={i + 1}", ne(i) * nf(i) - nf(i) * ne(i),
                          (nK(i) - nK(i, -1)) * scale))
    if include_serre:
        cases += [(r.name, r.lhs, r.rhs) for r in serre_instances(P, max_l)]
    return cases


def verify_quantum_relations(Q: Quiver, q: int, max_l: int = 2, variant: str = STANDARD,
                             sign_variant: str = "signed", include_serre: bool = True,
                             threads: int = 1) -> VerificationReport:
    """Every defining relation holds for the generator images at this q."""
    rep = VerificationReport(f"quantum-relations-{variant}", quiver_name(Q), [q])
    ctx = context(Q, q)
    cases = quantum_relation_cases(Q, max_l, include_serre, sign_variant, variant)

    def make(name, lhs, rhs):
        def fn():
            try:
                return (name, image_of_ncpoly(lhs, ctx, variant), image_of_ncpoly(rhs, ctx, variant), None)
            except (fqrep.SizeError, HallError) as exc:
                return (name, None, None, str(exc))
        return fn

    for name, l_img, r_img, err in _run_cases([make(*c) for c in cases], threads):
        if err:
            rep.skip(f"q={q} {name}", err)
        else:
            rep.add(f"q={q} {name}", l_img, r_img)
    return rep.sorted()


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------

_MOD_TERM = re.compile(r"^(?:S(?P<sv>\w+?)(?:\^(?P<sk>\d+))?|J(?P<jk>\d+)|P(?P<pv>\w+)|#(?P<id>\d+)|(?P<zero>0))$")


def parse_module(text: str, Q: Quiver, q: int) -> Rep:
    """Module literal: summands S<v>^k, J<k>, P<v>, #<class id>, 0 or an indecomposable label, joined by +."""
    cat = get_catalog(Q, q)
    parts = []
    for raw in _split_top(text.strip(), "+"):
        term = raw.strip()
        if not term:
            raise HallError(f"empty summand in module {text!r}")
        ent = cat.indec_by_label(term)
        if ent is not None and ent.rep.is_module():
            parts.append(ent.rep.module())
            continue
        m = _MOD_TERM.match(term)
        if not m:
            raise HallError(f"cannot read module summand {term!r}")
        if m.group("sv") is not None:
            v = m.group("sv")
            if v not in Q.index:
                raise HallError(f"unknown vertex {v!r}")
            parts.append(fqrep.simple_rep(Q, q, Q.index[v], int(m.group("sk") or 1)))
        elif m.group("jk"):
            parts.append(fqrep.jordan_rep(Q, q, int(m.group("jk"))))
        elif m.group("pv"):
            v = m.group("pv")
            if v not in Q.index:
                raise HallError(f"unknown vertex {v!r}")
            parts.append(fqrep.projective_rep(Q, q, Q.index[v]))
        elif m.group("id"):
            cid = int(m.group("id"))
            if cid >= len(cat.classes) or not cat.classes[cid].rep.is_module():
                raise HallError(f"#{cid} is not a module class")
            parts.append(cat.classes[cid].rep.module())
        else:
            parts.append(fqrep.zero_rep(Q, q))
    return fqrep.rep_direct_sum(*parts)


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


class _HallParser:
    """Recursive descent over the raw text."""

    def __init__(self, text: str, ctx: HallContext, reduced: bool):
        self.s, self.i, self.ctx, self.reduced = text, 0, ctx, reduced

    def error(self, msg):
        raise HallError(f"{msg} at position {self.i} in {self.s!r}")

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, k=1):
        self.ws()
        return self.s[self.i:self.i + k]

    def eat(self, tok):
        self.ws()
        if not self.s.startswith(tok, self.i):
            self.error(f"expected {tok!r}")
        self.i += len(tok)

    def product(self, x, y):
        if isinstance(x, HallElement) and isinstance(y, HallElement):
            return self.ctx.star(x, y) if self.reduced else self.ctx.hall_product(x, y)
        if isinstance(x, HallElement):
            return x.scale(y)
        if isinstance(y, HallElement):
            return y.scale(x)
        return x * y

    def add(self, x, y, sign=1):
        if not isinstance(x, HallElement) and not isinstance(y, HallElement):
            return x + sign * y
        x = x if isinstance(x, HallElement) else self.ctx.unit().scale(x) if self.reduced else self.unit_raw().scale(x)
        y = y if isinstance(y, HallElement) else self.ctx.unit().scale(y) if self.reduced else self.unit_raw().scale(y)
        return x + y.scale(sign)

    def unit_raw(self):
        return self.ctx.element({self.ctx.raw_key(self.ctx.zero): 1})

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.peek() == "-" else 1
            self.i += 1
        acc = self.term()
        if sign < 0:
            acc = acc.scale(-1) if isinstance(acc, HallElement) else -acc
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.i += 1
            acc = self.add(acc, self.term(), -1 if op == "-" else 1)
        return acc

    def term(self):
        acc = self.power()
        while self.peek() in ("*", "/"):
            op = self.peek()
            self.i += 1
            rhs = self.power()
            if op == "*":
                acc = self.product(acc, rhs)
            else:
                if isinstance(rhs, HallElement):
                    self.error("cannot divide by an element")
                acc = acc.scale(1 / rhs) if isinstance(acc, HallElement) else acc / rhs
        return acc

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            neg = False
            if self.peek() == "-":
                neg = True
                self.i += 1
            n = self.number()
            if isinstance(base, HallElement):
                if neg:
                    self.error("negative power of an element")
                out = self.ctx.unit() if self.reduced else self.unit_raw()
                for _ in range(n):
                    out = self.product(out, base)
                return out
            return base ** (-n if neg else n)
        return base

    def number(self):
        self.ws()
        m = re.match(r"\d+", self.s[self.i:])
        if not m:
            self.error("expected a number")
        self.i += m.end()
        return int(m.group())

    def balanced(self, open_ch, close_ch):
        self.eat(open_ch)
        depth, start = 1, self.i
        while self.i < len(self.s):
            ch = self.s[self.i]
            if ch == open_ch:
                depth += 1
            elif ch == close_ch:
                depth -= 1
                if depth == 0:
                    body = self.s[start:self.i]
                    self.i += 1
                    return body
            self.i += 1
        self.error(f"unbalanced {open_ch!r}")

    def complex_atom(self):
        """C(..), Cs(..), K(..), Ks(..) or #id as a complex."""
        ctx, Q, q = self.ctx, self.ctx.quiver, self.ctx.q
        self.ws()
        for name, fn in (("Cs", Cs), ("Ks", Ks), ("C", C), ("K", K)):
            if self.s.startswith(name + "(", self.i):
                self.i += len(name)
                body = self.balanced("(", ")")
                return fn(parse_module(body, Q, q)), name
        if self.s.startswith("#", self.i):
            self.i += 1
            if self.peek() == "[":
                label = self.balanced("[", "]")
                cid = ctx._raw_cid.get(label)
                if cid is None:
                    self.error(f"unknown class label {label!r}")
                return ctx.class_of(cid).rep, "#"
            cid = self.number()
            if cid >= len(ctx.catalog.classes):
                self.error(f"no catalog class #{cid}")
            return ctx.class_of(cid).rep, "#"
        return None, None

    def atom(self):
        ctx = self.ctx
        self.ws()
        if self.i >= len(self.s):
            self.error("unexpected end of input")
        ch = self.s[self.i]
        if ch.isdigit():
            return Fraction(self.number())
        if ch == "(":
            self.i += 1
            v = self.expr()
            self.eat(")")
            return v
        if ch == "{":
            from .exactscalar import parse_rational_function

            body = self.balanced("{", "}")
            return ctx.scalar(parse_rational_function(body))
        if self.s.startswith("t", self.i) and not self.s[self.i + 1:self.i + 2].isalpha():
            self.i += 1
            return ctx.scalar(RationalFunction.t())
        for name, sgn in (("bs(", -1), ("b(", 1)):
            if self.s.startswith(name, self.i):
                self.i += len(name) - 1
                body = self.balanced("(", ")").strip()
                try:
                    vec = json.loads(body)
                except ValueError:
                    self.error(f"bad vector {body!r}")
                if not isinstance(vec, list) or len(vec) != ctx.quiver.n or not all(isinstance(x, int) for x in vec):
                    self.error(f"vector must list {ctx.quiver.n} integers")
                alpha = tuple(sgn * x for x in vec)
                return ctx.b_element(alpha) if self.reduced else ctx.b_raw(alpha)
        if ch == "[":
            start = self.i
            body = self.balanced("[", "]")
            if len(_split_top(body, ",")) == 2:
                self.i = start + 1
                x = self.expr()
                self.eat(",")
                y = self.expr()
                self.eat("]")
                return self.add(self.product(x, y), self.product(y, x), -1)
            parts = []
            sub = _HallParser(body, ctx, self.reduced)
            while True:
                cx, _ = sub.complex_atom()
                if cx is None:
                    sub.error("expected a complex inside [ ]")
                parts.append(cx)
                if sub.peek() == "+":
                    sub.i += 1
                    continue
                sub.ws()
                if sub.i != len(sub.s):
                    sub.error("trailing input inside [ ]")
                break
            return ctx.delta(direct_sum(*parts), self.reduced)
        cx, kind = self.complex_atom()
        if cx is not None:
            if self.reduced and kind == "C":
                return ctx.delta_module(cx.module())
            if self.reduced and kind == "Cs":
                return ctx.delta_comodule(cx.degree_rep(1))
            return ctx.delta(cx, self.reduced)
        self.error(f"unexpected character {ch!r}")


def parse_hall(text: str, Q: Quiver, q: int, reduced: bool = True) -> HallElement:
    """Evaluate a Hall expression at q; ``*`` is the reduced product when ``reduced``."""
    ctx = context(Q, q)
    p = _HallParser(text, ctx, reduced)
    try:
        v = p.expr()
    except (fqrep.RepError, KeyError) as exc:
        raise HallError(str(exc)) from exc
    p.ws()
    if p.i != len(p.s):
        p.error("trailing input")
    if not isinstance(v, HallElement):
        v = (ctx.unit() if reduced else p.unit_raw()).scale(v)
    return v
