"""Quivers with loops, Euler forms, Borcherds-Cartan data and projective
resolution data of acyclic quivers."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence


class QuiverError(ValueError):
    """Malformed quiver input."""


class UnsupportedQuiverError(QuiverError):
    """The operation needs an acyclic quiver."""


@dataclass(frozen=True)
class Quiver:
    """A finite quiver; arrows are (source, target) pairs, loops allowed."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(
            self, "arrows", tuple((str(s), str(t)) for s, t in self.arrows)
        )
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("vertex labels must be unique")
        known = set(self.vertices)
        for s, t in self.arrows:
            if s not in known or t not in known:
                raise QuiverError(f"arrow ({s}, {t}) uses an undeclared vertex")

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def arrow_indices(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.index[s], self.index[t]) for s, t in self.arrows)

    def loops_at(self, v: str) -> int:
        return sum(1 for s, t in self.arrows if s == t == v)

    def arrows_between(self, a: str, b: str) -> int:
        return sum(1 for s, t in self.arrows if s == a and t == b)

    def is_acyclic(self) -> bool:
        indeg = Counter(t for _, t in self.arrow_indices)
        out: dict[int, list[int]] = {}
        for s, t in self.arrow_indices:
            out.setdefault(s, []).append(t)
        stack = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for w in out.get(v, []):
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
        return seen == self.n

    def simple(self, v: str | int) -> tuple[int, ...]:
        i = v if isinstance(v, int) else self.index[v]
        return tuple(1 if j == i else 0 for j in range(self.n))

    def to_json(self) -> str:
        return json.dumps({"vertices": list(self.vertices), "arrows": [list(a) for a in self.arrows]})

    @classmethod
    def from_json(cls, text: str) -> "Quiver":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise QuiverError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict) or "vertices" not in data:
            raise QuiverError("quiver file needs a 'vertices' list")
        arrows = data.get("arrows", [])
        for k, a in enumerate(arrows):
            if not (isinstance(a, list) and len(a) == 2):
                raise QuiverError(f"arrow {k} must be a [source, target] pair")
        return cls(tuple(data["vertices"]), tuple(tuple(a) for a in arrows))

    @classmethod
    def load(cls, path: str) -> "Quiver":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# standard quivers used throughout the tests and the CLI
def jordan_quiver() -> Quiver:
    return Quiver(("1",), (("1", "1"),))


def loop_quiver(g: int) -> Quiver:
    return Quiver(("1",), (("1", "1"),) * g)


def point_quiver() -> Quiver:
    return Quiver(("1",), ())


def a2_quiver() -> Quiver:
    return Quiver(("1", "2"), (("1", "2"),))


def kronecker_quiver() -> Quiver:
    return Quiver(("1", "2"), (("1", "2"), ("1", "2")))


def discrete_quiver(n: int) -> Quiver:
    return Quiver(tuple(str(i + 1) for i in range(n)), ())


DimVector = tuple[int, ...]


def as_vector(Q: Quiver, alpha: Sequence[int] | Mapping[str, int]) -> DimVector:
    if isinstance(alpha, Mapping):
        for v in alpha:
            if v not in Q.index:
                raise QuiverError(f"unknown vertex {v!r}")
        return tuple(int(alpha.get(v, 0)) for v in Q.vertices)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != Q.n:
        raise QuiverError(f"dimension vector of length {len(alpha)} for {Q.n} vertices")
    return alpha


def euler_form(Q: Quiver, alpha, beta) -> int:
    """<alpha, beta> = sum_i alpha_i beta_i - sum_h alpha_s(h) beta_t(h)."""
    a, b = as_vector(Q, alpha), as_vector(Q, beta)
    return sum(x * y for x, y in zip(a, b)) - sum(a[s] * b[t] for s, t in Q.arrow_indices)


def sym_euler_form(Q: Quiver, alpha, beta) -> int:
    return euler_form(Q, alpha, beta) + euler_form(Q, beta, alpha)


@dataclass(frozen=True)
class CartanData:
    """Symmetric even Borcherds-Cartan matrix with its index-set classification."""

    labels: tuple[Hashable, ...]
    matrix: tuple[tuple[int, ...], ...]
    l_max: int = 3
    charge: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.labels)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise QuiverError("Cartan matrix must be square")
        for i in range(n):
            if self.matrix[i][i] > 2 or self.matrix[i][i] % 2:
                raise QuiverError("diagonal entries must lie in {2, 0, -2, ...}")
            for j in range(n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise QuiverError("Cartan matrix must be symmetric")
                if i != j and self.matrix[i][j] > 0:
                    raise QuiverError("off-diagonal entries must be non-positive")

    def a(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def real_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.matrix[i][i] == 2)

    @property
    def imaginary_vertices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.matrix[i][i] <= 0)

    def is_real(self, i: int) -> bool:
        return self.matrix[i][i] == 2

    def index_set(self, l_max: int | None = None) -> tuple[tuple[int, int], ...]:
        """I^infinity truncated at l <= l_max: (i, 1) for real i, (i, l) for imaginary i."""
        cap = self.l_max if l_max is None else l_max
        out = []
        for i in range(self.n):
            top = 1 if self.is_real(i) else cap
            out.extend((i, l) for l in range(1, top + 1))
        return tuple(out)

    def valid_index(self, i: int, l: int) -> bool:
        if not 0 <= i < self.n or l < 1:
            return False
        return l == 1 if self.is_real(i) else l <= self.l_max


def cartan_matrix(Q: Quiver, l_max: int = 3) -> CartanData:
    """a_ii = 2 - 2 g_i and a_ij = -c_ij - c_ji."""
    n = Q.n
    m = [[0] * n for _ in range(n)]
    for i, vi in enumerate(Q.vertices):
        for j, vj in enumerate(Q.vertices):
            if i == j:
                m[i][j] = 2 - 2 * Q.loops_at(vi)
            else:
                m[i][j] = -Q.arrows_between(vi, vj) - Q.arrows_between(vj, vi)
    return CartanData(Q.vertices, tuple(tuple(r) for r in m), l_max)


def in_fundamental_set(Q: Quiver, alpha) -> bool:
    """(alpha, S_i) <= 0 for every vertex and the support of alpha is connected."""
    a = as_vector(Q, alpha)
    if any(x < 0 for x in a):
        raise QuiverError("dimension vector must be non-negative")
    if not any(a):
        raise QuiverError("zero vector has no fundamental-set membership")
    for i in range(Q.n):
        if sym_euler_form(Q, a, Q.simple(i)) > 0:
            return False
    support = {i for i, x in enumerate(a) if x}
    adj: dict[int, set[int]] = {i: set() for i in support}
    for s, t in Q.arrow_indices:
        if s in support and t in support and s != t:
            adj[s].add(t)
            adj[t].add(s)
    start = next(iter(support))
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return seen == support


@dataclass(frozen=True)
class ProjectiveData:
    projective: DimVector
    radical: DimVector


def projective_data(Q: Quiver) -> dict[str, ProjectiveData]:
    """Dimension vectors of P_i (paths starting at i) and rad P_i."""
    if not Q.is_acyclic():
        raise UnsupportedQuiverError("projective data needs an acyclic quiver")
    succ: dict[int, list[int]] = {i: [] for i in range(Q.n)}
    for s, t in Q.arrow_indices:
        succ[s].append(t)
    memo: dict[int, DimVector] = {}

    def proj(i: int) -> DimVector:
        if i not in memo:
            v = list(Q.simple(i))
            for j in succ[i]:
                v = [x + y for x, y in zip(v, proj(j))]
            memo[i] = tuple(v)
        return memo[i]

    out = {}
    for i, label in enumerate(Q.vertices):
        p = proj(i)
        out[label] = ProjectiveData(p, tuple(x - y for x, y in zip(p, Q.simple(i))))
    return out


def phi_twist_exponent(Q: Quiver, vertex: str) -> int:
    """<rad P_i, S_i> + 2 <P_i, rad P_i>."""
    data = projective_data(Q)[vertex]
    return euler_form(Q, data.radical, Q.simple(vertex)) + 2 * euler_form(Q, data.projective, data.radical)


def gkm_cartan(labels: Iterable[Hashable], matrix, charge: Sequence[int]) -> CartanData:
    """Borcherds-Cartan data with a charge vector for the GKM presentation."""
    labels = tuple(labels)
    return CartanData(labels, tuple(tuple(r) for r in matrix), max(charge) if charge else 1, tuple(charge))
