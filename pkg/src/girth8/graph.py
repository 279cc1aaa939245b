"""The bipartite graphs Gamma_F(f2, f3).

Points (p1, p2, p3) and lines [l1, l2, l3] range over F^3 and are adjacent iff

    p2 + l2 = f2(p1, l1)   and   p3 + l3 = f3(p1, l1).

The graph is never materialized except by the reference oracle; everything
else works from the value tables of f2 and f3.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .field import FieldElement, FieldError, FieldSpec
from .poly import BiPoly, delta_k

POINT, LINE = "P", "L"

BFS_MAX_Q = 2**7
DELTA2_MAX_Q = 2**7
DELTA3_MAX_Q = 13
DELTA4_MAX_Q = 13


class CapExceeded(FieldError):
    pass


class EngineDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class GraphSpec:
    field: FieldSpec
    f2: BiPoly
    f3: BiPoly

    def __post_init__(self):
        if self.f2.field != self.field or self.f3.field != self.field:
            raise FieldError("f2 and f3 must be over the graph's field")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def order(self) -> int:
        return 2 * self.field.q**3

    @cached_property
    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.f2.table().astype(np.int32), self.f3.table().astype(np.int32))

    def reduced(self) -> "GraphSpec":
        return GraphSpec(self.field, self.f2.reduce(), self.f3.reduce())

    def same_graph(self, other: "GraphSpec") -> bool:
        """Equal adjacency: same field and same polynomial functions."""
        if self.field != other.field:
            return False
        r, s = self.reduced(), other.reduced()
        return r.f2 == s.f2 and r.f3 == s.f3

    def __repr__(self):
        return f"Gamma_{self.field.name}({self.f2}, {self.f3})"


def gamma3(field: FieldSpec) -> GraphSpec:
    """Gamma_3(F) = Gamma_F(xy, x^2 y)."""
    return GraphSpec(field, BiPoly.monomial(field, 1, 1), BiPoly.monomial(field, 2, 1))


@dataclass(frozen=True)
class Vertex:
    side: str
    c1: FieldElement
    c2: FieldElement
    c3: FieldElement

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.c1.value, self.c2.value, self.c3.value)

    def __str__(self):
        a, b, c = self.coords
        return f"P({a},{b},{c})" if self.side == POINT else f"L[{a},{b},{c}]"


def make_vertex(field: FieldSpec, side: str, c1, c2, c3) -> Vertex:
    return Vertex(side, field.element(c1), field.element(c2), field.element(c3))


_VERTEX_RE = re.compile(r"^\s*(?:P\((\d+),(\d+),(\d+)\)|L\[(\d+),(\d+),(\d+)\])\s*$")


def parse_vertex(text: str, field: FieldSpec) -> Vertex:
    m = _VERTEX_RE.match(text.replace(" ", ""))
    if not m:
        raise ValueError(f"malformed vertex {text!r}")
    if m.group(1) is not None:
        return make_vertex(field, POINT, *map(int, m.group(1, 2, 3)))
    return make_vertex(field, LINE, *map(int, m.group(4, 5, 6)))


@dataclass(frozen=True)
class CycleSeed:
    a: tuple[int, ...]
    r: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.r) or len(self.a) < 2:
            raise ValueError("a seed needs k >= 2 point and line coordinates")

    @property
    def k(self) -> int:
        return len(self.a)

    def __str__(self):
        return "(" + ",".join(map(str, self.a)) + ";" + ",".join(map(str, self.r)) + ")"

    @classmethod
    def parse(cls, text: str) -> "CycleSeed":
        m = re.fullmatch(r"\s*\(([\d,\s]+);([\d,\s]+)\)\s*", text)
        if not m:
            raise ValueError(f"malformed seed {text!r}")
        a = tuple(int(t) for t in m.group(1).split(","))
        r = tuple(int(t) for t in m.group(2).split(","))
        return cls(a, r)

    @classmethod
    def of(cls, a: Sequence, r: Sequence) -> "CycleSeed":
        return cls(tuple(int(x) for x in a), tuple(int(x) for x in r))


@dataclass(frozen=True)
class CycleWitness:
    vertices: tuple[Vertex, ...]
    closed: bool

    def __str__(self):
        return " ~ ".join(map(str, self.vertices))


# --- adjacency -----------------------------------------------------------------

def adjacent(spec: GraphSpec, pt: Vertex, ln: Vertex) -> bool:
    if pt.side == LINE:
        pt, ln = ln, pt
    if pt.side != POINT or ln.side != LINE:
        return False
    F = spec.field
    p1, p2, p3 = pt.coords
    l1, l2, l3 = ln.coords
    return (F.add(p2, l2) == spec.f2(p1, l1).value
            and F.add(p3, l3) == spec.f3(p1, l1).value)


def neighbors(spec: GraphSpec, v: Vertex) -> list[Vertex]:
    """The q neighbours of v, ordered by first coordinate."""
    F = spec.field
    x, b, c = v.coords
    out = []
    for e in range(F.q):
        if v.side == POINT:
            s = F.sub(spec.f2(x, e).value, b)
            t = F.sub(spec.f3(x, e).value, c)
            out.append(make_vertex(F, LINE, e, s, t))
        else:
            s = F.sub(spec.f2(e, x).value, b)
            t = F.sub(spec.f3(e, x).value, c)
            out.append(make_vertex(F, POINT, e, s, t))
    return out


def translation_automorphism(spec: GraphSpec, beta, gamma):
    """(p1, p2, p3) -> (p1, p2 + beta, p3 + gamma); [l1, l2, l3] -> [l1, l2 - beta, l3 - gamma]."""
    F = spec.field
    beta, gamma = F.element(beta), F.element(gamma)

    def apply(v: Vertex) -> Vertex:
        if v.side == POINT:
            return Vertex(POINT, v.c1, v.c2 + beta, v.c3 + gamma)
        return Vertex(LINE, v.c1, v.c2 - beta, v.c3 - gamma)

    return apply


# --- seeds and witnesses -----------------------------------------------------------

def _seed_elems(spec: GraphSpec, seed: CycleSeed):
    F = spec.field
    return [F.element(a) for a in seed.a], [F.element(r) for r in seed.r]


def seed_distinct(seed: CycleSeed) -> bool:
    k = seed.k
    return all(seed.a[i] != seed.a[(i + 1) % k] and seed.r[i] != seed.r[(i + 1) % k]
               for i in range(k))


def seed_deltas(spec: GraphSpec, seed: CycleSeed) -> tuple[int, int]:
    xs, ys = _seed_elems(spec, seed)
    return delta_k(spec.f2, xs, ys).value, delta_k(spec.f3, xs, ys).value


def seed_is_cycle(spec: GraphSpec, seed: CycleSeed) -> bool:
    """Both Delta_k values vanish and consecutive coordinates differ cyclically."""
    return seed_distinct(seed) and seed_deltas(spec, seed) == (0, 0)


def realize_seed(spec: GraphSpec, seed: CycleSeed, b1=0, c1=0) -> CycleWitness:
    """Walk the alternating path determined by the seed from the point (a_1, b1, c1)."""
    F = spec.field
    k = seed.k
    b, c = F.element(b1).value, F.element(c1).value
    verts = []
    for i in range(k):
        a, r = seed.a[i], seed.r[i]
        verts.append(make_vertex(F, POINT, a, b, c))
        s = F.sub(spec.f2(a, r).value, b)
        t = F.sub(spec.f3(a, r).value, c)
        verts.append(make_vertex(F, LINE, r, s, t))
        a_next = seed.a[(i + 1) % k]
        b = F.sub(spec.f2(a_next, r).value, s)
        c = F.sub(spec.f3(a_next, r).value, t)
    closed = (b, c) == (verts[0].c2.value, verts[0].c3.value)
    return CycleWitness(tuple(verts), closed)


def witness_is_cycle(spec: GraphSpec, w: CycleWitness) -> bool:
    """Closed, every edge checked against the adjacency rule, vertices pairwise distinct."""
    vs = w.vertices
    n = len(vs)
    if not w.closed or n < 4 or len(set(vs)) != n:
        return False
    return all(adjacent(spec, vs[i], vs[(i + 1) % n]) for i in range(n))


# --- girth engines ---------------------------------------------------------------

def _tables(spec: GraphSpec):
    F2, F3 = spec.tables
    return F2, F3, spec.field.sub_table, spec.field.add_table


def girth_leq_detail(spec: GraphSpec, cap: int = 6) -> tuple[int | None, CycleSeed | None]:
    if cap not in (4, 6):
        raise ValueError("cap must be 4 or 6")
    if spec.q > BFS_MAX_Q:
        raise CapExceeded(f"BFS engine limited to q <= {BFS_MAX_Q}")
    F2, F3, sub, _ = _tables(spec)
    res = kernels.bfs_cycle(F2, F3, sub, cap)
    length = int(res[0])
    if length == 0:
        return None, None
    if length == 4:
        return 4, CycleSeed.of(res[1:3], res[3:5])
    a1, a2, r1, a3, r3, r2 = (int(t) for t in res[1:7])
    return 6, CycleSeed.of((a1, a2, a3), (r1, r2, r3))


def girth_leq(spec: GraphSpec, cap: int = 6) -> int | None:
    """Shortest cycle length <= cap, by truncated BFS from the points (a, 0, 0).

    Translations (p2, p3) -> (p2 + beta, p3 + gamma) are automorphisms, so
    every cycle passes through some (a, 0, 0) up to automorphism.
    """
    return girth_leq_detail(spec, cap)[0]


def delta_cycle_search(spec: GraphSpec, k: int) -> CycleSeed | None:
    """Lexicographically least 2k-seed with vanishing Delta_k for f2 and f3."""
    if k == 2:
        if spec.q > DELTA2_MAX_Q:
            raise CapExceeded(f"Delta_2 search limited to q <= {DELTA2_MAX_Q}")
        F2, F3, sub, _ = _tables(spec)
        res = kernels.delta2(F2, F3, sub)
    elif k == 3:
        if spec.q > DELTA3_MAX_Q:
            raise CapExceeded(f"Delta_3 search limited to q <= {DELTA3_MAX_Q}")
        res = kernels.delta3(*_tables(spec))
    else:
        raise ValueError("k must be 2 or 3")
    if len(res) == 0:
        return None
    return CycleSeed.of(res[:k], res[k:])


def delta_girth(spec: GraphSpec) -> tuple[int | None, CycleSeed | None]:
    seed = delta_cycle_search(spec, 2)
    if seed is not None:
        return 4, seed
    seed = delta_cycle_search(spec, 3)
    if seed is not None:
        return 6, seed
    return None, None


def girth_at_least_8(spec: GraphSpec, engine: str = "both") -> tuple[bool, CycleSeed | None]:
    """(True, None) when there is no 4- or 6-cycle; otherwise (False, seed)."""
    if engine == "bfs":
        length, seed = girth_leq_detail(spec, 6)
        return length is None, seed
    if engine == "delta":
        length, seed = delta_girth(spec)
        return length is None, seed
    if engine == "both":
        lb, _ = girth_leq_detail(spec, 6)
        ld, seed = delta_girth(spec)
        if lb != ld:
            raise EngineDisagreement(f"{spec}: bfs found {lb}, delta found {ld}")
        return lb is None, seed
    raise ValueError(f"unknown engine {engine!r}")


def find_8cycle(spec: GraphSpec) -> CycleSeed | None:
    """Lexicographically least 8-seed.

    Only a certificate of an 8-cycle when the graph has no 4-cycle; callers
    gate on girth_at_least_8 first.
    """
    if spec.q > DELTA4_MAX_Q:
        raise CapExceeded(f"direct 8-cycle search limited to q <= {DELTA4_MAX_Q}")
    res = kernels.delta4(*_tables(spec))
    if len(res) == 0:
        return None
    return CycleSeed.of(res[:4], res[4:])


# --- explicit reference ----------------------------------------------------------

def adjacency_csr(spec: GraphSpec) -> tuple[np.ndarray, np.ndarray]:
    """Explicit adjacency: points are 0..q^3-1, lines q^3..2q^3-1, ids by encoding."""
    F = spec.field
    q = F.q
    n = q**3
    F2, F3 = spec.tables
    sub = F.sub_table
    ids = np.arange(n)
    x, b, c = ids // (q * q), (ids // q) % q, ids % q
    e = np.arange(q)
    # neighbours of point (x, b, c): [e, f2(x, e) - b, f3(x, e) - c]
    pt_nb = n + e[None, :] * q * q + sub[F2[x[:, None], e[None, :]], b[:, None]] * q \
        + sub[F3[x[:, None], e[None, :]], c[:, None]]
    # neighbours of line [x, b, c]: (e, f2(e, x) - b, f3(e, x) - c)
    ln_nb = e[None, :] * q * q + sub[F2[e[None, :], x[:, None]], b[:, None]] * q \
        + sub[F3[e[None, :], x[:, None]], c[:, None]]
    indices = np.concatenate([pt_nb, ln_nb]).ravel().astype(np.int32)
    indptr = (np.arange(2 * n + 1) * q).astype(np.int64)
    return indptr, indices


def full_bfs_girth(spec: GraphSpec, cap: int = 6) -> int | None:
    """Shortest cycle <= cap by BFS from every vertex of the explicit graph."""
    if spec.q > 16:
        raise CapExceeded("explicit reference limited to q <= 16")
    indptr, indices = adjacency_csr(spec)
    best = int(kernels.full_bfs_girth(indptr, indices, cap))
    return best or None
