"""Explicit isomorphisms between graphs Gamma_F(f2, f3).

Isomorphisms are coordinate transforms applied to batches of vertices, never
vertex tables, so they stay cheap on F_121-sized graphs.  A vertex batch is an
int64 array of shape (N, 4) with columns ``side, c1, c2, c3`` (side 0 for
points, 1 for lines) holding canonical encodings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .classify import ClassificationWitness, ProblemInstance, build_qM_instance
from .field import FieldSpec, embedding_table, parse_field
from .graph import (
    LINE,
    POINT,
    CycleSeed,
    CycleWitness,
    GraphSpec,
    gamma3,
    make_vertex,
    realize_seed,
    witness_is_cycle,
)
from .poly import BiPoly, UniPoly, format_poly, is_power_of, parse_poly, phi_p, pi_transform

FULL_MODE_MAX_ORDER = 10**6

KINDS = ("SwapF2F3", "SwapXY", "Scale3", "Shear32", "AddT3", "SubstX", "PowCoord2", "Translate")


class IsoError(ValueError):
    pass


class ChainError(RuntimeError):
    pass


# --- vertex batches --------------------------------------------------------------

def to_batch(vertices) -> np.ndarray:
    rows = [(0 if v.side == POINT else 1, *v.coords) for v in vertices]
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


def from_batch(field: FieldSpec, batch: np.ndarray):
    return [make_vertex(field, POINT if s == 0 else LINE, a, b, c) for s, a, b, c in batch.tolist()]


def all_vertices(field: FieldSpec) -> np.ndarray:
    q = field.q
    ids = np.arange(q**3)
    coords = np.stack([ids // (q * q), (ids // q) % q, ids % q], axis=1)
    pts = np.column_stack([np.zeros(q**3, np.int64), coords])
    lns = np.column_stack([np.ones(q**3, np.int64), coords])
    return np.concatenate([pts, lns])


def _fvals(poly: BiPoly, xs, ys) -> np.ndarray:
    q = poly.field.q
    if q <= 1024:
        return _cached_table(poly)[xs, ys]
    return poly.veval(xs, ys)


_TABLES: dict = {}


def _cached_table(poly: BiPoly) -> np.ndarray:
    key = (poly.field, frozenset(poly.terms.items()))
    t = _TABLES.get(key)
    if t is None:
        if len(_TABLES) > 64:
            _TABLES.clear()
        t = _TABLES[key] = poly.table()
    return t


def batch_adjacent(spec: GraphSpec, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Row-wise adjacency of u[i] and w[i] (either may be the point)."""
    F = spec.field
    swap = u[:, 0] == 1
    pt = np.where(swap[:, None], w, u)
    ln = np.where(swap[:, None], u, w)
    ok = (pt[:, 0] == 0) & (ln[:, 0] == 1)
    f2 = _fvals(spec.f2, pt[:, 1], ln[:, 1])
    f3 = _fvals(spec.f3, pt[:, 1], ln[:, 1])
    return ok & (F.vadd(pt[:, 2], ln[:, 2]) == f2) & (F.vadd(pt[:, 3], ln[:, 3]) == f3)


def random_edges(spec: GraphSpec, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    F = spec.field
    q = F.q
    p = rng.integers(0, q, size=(n, 3))
    l1 = rng.integers(0, q, size=n)
    l2 = F.vsub(_fvals(spec.f2, p[:, 0], l1), p[:, 1])
    l3 = F.vsub(_fvals(spec.f3, p[:, 0], l1), p[:, 2])
    pts = np.column_stack([np.zeros(n, np.int64), p])
    lns = np.column_stack([np.ones(n, np.int64), l1, l2, l3])
    return pts, lns


def all_edges(spec: GraphSpec) -> tuple[np.ndarray, np.ndarray]:
    F = spec.field
    q = F.q
    ids = np.arange(q**4)
    p1, p2, p3, l1 = ids // q**3, (ids // q**2) % q, (ids // q) % q, ids % q
    l2 = F.vsub(_fvals(spec.f2, p1, l1), p2)
    l3 = F.vsub(_fvals(spec.f3, p1, l1), p3)
    pts = np.column_stack([np.zeros(q**4, np.int64), p1, p2, p3])
    lns = np.column_stack([np.ones(q**4, np.int64), l1, l2, l3])
    return pts, lns


# --- elementary isomorphisms --------------------------------------------------------

class ElementaryIso:
    """One isomorphism Gamma(source) -> Gamma(target) given by a coordinate map."""

    kind = ""

    def __init__(self, source: GraphSpec, **params):
        self.source = source
        self.params = params
        self.target = self._target()

    @property
    def field(self) -> FieldSpec:
        return self.source.field

    def _target(self) -> GraphSpec:
        raise NotImplementedError

    def forward(self, batch: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, batch: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def transcript(self) -> str:
        parts = [f"{k}={_fmt_param(v)}" for k, v in self.params.items()]
        return " ".join([self.kind, *parts])

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {k: _fmt_param(v) for k, v in self.params.items()}}

    def __repr__(self):
        return self.transcript()


def _fmt_param(v):
    if isinstance(v, UniPoly):
        return format_poly(v.to_bipoly())
    return v


class SwapF2F3(ElementaryIso):
    kind = "SwapF2F3"

    def _target(self):
        return GraphSpec(self.field, self.source.f3, self.source.f2)

    def forward(self, batch):
        return batch[:, [0, 1, 3, 2]]

    inverse = forward


class SwapXY(ElementaryIso):
    kind = "SwapXY"

    def _target(self):
        return GraphSpec(self.field, self.source.f2.swap(), self.source.f3.swap())

    def forward(self, batch):
        out = batch.copy()
        out[:, 0] = 1 - batch[:, 0]
        return out

    inverse = forward


class Scale3(ElementaryIso):
    kind = "Scale3"

    def __init__(self, source, alpha: int):
        if alpha == 0:
            raise IsoError("Scale3 needs alpha != 0")
        super().__init__(source, alpha=int(alpha))

    def _target(self):
        return GraphSpec(self.field, self.source.f2, self.source.f3.scale(self.params["alpha"]))

    def _scale(self, batch, c):
        out = batch.copy()
        out[:, 3] = self.field.vmul(batch[:, 3], c)
        return out

    def forward(self, batch):
        return self._scale(batch, self.params["alpha"])

    def inverse(self, batch):
        return self._scale(batch, self.field.inv(self.params["alpha"]))


class Shear32(ElementaryIso):
    """f3 -> f3 + beta * f2^w; third coordinates shift by beta * (second)^w."""

    kind = "Shear32"

    def __init__(self, source, beta: int, w: int = 1):
        if not is_power_of(w, source.field.p):
            raise IsoError(f"Shear32 exponent {w} is not a power of {source.field.p}")
        super().__init__(source, beta=int(beta), w=int(w))

    def _target(self):
        F = self.field
        twist = self.source.f2.frobenius(self.params["w"]).reduce().scale(self.params["beta"])
        return GraphSpec(F, self.source.f2, (self.source.f3 + twist).reduce())

    def _shift(self, batch, beta):
        F = self.field
        out = batch.copy()
        out[:, 3] = F.vadd(batch[:, 3], F.vmul(F.vpow(batch[:, 2], self.params["w"]), beta))
        return out

    def forward(self, batch):
        return self._shift(batch, self.params["beta"])

    def inverse(self, batch):
        return self._shift(batch, self.field.neg(self.params["beta"]))


class AddT3(ElementaryIso):
    """f3 -> f3 + t(x); points shift p3 by t(p1)."""

    kind = "AddT3"

    def __init__(self, source, t: UniPoly):
        super().__init__(source, t=t)

    def _target(self):
        return GraphSpec(self.field, self.source.f2, (self.source.f3 + self.params["t"].to_bipoly()).reduce())

    def _shift(self, batch, sign):
        F = self.field
        out = batch.copy()
        pts = batch[:, 0] == 0
        tv = self.params["t"].veval(batch[pts, 1])
        out[pts, 3] = F.vadd(batch[pts, 3], tv) if sign > 0 else F.vsub(batch[pts, 3], tv)
        return out

    def forward(self, batch):
        return self._shift(batch, 1)

    def inverse(self, batch):
        return self._shift(batch, -1)


class SubstX(ElementaryIso):
    """f_i(x, y) -> f_i(sigma(x), y) for a permutation polynomial sigma; p1 -> sigma^{-1}(p1)."""

    kind = "SubstX"

    def __init__(self, source, sigma: UniPoly):
        perm = sigma.values()
        if len(np.unique(perm)) != source.field.q:
            raise IsoError(f"{sigma} is not a permutation of F_{source.field.name}")
        self.perm = perm
        self.perm_inv = np.empty_like(perm)
        self.perm_inv[perm] = np.arange(len(perm))
        super().__init__(source, sigma=sigma)

    def _target(self):
        s = self.params["sigma"]
        return GraphSpec(self.field, self.source.f2.subst_x(s), self.source.f3.subst_x(s))

    def forward(self, batch):
        out = batch.copy()
        pts = batch[:, 0] == 0
        out[pts, 1] = self.perm_inv[batch[pts, 1]]
        return out

    def inverse(self, batch):
        out = batch.copy()
        pts = batch[:, 0] == 0
        out[pts, 1] = self.perm[batch[pts, 1]]
        return out


class PowCoord2(ElementaryIso):
    """f2 -> f2^w for w a power of p; second coordinates go through e -> e^w."""

    kind = "PowCoord2"

    def __init__(self, source, w: int):
        if not is_power_of(w, source.field.p):
            raise IsoError(f"PowCoord2 exponent {w} is not a power of {source.field.p}")
        super().__init__(source, w=int(w))

    def _target(self):
        return GraphSpec(self.field, self.source.f2.frobenius(self.params["w"]).reduce(), self.source.f3)

    def forward(self, batch):
        out = batch.copy()
        out[:, 2] = self.field.vpow(batch[:, 2], self.params["w"])
        return out

    def inverse(self, batch):
        F = self.field
        out = batch.copy()
        out[:, 2] = F.vpow(batch[:, 2], F.frob_exponent(1, self.params["w"]))
        return out


class Translate(ElementaryIso):
    kind = "Translate"

    def __init__(self, source, beta: int = 0, gamma: int = 0):
        super().__init__(source, beta=int(beta), gamma=int(gamma))

    def _target(self):
        return self.source

    def _move(self, batch, beta, gamma):
        F = self.field
        out = batch.copy()
        pts = batch[:, 0] == 0
        lns = ~pts
        out[pts, 2] = F.vadd(batch[pts, 2], beta)
        out[pts, 3] = F.vadd(batch[pts, 3], gamma)
        out[lns, 2] = F.vsub(batch[lns, 2], beta)
        out[lns, 3] = F.vsub(batch[lns, 3], gamma)
        return out

    def forward(self, batch):
        return self._move(batch, self.params["beta"], self.params["gamma"])

    def inverse(self, batch):
        F = self.field
        return self._move(batch, F.neg(self.params["beta"]), F.neg(self.params["gamma"]))


_KIND_CLASSES = {c.kind: c for c in (SwapF2F3, SwapXY, Scale3, Shear32, AddT3, SubstX, PowCoord2, Translate)}


def elementary(kind: str, source: GraphSpec, **params) -> ElementaryIso:
    try:
        cls = _KIND_CLASSES[kind]
    except KeyError:
        raise IsoError(f"unknown isomorphism kind {kind!r}") from None
    return cls(source, **params)


def completing_exponent(u: int, field: FieldSpec) -> int:
    """Least v >= 1 with v * u a power of |F|, found by scanning."""
    Q = field.q
    for v in range(1, Q + 1):
        t = v * u
        while t % Q == 0 and t > 1:
            t //= Q
        if t == 1:
            return v
    raise IsoError(f"no v with v * {u} a power of {Q}")


def frobenius_subst(source: GraphSpec, u: int) -> SubstX:
    """Gamma(f2, f3) -> Gamma(f2(x^u, y), f3(x^u, y)), points p1 -> p1^v."""
    F = source.field
    if not is_power_of(u, F.p):
        raise IsoError(f"{u} is not a power of {F.p}")
    return SubstX(source, UniPoly.monomial(F, u))


# --- chains -----------------------------------------------------------------------

@dataclass
class IsoChain:
    source: GraphSpec
    steps: list[ElementaryIso] = dc_field(default_factory=list)
    verified: bool = False

    @property
    def target(self) -> GraphSpec:
        return self.steps[-1].target if self.steps else self.source

    def then(self, kind: str, **params) -> "IsoChain":
        self.steps.append(elementary(kind, self.target, **params))
        self.verified = False
        return self

    def extend(self, other: "IsoChain") -> "IsoChain":
        if not self.target.same_graph(other.source):
            raise ChainError("chains do not compose")
        self.steps.extend(other.steps)
        self.verified = False
        return self

    def forward(self, batch):
        for st in self.steps:
            batch = st.forward(batch)
        return batch

    def inverse(self, batch):
        for st in reversed(self.steps):
            batch = st.inverse(batch)
        return batch

    def transcript(self) -> str:
        return "\n".join(st.transcript() for st in self.steps)

    def to_json(self) -> dict:
        return {
            "field": self.source.field.name,
            "source": {"f2": format_poly(self.source.f2), "f3": format_poly(self.source.f3)},
            "target": {"f2": format_poly(self.target.f2), "f3": format_poly(self.target.f3)},
            "steps": [st.to_json() for st in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsoChain":
        F = parse_field(data["field"])
        src = GraphSpec(F, parse_poly(data["source"]["f2"], F), parse_poly(data["source"]["f3"], F))
        chain = cls(src)
        for st in data["steps"]:
            params = dict(st["params"])
            if "sigma" in params:
                params["sigma"] = parse_poly(params["sigma"], F).x_part()
            if "t" in params:
                params["t"] = parse_poly(params["t"], F).x_part()
            chain.then(st["kind"], **params)
        tgt = data.get("target")
        if tgt is not None:
            expect = GraphSpec(F, parse_poly(tgt["f2"], F), parse_poly(tgt["f3"], F))
            if not chain.target.same_graph(expect):
                raise ChainError("replayed chain does not reach the recorded target")
        return chain

    def simplified(self) -> "IsoChain":
        """Same map with adjacent SwapF2F3 / SwapXY pairs and unit steps removed."""
        kept: list = []
        for st in self.steps:
            if _is_unit(st):
                continue
            if kept and st.kind in ("SwapF2F3", "SwapXY") and kept[-1][0] == st.kind:
                kept.pop()
                continue
            kept.append((st.kind, st.params))
        out = IsoChain(self.source)
        for kind, params in kept:
            out.then(kind, **params)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _is_unit(st: ElementaryIso) -> bool:
    p = st.params
    if st.kind == "Scale3":
        return p["alpha"] == 1
    if st.kind in ("PowCoord2",):
        return p["w"] == 1
    if st.kind == "Shear32":
        return p["beta"] == 0
    if st.kind == "Translate":
        return p["beta"] == 0 and p["gamma"] == 0
    return False


def _verify_maps(source: GraphSpec, target: GraphSpec, fwd, inv, mode: str, samples: int, seed: int) -> bool:
    F = source.field
    if target.field != F:
        return False
    if mode == "full":
        if source.order > FULL_MODE_MAX_ORDER:
            raise IsoError(f"full verification limited to 2q^3 <= {FULL_MODE_MAX_ORDER}")
        verts = all_vertices(F)
        img = fwd(verts)
        if not np.array_equal(inv(img), verts):
            return False
        q = F.q
        codes = img[:, 0] * q**3 + img[:, 1] * q * q + img[:, 2] * q + img[:, 3]
        if len(np.unique(codes)) != len(verts):
            return False
        if not np.array_equal(fwd(inv(verts)), verts):
            return False
        pts, lns = all_edges(source)
        return bool(batch_adjacent(target, fwd(pts), fwd(lns)).all())
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    q = F.q
    n = samples

    def rand_verts():
        return np.column_stack([rng.integers(0, 2, n), rng.integers(0, q, (n, 3))])

    v = rand_verts()
    if not np.array_equal(inv(fwd(v)), v):
        return False
    w = rand_verts()
    if not np.array_equal(fwd(inv(w)), w):
        return False
    pts, lns = random_edges(source, n, rng)
    if not batch_adjacent(target, fwd(pts), fwd(lns)).all():
        return False
    pts = np.column_stack([np.zeros(n, np.int64), rng.integers(0, q, (n, 3))])
    lns = np.column_stack([np.ones(n, np.int64), rng.integers(0, q, (n, 3))])
    non = ~batch_adjacent(source, pts, lns)
    return not batch_adjacent(target, fwd(pts[non]), fwd(lns[non])).any()


def verify_iso(iso, mode: str = "full", samples: int = 10**5, seed: int = 0) -> bool:
    """Bijectivity and adjacency preservation, exhaustively or on random samples."""
    ok = _verify_maps(iso.source, iso.target, iso.forward, iso.inverse, mode, samples, seed)
    if isinstance(iso, IsoChain):
        iso.verified = ok
    return ok


# --- chains to Gamma_3 ------------------------------------------------------------

def _frob(F: FieldSpec, num: int, den: int = 1) -> int:
    return F.frob_exponent(num, den)


def _pow_f3(chain: IsoChain, w: int):
    if w != 1:
        chain.then("SwapF2F3").then("PowCoord2", w=w).then("SwapF2F3")


def _subst_y(chain: IsoChain, w: int):
    if w != 1:
        F = chain.target.field
        chain.then("SwapXY").then("SubstX", sigma=UniPoly.monomial(F, w)).then("SwapXY")


def _subst_x(chain: IsoChain, w: int):
    if w != 1:
        chain.then("SubstX", sigma=UniPoly.monomial(chain.target.field, w))


def _strip_rho_terms(chain: IsoChain, u: int, v: int):
    """Remove the terms h_{2i,j} rho_a^i(x) y^j, (i, j) in Phi_p(u, v), from f3.

    With f2 = rho_a^u(x) y^v each such term is f2 raised to the Frobenius
    power i/u, so one shear per index removes it.
    """
    F = chain.target.field
    h = chain.target.f3
    for i, j in sorted(phi_p(u, v, F.p, max(h.degx, 0) // 2, max(h.degy, 0))):
        c = h.coeff(2 * i, j)
        if c:
            chain.then("Shear32", beta=F.neg(c), w=_frob(F, i, u))


def _strip_mono_terms(chain: IsoChain, u: int, v: int):
    """Remove h_{i,j} x^i y^j, (i, j) in Phi_p(u, v), from f3 when f2 = x^u y^v."""
    F = chain.target.field
    h = chain.target.f3
    for i, j in sorted(phi_p(u, v, F.p, max(h.degx, 0), max(h.degy, 0))):
        c = h.coeff(i, j)
        if c:
            chain.then("Shear32", beta=F.neg(c), w=_frob(F, i, u))


def _scale_out(chain: IsoChain, zeta: int):
    F = chain.target.field
    if zeta != 1:
        chain.then("Scale3", alpha=F.inv(zeta))


def _case_rho(chain: IsoChain, a: int, u: int, v: int, s: int, zeta: int):
    """(rho_a^u(x) y^v, mu-residual zeta x^{su/v} y^s + removable terms) -> Gamma_3."""
    F = chain.target.field
    _strip_rho_terms(chain, u, v)
    _scale_out(chain, zeta)
    # f2 = rho_a(x) y^{v/u}
    if u != 1:
        chain.then("PowCoord2", w=_frob(F, 1, u))
    # f2 = rho_a(x) y, f3 = (xy)^{su/v}
    _subst_y(chain, _frob(F, u, v))
    _pow_f3(chain, _frob(F, v, s * u))
    # (x^2 y - a x y, x y) -> (x y, x^2 y)
    chain.then("SwapF2F3")
    if a:
        chain.then("Shear32", beta=a, w=1)


def _case_mono(chain: IsoChain, u: int, v: int, s: int, zeta: int):
    """(x^u y^v, zeta x^{2su/v} y^s + removable terms) -> Gamma_3."""
    F = chain.target.field
    _strip_mono_terms(chain, u, v)
    _scale_out(chain, zeta)
    _subst_x(chain, _frob(F, 1, u))
    _subst_y(chain, _frob(F, 1, v))
    # f3 = (x^2 y)^{s/v}
    _pow_f3(chain, _frob(F, v, s))


def _case_iv(chain: IsoChain, a: int, u: int, s: int, zeta: int):
    """(rho_a^u(x) y^{2su}, zeta x y^s + removable terms), p = 2, a != 0 -> Gamma_3."""
    F = chain.target.field
    _strip_rho_terms(chain, u, 2 * s * u)
    _scale_out(chain, zeta)
    if u != 1:
        chain.then("PowCoord2", w=_frob(F, 1, u))
    # (rho_a(x) y^{2s}, x y^s) -> (rho_a(x) y^2, x y) -> (rho_a(x) y^2, x^2 y^2)
    _subst_y(chain, _frob(F, 1, s))
    _pow_f3(chain, 2)
    # f2 - f3 = a x y^2 (characteristic 2)
    chain.then("SwapF2F3").then("Shear32", beta=F.neg(1), w=1).then("Scale3", alpha=F.inv(a))
    # (x^2 y^2, x y^2) -> (x y^2, x^2 y^2) -> (x y^2, x y) -> (x y, x y^2) -> (x y, x^2 y)
    chain.then("SwapF2F3")
    _pow_f3(chain, _frob(F, 1, 2))
    chain.then("SwapF2F3").then("SwapXY")


def chain_to_gamma3(witness: ClassificationWitness, inst: ProblemInstance) -> IsoChain:
    """Isomorphism chain from Gamma_{q^M}(f(x) g(y), h) to Gamma_3(F_{q^M})."""
    src = build_qM_instance(inst)
    F = src.field
    emb = embedding_table(inst.base_field, F)
    a = int(emb[witness.a.value])
    zeta = int(emb[witness.zeta.value])
    u, v, s = witness.u, witness.v, witness.s
    chain = IsoChain(src)
    case = witness.case
    if case in ("II", "IVb"):
        chain.then("SwapXY")
    if case in ("I", "II"):
        _case_rho(chain, a, u, v, s, zeta)
    elif case == "III":
        k = 2 * s * u // v if (2 * s * u) % v == 0 else None
        if not _residual_is(chain.target, u, v, k, s):
            # residual zeta x^s y^{2sv/u}: mirror to the x^{2su/v} y^s form
            chain.then("SwapXY")
            u, v = v, u
        _case_mono(chain, u, v, s, zeta)
    elif case in ("IVa", "IVb"):
        _case_iv(chain, a, u, s, zeta)
    else:
        raise ChainError(f"unknown case {case!r}")
    chain = chain.simplified()
    if not chain.target.same_graph(gamma3(F)):
        raise ChainError(f"chain for case {case} ends at {chain.target}, not Gamma_3")
    return chain


def _residual_is(spec: GraphSpec, u: int, v: int, i: int | None, j: int) -> bool:
    if i is None:
        return False
    res = pi_transform(spec.f3, u, v, spec.field.p)
    return len(res.terms) == 1 and (i, j) in res.terms


# --- pullback ---------------------------------------------------------------------

def gamma3_8cycle(field: FieldSpec) -> CycleWitness:
    """The 8-cycle (1, 0, 1, 0; 1, 0, -1, 0) of Gamma_3(F) through (1, 0, 0)."""
    seed = CycleSeed.of((1, 0, 1, 0), (1, 0, field.neg(1), 0))
    return realize_seed(gamma3(field), seed, 0, 0)


def pullback_cycle(chain: IsoChain, witness: CycleWitness) -> CycleWitness:
    """Map a closed cycle of the chain's target back to its source."""
    if not chain.verified and chain.steps:
        raise ChainError("chain has not been verified")
    if not witness.closed:
        raise ValueError("witness is not a closed walk")
    F = chain.source.field
    back = from_batch(F, chain.inverse(to_batch(witness.vertices)))
    out = CycleWitness(tuple(back), True)
    if not witness_is_cycle(chain.source, out):
        raise ChainError("pulled-back walk is not a cycle of the source graph")
    return out
