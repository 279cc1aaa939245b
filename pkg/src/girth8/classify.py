"""Recognition of the girth-eight triples (f(x) g(y), h(x, y)).

Given F_q, degree bounds m, n, monic f, g with f(0) = g(0) = 0 and a nonzero
h made of mixed terms, decide whether Gamma_{q^M}(f(x) g(y), h) has girth at
least eight by matching f, g, h against the five normal forms I, II, III,
IVa, IVb, where M = lcm(2, ..., mn).
"""

from __future__ import annotations

import itertools
import logging
import re
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import FieldElement, FieldSpec, embedding_table, extension, lcm_upto, parse_field
from .graph import GraphSpec, girth_at_least_8
from .poly import (
    BiPoly,
    UniPoly,
    format_poly,
    k_p_set,
    mu_transform,
    nu_transform,
    parse_poly,
    parse_uni,
    pi_transform,
    recognize_char_power,
    recognize_rho_power,
)

log = logging.getLogger(__name__)

CASES = ("I", "II", "III", "IVa", "IVb")


class InvalidInstance(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class SizeConditionError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemInstance:
    base_field: FieldSpec
    m: int
    n: int
    f: UniPoly
    g: UniPoly
    h: BiPoly

    @property
    def q(self) -> int:
        return self.base_field.q

    @property
    def M(self) -> int:
        return lcm_upto(self.m * self.n)

    def text(self) -> str:
        g = format_poly(self.g.to_bipoly("y"))
        return (f"q={self.base_field.name} m={self.m} n={self.n} "
                f"f={format_poly(self.f.to_bipoly('x'))} g={g} h={format_poly(self.h)}")

    def __str__(self):
        return self.text()


_KEY_RE = re.compile(r"(?:^|\s)(q|m|n|f|g|h)\s*=")


def parse_instance(text: str) -> ProblemInstance:
    """Parse "q=<p^k> m=<int> n=<int> f=<poly> g=<poly> h=<poly>"."""
    marks = list(_KEY_RE.finditer(text))
    vals = {}
    for i, mk in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(text)
        key = mk.group(1)
        if key in vals:
            raise ValueError(f"duplicate key {key!r}")
        vals[key] = text[mk.end():end].strip()
    missing = [k for k in "qmnfgh" if k not in vals]
    if missing:
        raise ValueError(f"instance missing {', '.join(missing)}")
    F = parse_field(vals["q"])
    return ProblemInstance(F, int(vals["m"]), int(vals["n"]),
                           parse_uni(vals["f"], F), parse_uni(vals["g"], F),
                           parse_poly(vals["h"], F))


@dataclass(frozen=True)
class ConditionReport:
    q: int
    bounds: tuple[int, int, int]
    size_ok: bool
    violations: list[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.size_ok and not self.violations


def size_bounds(m: int, n: int) -> tuple[int, int, int]:
    return (2 * m * n + 3, m * n + 3 * n + 1, n * (n + 1) + 2)


def check_size_condition(q: int, m: int, n: int) -> ConditionReport:
    """q > max{2mn + 3, mn + 3n + 1, n(n + 1) + 2}."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    b = size_bounds(m, n)
    return ConditionReport(q, b, q > max(b))


def validate_instance(inst: ProblemInstance) -> ConditionReport:
    v = []
    for name, poly in (("f", inst.f), ("g", inst.g)):
        if poly.is_zero() or not poly.is_monic():
            v.append(f"{name} is not monic")
        if poly.coeff(0) != 0:
            v.append(f"{name}(0) != 0")
        if poly.degree > inst.m:
            v.append(f"deg {name} = {poly.degree} exceeds m = {inst.m}")
    if inst.h.is_zero():
        v.append("h is zero")
    if not inst.h.is_mixed():
        v.append("h has a non-mixed term")
    if inst.h.degx > inst.n or inst.h.degy > inst.n:
        v.append(f"h has degree ({inst.h.degx}, {inst.h.degy}) exceeding n = {inst.n}")
    for name, poly in (("f", inst.f), ("g", inst.g), ("h", inst.h)):
        if poly.field != inst.base_field:
            v.append(f"{name} is not over F_{inst.base_field.name}")
    rep = check_size_condition(inst.q, inst.m, inst.n)
    return ConditionReport(rep.q, rep.bounds, rep.size_ok, v)


@dataclass(frozen=True)
class ClassificationWitness:
    case: str
    a: FieldElement
    zeta: FieldElement
    u: int
    v: int
    s: int

    def to_dict(self) -> dict:
        return {"case": self.case, "a": self.a.value, "zeta": self.zeta.value,
                "u": self.u, "v": self.v, "s": self.s}


def _single_term(h: BiPoly, i: int, j: int) -> int | None:
    """The coefficient if h is exactly c x^i y^j with c != 0."""
    if len(h.terms) == 1 and (i, j) in h.terms:
        return h.terms[(i, j)]
    return None


def _candidates(inst: ProblemInstance):
    F = inst.base_field
    p = F.p
    svals = k_p_set(p, inst.n)
    rho_f = recognize_rho_power(inst.f, p)
    rho_g = recognize_rho_power(inst.g, p)
    pow_f = recognize_char_power(inst.f, p)
    pow_g = recognize_char_power(inst.g, p)
    h = inst.h
    zero = F.zero

    # I: f = rho_a^u, g = y^v, mu_{a,u,v}(h) = zeta x^{su/v} y^s
    if rho_f and pow_g:
        a, u = rho_f
        v = pow_g
        res = mu_transform(h, a, u, v, p)
        for s in svals:
            if (s * u) % v == 0:
                z = _single_term(res, s * u // v, s)
                if z:
                    yield ClassificationWitness("I", a, F.element(z), u, v, s)
    # II: f = x^v, g = rho_a^u(y), nu_{a,u,v}(h) = zeta x^s y^{su/v}
    if pow_f and rho_g:
        a, u = rho_g
        v = pow_f
        res = nu_transform(h, a, u, v, p)
        for s in svals:
            if (s * u) % v == 0:
                z = _single_term(res, s, s * u // v)
                if z:
                    yield ClassificationWitness("II", a, F.element(z), u, v, s)
    # III: f = x^u, g = y^v, pi_{u,v}(h) = zeta x^{2su/v} y^s or zeta x^s y^{2sv/u}
    if pow_f and pow_g:
        u, v = pow_f, pow_g
        res = pi_transform(h, u, v, p)
        for s in svals:
            z = None
            if (2 * s * u) % v == 0:
                z = _single_term(res, 2 * s * u // v, s)
            if not z and (2 * s * v) % u == 0:
                z = _single_term(res, s, 2 * s * v // u)
            if z:
                yield ClassificationWitness("III", zero, F.element(z), u, v, s)
    if p != 2:
        return
    # IVa: a != 0, f = rho_a^u, g = y^{2su}, mu_{a,u,2su}(h) = zeta x y^s
    if rho_f and pow_g and rho_f[0].value != 0:
        a, u = rho_f
        for s in svals:
            if pow_g == 2 * s * u:
                z = _single_term(mu_transform(h, a, u, pow_g, p), 1, s)
                if z:
                    yield ClassificationWitness("IVa", a, F.element(z), u, pow_g, s)
    # IVb: a != 0, f = x^{2su}, g = rho_a^u(y), nu_{a,u,2su}(h) = zeta x^s y
    if pow_f and rho_g and rho_g[0].value != 0:
        a, u = rho_g
        for s in svals:
            if pow_f == 2 * s * u:
                z = _single_term(nu_transform(h, a, u, pow_f, p), s, 1)
                if z:
                    yield ClassificationWitness("IVb", a, F.element(z), u, pow_f, s)


def classify(inst: ProblemInstance, warn_only: bool = False) -> ClassificationWitness | None:
    """First matching normal form in the order I, II, III, IVa, IVb, or None."""
    rep = validate_instance(inst)
    if rep.violations:
        raise InvalidInstance(rep.violations)
    if not rep.size_ok:
        msg = (f"q = {rep.q} fails the size condition q > max{{2mn+3, mn+3n+1, n(n+1)+2}}"
               f" = max{rep.bounds}")
        if not warn_only:
            raise SizeConditionError(msg)
        log.warning(msg)
    return next(_candidates(inst), None)


def all_witnesses(inst: ProblemInstance) -> list[ClassificationWitness]:
    return list(_candidates(inst))


def build_qM_instance(inst: ProblemInstance) -> GraphSpec:
    """Gamma_{q^M}(f(x) g(y), h) with coefficients embedded in F_{q^M}."""
    big = extension(inst.base_field, inst.M)
    table = embedding_table(inst.base_field, big)
    f2 = BiPoly.from_product(inst.f, inst.g)
    f2 = BiPoly(big, {k: int(table[c]) for k, c in f2.terms.items()})
    f3 = BiPoly(big, {k: int(table[c]) for k, c in inst.h.terms.items()})
    return GraphSpec(big, f2, f3)


def _embedded(inst: ProblemInstance):
    """f, g as value vectors and h as a value table, all over F_{q^M}."""
    big = extension(inst.base_field, inst.M)
    table = embedding_table(inst.base_field, big)
    f = UniPoly(big, [int(table[c]) for c in inst.f.coeffs])
    g = UniPoly(big, [int(table[c]) for c in inst.g.coeffs])
    h = BiPoly(big, {k: int(table[c]) for k, c in inst.h.terms.items()})
    return big, f.values(), g.values(), h.table()


def _colliding_pairs(vals: np.ndarray):
    groups: dict = {}
    for x, v in enumerate(vals.tolist()):
        groups.setdefault(v, []).append(x)
    for grp in groups.values():
        yield from itertools.combinations(grp, 2)


def difference_slices_injective(inst: ProblemInstance) -> bool:
    """For a != b with f(a) = f(b), y -> h(a, y) - h(b, y) is injective on F_{q^M};
    likewise x -> h(x, c) - h(x, d) whenever g(c) = g(d).  Necessary for girth >= 8."""
    big, fv, gv, H = _embedded(inst)
    q = big.q
    for vals, rows in ((fv, H), (gv, H.T)):
        for a, b in _colliding_pairs(vals):
            theta = big.vsub(rows[a], rows[b])
            if len(np.unique(theta)) != q:
                return False
    return True


def fibers_at_most_two(inst: ProblemInstance) -> bool:
    """No value of f or g on F_{q^M} is taken three times.  Necessary for girth >= 8."""
    _, fv, gv, _ = _embedded(inst)
    return max(np.bincount(fv).max(), np.bincount(gv).max()) <= 2


@dataclass
class Verdict:
    classified: bool
    girth8: bool
    witness: ClassificationWitness | None = None
    seed: object = None
    millis: int = 0

    @property
    def agree(self) -> bool:
        return self.classified == self.girth8

    def to_dict(self) -> dict:
        w = self.witness.to_dict() if self.witness else {k: None for k in ("case", "a", "zeta", "u", "v", "s")}
        return {**w, "girth8": self.girth8, "agree": self.agree}


def theorem1_equivalence(inst: ProblemInstance, engine: str = "bfs", warn_only: bool = False) -> Verdict:
    """Run the classifier and the girth test on the F_{q^M} graph."""
    t0 = time.perf_counter()
    w = classify(inst, warn_only=warn_only)
    ok, seed = girth_at_least_8(build_qM_instance(inst), engine)
    millis = int((time.perf_counter() - t0) * 1000)
    return Verdict(w is not None, ok, w, seed, millis)
