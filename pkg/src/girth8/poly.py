"""Univariate and bivariate polynomials over a FieldSpec, plus the gadgets used
to state the girth-eight classification (rho_a, Delta_k, K_p, Phi_p and the
mu / nu / pi residual transforms).

Coefficients are stored as canonical integer encodings of field elements.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import FieldElement, FieldError, FieldSpec, _log_p


def _enc(field: FieldSpec, c) -> int:
    if isinstance(c, FieldElement):
        if c.field != field:
            raise FieldError("coefficient from another field")
        return c.value
    return int(c)


class UniPoly:
    """Dense univariate polynomial; ``coeffs[i]`` is the coefficient of x^i."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs: Iterable = ()):
        cs = [_enc(field, c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, field: FieldSpec, deg: int, coeff=1) -> "UniPoly":
        return cls(field, [0] * deg + [_enc(field, coeff)])

    @classmethod
    def x(cls, field: FieldSpec) -> "UniPoly":
        return cls.monomial(field, 1)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _check(self, other: "UniPoly"):
        if other.field != self.field:
            raise FieldError("polynomials over different fields")

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        self._check(other)
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(F, [F.add(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return self.scale(other)
        self._check(other)
        F = self.field
        if self.is_zero() or other.is_zero():
            return UniPoly(F)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return UniPoly(F, out)

    __rmul__ = __mul__

    def scale(self, c) -> "UniPoly":
        c = _enc(self.field, c)
        return UniPoly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def __pow__(self, e: int) -> "UniPoly":
        result = UniPoly(self.field, [1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def compose(self, inner: "UniPoly") -> "UniPoly":
        """self(inner(x)) by Horner's rule."""
        self._check(inner)
        out = UniPoly(self.field)
        for c in reversed(self.coeffs):
            out = out * inner + UniPoly(self.field, [c])
        return out

    def __call__(self, x) -> FieldElement:
        F = self.field
        xv = _enc(F, x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, xv), c)
        return FieldElement(F, acc)

    def veval(self, xs) -> np.ndarray:
        F = self.field
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = F.vadd(F.vmul(acc, xs), c)
        return acc

    def values(self) -> np.ndarray:
        """Value table over the whole field, indexed by encoding."""
        return self.veval(np.arange(self.field.q))

    def to_bipoly(self, var: str = "x") -> "BiPoly":
        if var == "x":
            return BiPoly(self.field, {(i, 0): c for i, c in enumerate(self.coeffs)})
        return BiPoly(self.field, {(0, j): c for j, c in enumerate(self.coeffs)})

    def __repr__(self):
        return f"UniPoly({format_poly(self.to_bipoly())})"

    def __str__(self):
        return format_poly(self.to_bipoly())


class BiPoly:
    """Sparse bivariate polynomial: ``terms[(i, j)]`` is the coefficient of x^i y^j."""

    __slots__ = ("field", "terms", "degx", "degy")

    def __init__(self, field: FieldSpec, terms: Mapping | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            c = _enc(field, c)
            if c:
                clean[(int(i), int(j))] = c
        self.field = field
        self.terms = clean
        self.degx = max((i for i, _ in clean), default=-1)
        self.degy = max((j for _, j in clean), default=-1)

    @classmethod
    def monomial(cls, field: FieldSpec, i: int, j: int, coeff=1) -> "BiPoly":
        return cls(field, {(i, j): coeff})

    @classmethod
    def from_product(cls, f: UniPoly, g: UniPoly) -> "BiPoly":
        """f(x) * g(y)."""
        F = f.field
        return cls(F, {(i, j): F.mul(a, b) for i, a in enumerate(f.coeffs) if a
                       for j, b in enumerate(g.coeffs) if b})

    def coeff(self, i: int, j: int) -> int:
        return self.terms.get((i, j), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def _check(self, other: "BiPoly"):
        if other.field != self.field:
            raise FieldError("polynomials over different fields")

    def __add__(self, other: "BiPoly") -> "BiPoly":
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = F.add(out.get(key, 0), c)
        return BiPoly(F, out)

    def __neg__(self) -> "BiPoly":
        return BiPoly(self.field, {k: self.field.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            return self.scale(other)
        self._check(other)
        F = self.field
        out: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = F.add(out.get(key, 0), F.mul(a, b))
        return BiPoly(F, out)

    __rmul__ = __mul__

    def scale(self, c) -> "BiPoly":
        c = _enc(self.field, c)
        return BiPoly(self.field, {k: self.field.mul(c, v) for k, v in self.terms.items()})

    def __call__(self, x, y) -> FieldElement:
        F = self.field
        xv, yv = _enc(F, x), _enc(F, y)
        acc = 0
        for (i, j), c in self.terms.items():
            acc = F.add(acc, F.mul(c, F.mul(F.pow(xv, i), F.pow(yv, j))))
        return FieldElement(F, acc)

    def veval(self, xs, ys) -> np.ndarray:
        F = self.field
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        xs, ys = np.broadcast_arrays(xs, ys)
        acc = np.zeros(xs.shape, dtype=np.int64)
        for (i, j), c in self.terms.items():
            acc = F.vadd(acc, F.vmul(c, F.vmul(F.vpow(xs, i), F.vpow(ys, j))))
        return acc

    def table(self) -> np.ndarray:
        """Value table T[x, y] over the whole field."""
        a = np.arange(self.field.q)
        return self.veval(a[:, None], a[None, :])

    def swap(self) -> "BiPoly":
        """f(y, x)."""
        return BiPoly(self.field, {(j, i): c for (i, j), c in self.terms.items()})

    def frobenius(self, w: int) -> "BiPoly":
        """self ** w for w a power of the characteristic."""
        F = self.field
        _log_p(w, F.p)
        out: dict = {}
        for (i, j), c in self.terms.items():
            key = (i * w, j * w)
            out[key] = F.add(out.get(key, 0), F.pow(c, w))
        return BiPoly(F, out)

    def reduce(self) -> "BiPoly":
        """Canonical representative as a function on F x F (x^q = x, y^q = y)."""
        F = self.field
        q = F.q

        out: dict = {}
        for (i, j), c in self.terms.items():
            key = (_reduce_exp(i, q), _reduce_exp(j, q))
            out[key] = F.add(out.get(key, 0), c)
        return BiPoly(F, out)

    def subst_x(self, sigma: UniPoly) -> "BiPoly":
        """self(sigma(x), y), reduced as a function on the field."""
        F = self.field
        if sigma.field != F:
            raise FieldError("polynomials over different fields")
        nz = [(i, c) for i, c in enumerate(sigma.coeffs) if c]
        out = BiPoly(F)
        cache: dict[int, UniPoly] = {}

        def spow(e: int) -> UniPoly:
            if e not in cache:
                if len(nz) == 1:
                    d, c = nz[0]
                    cache[e] = UniPoly.monomial(F, _reduce_exp(d * e, F.q), F.pow(c, e))
                else:
                    cache[e] = _reduce_uni(sigma**e)
            return cache[e]

        for (i, j), c in self.terms.items():
            u = spow(i)
            out = out + BiPoly(F, {(d, j): F.mul(c, a) for d, a in enumerate(u.coeffs) if a})
        return out.reduce()

    def is_mixed(self) -> bool:
        return all(i >= 1 and j >= 1 for i, j in self.terms)

    def x_part(self) -> UniPoly:
        """The univariate polynomial in x when no y appears."""
        if any(j for _, j in self.terms):
            raise ValueError("polynomial depends on y")
        return UniPoly(self.field, [self.coeff(i, 0) for i in range(self.degx + 1)])

    def y_part(self) -> UniPoly:
        if any(i for i, _ in self.terms):
            raise ValueError("polynomial depends on x")
        return UniPoly(self.field, [self.coeff(0, j) for j in range(self.degy + 1)])

    def __repr__(self):
        return f"BiPoly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def _reduce_exp(e: int, q: int) -> int:
    """Exponent of the monomial equal to x^e as a function on F_q."""
    return 0 if e == 0 else (e - 1) % (q - 1) + 1


def _reduce_uni(u: UniPoly) -> UniPoly:
    F = u.field
    q = F.q
    out = [0] * min(len(u.coeffs), q)
    for e, c in enumerate(u.coeffs):
        r = _reduce_exp(e, q)
        out[r] = F.add(out[r], c)
    return UniPoly(F, out)


def compose_uni(outer: UniPoly, inner: UniPoly) -> UniPoly:
    return outer.compose(inner)


def poly_arith(op: str, a, b=None):
    """add, sub, mul, scale (b is a scalar) and compose_uni on polynomials."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    if op == "compose_uni":
        return a.compose(b)
    raise ValueError(f"unknown op {op!r}")


# --- text format ---------------------------------------------------------------

class PolyParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([xy])|(\^)|(\*)|(\+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        kind = ["num", "var", "^", "*", "+"][m.lastindex - 1]
        toks.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    return toks


def parse_poly(text: str, field: FieldSpec) -> BiPoly:
    """Parse ``term ('+' term)*`` with terms ``[coeff '*'] mono | coeff``."""
    toks = _tokenize(text)
    i = 0
    terms: dict = {}

    def peek(kind=None):
        if i < len(toks) and (kind is None or toks[i][0] == kind):
            return toks[i]
        return None

    def expect(kind, what):
        nonlocal i
        t = peek()
        if t is None:
            raise PolyParseError(f"expected {what}, found end of input", text, len(text))
        if t[0] != kind:
            raise PolyParseError(f"expected {what}, found {t[1]!r}", text, t[2])
        i += 1
        return t

    def var_power(var):
        nonlocal i
        expect("var", var)
        if peek("^"):
            i += 1
            return int(expect("num", "exponent")[1])
        return 1

    if not toks:
        raise PolyParseError("empty polynomial", text, 0)
    while True:
        coeff = 1
        ex = ey = 0
        t = peek()
        if t is None:
            raise PolyParseError("expected term, found end of input", text, len(text))
        if t[0] == "num":
            coeff = int(t[1])
            if coeff >= field.q:
                raise PolyParseError(f"coefficient {coeff} outside [0, {field.q})", text, t[2])
            i += 1
            if peek("*"):
                i += 1
                if not peek("var"):
                    bad = peek()
                    raise PolyParseError(
                        f"expected x or y, found {bad[1]!r}" if bad else "expected x or y, found end of input",
                        text, bad[2] if bad else len(text))
            else:
                key = (0, 0)
                terms[key] = field.add(terms.get(key, 0), coeff)
                if peek("+"):
                    i += 1
                    continue
                if peek() is None:
                    break
                raise PolyParseError(f"unexpected token {peek()[1]!r}", text, peek()[2])
        t = peek("var")
        if t is None:
            bad = peek()
            raise PolyParseError(f"unexpected token {bad[1]!r}", text, bad[2])
        if t[1] == "x":
            ex = var_power("x")
            if peek("*"):
                i += 1
                t2 = peek()
                if t2 is None or t2 != ("var", "y", t2[2]):
                    if t2 is None:
                        raise PolyParseError("expected y, found end of input", text, len(text))
                    raise PolyParseError(f"expected y, found {t2[1]!r}", text, t2[2])
                ey = var_power("y")
        else:
            ey = var_power("y")
        key = (ex, ey)
        terms[key] = field.add(terms.get(key, 0), coeff)
        if peek("+"):
            i += 1
            continue
        if peek() is None:
            break
        raise PolyParseError(f"unexpected token {peek()[1]!r}", text, peek()[2])
    return BiPoly(field, terms)


def format_poly(h: BiPoly) -> str:
    if h.is_zero():
        return "0"
    parts = []
    for (i, j) in sorted(h.terms, reverse=True):
        c = h.terms[(i, j)]
        mono = []
        if i:
            mono.append("x" if i == 1 else f"x^{i}")
        if j:
            mono.append("y" if j == 1 else f"y^{j}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(mono))
        else:
            parts.append(f"{c}*" + "*".join(mono))
    return " + ".join(parts)


def parse_uni(text: str, field: FieldSpec) -> UniPoly:
    """A univariate polynomial written in either x or y."""
    b = parse_poly(text, field)
    if all(j == 0 for _, j in b.terms):
        return b.x_part()
    if all(i == 0 for i, _ in b.terms):
        return b.y_part()
    raise ValueError(f"{text!r} is not univariate")


# --- classification gadgets ------------------------------------------------------

def rho(a) -> UniPoly:
    """rho_a(x) = x (x - a)."""
    F = a.field
    return UniPoly(F, [0, F.neg(a.value), 1])


def delta_k(f: BiPoly, xs: Sequence, ys: Sequence) -> FieldElement:
    """sum_i f(x_i, y_i) - f(x_{i+1}, y_i), indices cyclic."""
    k = len(xs)
    if k < 2 or len(ys) != k:
        raise ValueError("delta_k needs k >= 2 points and k lines")
    F = f.field
    total = 0
    for i in range(k):
        total = F.add(total, F.sub(f(xs[i], ys[i]).value, f(xs[(i + 1) % k], ys[i]).value))
    return FieldElement(F, total)


def max_fiber_size(T: UniPoly, field: FieldSpec | None = None) -> int:
    field = field or T.field
    if T.field != field:
        raise FieldError("T must be over the enumerated field; embed it first")
    if field.q > 2**14:
        raise FieldError("field too large to enumerate")
    return int(np.bincount(T.values(), minlength=field.q).max())


def is_injective_over(T: UniPoly, field: FieldSpec | None = None) -> bool:
    return max_fiber_size(T, field) == 1


def k_p_set(p: int, bound: int) -> list[int]:
    """Powers of p in [1, bound]."""
    out = []
    w = 1
    while w <= bound:
        out.append(w)
        w *= p
    return out


def is_power_of(w: int, p: int) -> bool:
    if w < 1:
        return False
    while w % p == 0:
        w //= p
    return w == 1


def phi_p(u: int, v: int, p: int, ibound: int, jbound: int) -> set[tuple[int, int]]:
    """{(i, j) in K_p^2 : i v = j u}, with i <= ibound and j <= jbound."""
    if not (is_power_of(u, p) and is_power_of(v, p)):
        raise ValueError(f"u = {u} and v = {v} must be powers of {p}")
    return {(i, j) for i in k_p_set(p, ibound) for j in k_p_set(p, jbound) if i * v == j * u}


def _require_char(h: BiPoly, p: int):
    if h.field.p != p:
        raise ValueError(f"polynomial has characteristic {h.field.p}, not {p}")


def mu_transform(h: BiPoly, a, u: int, v: int, p: int) -> BiPoly:
    """h - sum over Phi_p(u, v) of h_{2i,j} rho_a(x)^i y^j (2i <= degx h, j <= degy h)."""
    _require_char(h, p)
    F = h.field
    a = F.element(a)
    ra = rho(a)
    out = h
    for i, j in sorted(phi_p(u, v, p, max(h.degx, 0) // 2, max(h.degy, 0))):
        c = h.coeff(2 * i, j)
        if c:
            term = BiPoly(F, {(d, j): e for d, e in enumerate((ra**i).coeffs)})
            out = out - term.scale(c)
    return out


def nu_transform(h: BiPoly, a, u: int, v: int, p: int) -> BiPoly:
    """h - sum over Phi_p(v, u) of h_{i,2j} x^i rho_a(y)^j."""
    return mu_transform(h.swap(), a, u, v, p).swap()


def pi_transform(h: BiPoly, u: int, v: int, p: int) -> BiPoly:
    """h - sum over Phi_p(u, v) of h_{i,j} x^i y^j."""
    _require_char(h, p)
    idx = phi_p(u, v, p, max(h.degx, 0), max(h.degy, 0))
    return BiPoly(h.field, {k: c for k, c in h.terms.items() if k not in idx})


def recognize_char_power(T: UniPoly, p: int) -> int | None:
    """u if T == x^u with u a power of p."""
    d = T.degree
    if d < 1 or T.coeffs[-1] != 1 or any(T.coeffs[:-1]):
        return None
    return d if is_power_of(d, p) else None


def recognize_rho_power(T: UniPoly, p: int) -> tuple[FieldElement, int] | None:
    """(a, v) if T == rho_a(x)^v with v a power of p.

    In characteristic p, rho_a^v = x^{2v} - a^v x^v, so a is read off the
    x^v coefficient through the inverse Frobenius and then checked.
    """
    F = T.field
    d = T.degree
    if d < 2 or d % 2 or not T.is_monic():
        return None
    v = d // 2
    if not is_power_of(v, p):
        return None
    c = T.coeff(v)
    a = FieldElement(F, F.frobenius_root(F.neg(c), v))
    if rho(a) ** v != T:
        return None
    return a, v


def h_slice(h: BiPoly, j: int) -> UniPoly:
    """Coefficient of y^j in h, as a polynomial in x."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return UniPoly(h.field, [h.coeff(i, j) for i in range(max(h.degx, 0) + 1)])
