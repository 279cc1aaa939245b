"""Finite fields F_{p^k} with integer-encoded elements.

An element of F_{p^k} is a coefficient vector (c_0, ..., c_{k-1}) over F_p,
read modulo a fixed monic irreducible polynomial.  Throughout the package the
vector is also handled as its *canonical encoding*, the base-p integer
c_0 + c_1 p + ... + c_{k-1} p^{k-1}.  Hot paths work on encodings (plain ints
or numpy int arrays); :class:`FieldElement` is the value type at the API edge.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_DEGREE = 12
MAX_ORDER = 2**14
# q x q addition tables are only materialized below this size
_ADD_TABLE_LIMIT = 1024


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def lcm_upto(mn: int) -> int:
    """lcm(2, 3, ..., mn); 1 for mn == 1."""
    if mn < 1:
        raise ValueError(f"mn must be >= 1, got {mn}")
    return math.lcm(*range(2, mn + 1)) if mn >= 2 else 1


# --- dense polynomial helpers over F_p (coefficient lists, constant first) ---

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(m: list[int], p: int) -> bool:
    """Ben-Or test: gcd(x^{p^i} - x, m) == 1 for 1 <= i <= deg/2."""
    k = len(m) - 1
    if k == 1:
        return True
    if m[0] == 0:
        return False
    xp = [0, 1]
    for _ in range(k // 2):
        xp = _ppowmod(xp, p, m, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(m, _trim(diff), p)) > 1:
            return False
    return True


def _minimal_irreducible(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        m = low + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")  # unreachable


@dataclass(frozen=True)
class FieldSpec:
    """F_{p^k} presented as F_p[x] / (modulus)."""

    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")

    def __repr__(self):
        return f"FieldSpec({self.name})"

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def name(self) -> str:
        return str(self.p) if self.k == 1 else f"{self.p}^{self.k}"

    # -- encoding -----------------------------------------------------------

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.k:
            raise FieldError(f"expected {self.k} coefficients, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def decode(self, value: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self._digits[value])

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to another field")
            return value
        if isinstance(value, (tuple, list)):
            value = self.encode(value)
        value = int(value)
        if not 0 <= value < self.q:
            raise FieldError(f"encoding {value} outside [0, {self.q})")
        return FieldElement(self, value)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(self.q)]

    def __iter__(self) -> Iterator["FieldElement"]:
        return iter(self.elements())

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def generator(self) -> "FieldElement":
        """The class of x, i.e. a root of the modulus (the prime itself is 1 for k = 1)."""
        return FieldElement(self, self.p if self.k > 1 else 0)

    # -- tables -------------------------------------------------------------

    @cached_property
    def _digits(self) -> np.ndarray:
        vals = np.arange(self.q, dtype=np.int64)
        return np.stack([(vals // self.p**i) % self.p for i in range(self.k)], axis=1)

    @cached_property
    def _place(self) -> np.ndarray:
        return self.p ** np.arange(self.k, dtype=np.int64)

    @cached_property
    def _mulx(self) -> np.ndarray:
        """k x k matrix M with (v @ M) % p == v * x for coefficient row vectors v."""
        k, p = self.k, self.p
        mat = np.zeros((k, k), dtype=np.int64)
        for i in range(k - 1):
            mat[i, i + 1] = 1
        # x^k = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1})
        mat[k - 1, :] = [(-c) % p for c in self.modulus[:k]]
        return mat

    @cached_property
    def _logexp(self) -> tuple[np.ndarray, np.ndarray, int]:
        q, p = self.q, self.p
        if q == 2:
            exp = np.array([1], dtype=np.int64)
            log = np.full(q, -1, dtype=np.int64)
            log[1] = 0
            return log, exp, 1
        for g in range(2, q):
            mat = self._mul_matrix(g)
            exp = np.empty(q - 1, dtype=np.int64)
            v = np.zeros(self.k, dtype=np.int64)
            v[0] = 1
            ok = True
            for e in range(q - 1):
                code = int(v @ self._place)
                if e > 0 and code == 1:
                    ok = False
                    break
                exp[e] = code
                v = (v @ mat) % p
            if ok:
                log = np.full(q, -1, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                return log, exp, g
        raise FieldError("no primitive element found")  # unreachable

    def _mul_matrix(self, value: int) -> np.ndarray:
        """Matrix of multiplication by the element with the given encoding."""
        k, p = self.k, self.p
        rows = []
        v = self._digits[value].copy()
        for _ in range(k):
            rows.append(v.copy())
            v = (v @ self._mulx) % p
        # row i is value * x^i, so (c @ rows) is value * c
        return np.array(rows, dtype=np.int64)

    @property
    def primitive(self) -> "FieldElement":
        return FieldElement(self, self._logexp[2])

    @cached_property
    def add_table(self) -> np.ndarray:
        if self.q > _ADD_TABLE_LIMIT:
            raise FieldError(f"add table not available for q = {self.q}")
        a = np.arange(self.q)
        return self.vadd(a[:, None], a[None, :]).astype(np.int32)

    @cached_property
    def sub_table(self) -> np.ndarray:
        if self.q > _ADD_TABLE_LIMIT:
            raise FieldError(f"sub table not available for q = {self.q}")
        a = np.arange(self.q)
        return self.vsub(a[:, None], a[None, :]).astype(np.int32)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return (((-self._digits) % self.p) @ self._place).astype(np.int64)

    # -- vectorized arithmetic on encodings ------------------------------------

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        d = (self._digits[a] + self._digits[b]) % self.p
        return d @ self._place

    def vneg(self, a) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def vsub(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a - b) % self.p
        d = (self._digits[a] - self._digits[b]) % self.p
        return d @ self._place

    def vmul(self, a, b) -> np.ndarray:
        log, exp, _ = self._logexp
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, e: int) -> np.ndarray:
        if e < 0:
            raise FieldError("negative exponent")
        log, exp, _ = self._logexp
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = exp[(log[a] * (e % (self.q - 1))) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        log, exp, _ = self._logexp
        return exp[(-log[a]) % (self.q - 1)]

    # -- scalar arithmetic on encodings ---------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return int(self.vadd(a, b))

    def sub(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a - b) % self.p
        return int(self.vsub(a, b))

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        log, exp, _ = self._logexp
        return int(exp[(log[a] + log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        log, exp, _ = self._logexp
        return int(exp[(-log[a]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise FieldError("negative exponent")
        if e == 0:
            return 1
        if a == 0:
            return 0
        log, exp, _ = self._logexp
        return int(exp[(int(log[a]) * (e % (self.q - 1))) % (self.q - 1)])

    def frobenius_root(self, a: int, w: int) -> int:
        """The unique b with b^w == a, for w a power of p."""
        t = _log_p(w, self.p)
        return self.pow(a, self.p ** ((-t) % self.k))

    def frob_exponent(self, num: int, den: int = 1) -> int:
        """Power of p acting on this field as the Frobenius map x -> x^(num/den)."""
        t = _log_p(num, self.p) - _log_p(den, self.p)
        return self.p ** (t % self.k)


def _log_p(w: int, p: int) -> int:
    t = 0
    while w % p == 0 and w > 1:
        w //= p
        t += 1
    if w != 1:
        raise FieldError(f"{w * p**t} is not a power of {p}")
    return t


@dataclass(frozen=True, eq=True)
class FieldElement:
    field: FieldSpec
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.decode(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands from different fields")
            return other.value
        if isinstance(other, int):
            # integers act through the prime subfield
            return self.field.encode([other % self.field.p] + [0] * (self.field.k - 1))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(o)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return str(self.value)


# --- public operations -------------------------------------------------------

@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> FieldSpec:
    """F_{p^k} with the least (by encoding) monic irreducible modulus."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not 1 <= k <= MAX_DEGREE:
        raise FieldError(f"degree {k} outside [1, {MAX_DEGREE}]")
    if p**k > MAX_ORDER:
        raise FieldError(f"field of order {p}^{k} exceeds the desk-scale cap {MAX_ORDER}")
    return FieldSpec(p, k, _minimal_irreducible(p, k))


_FIELD_RE = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")


def parse_field(text: str) -> FieldSpec:
    """Parse "p" or "p^k"; "9" is rejected, write "3^2"."""
    m = _FIELD_RE.match(text)
    if not m:
        raise FieldError(f"malformed field spec {text!r}")
    p = int(m.group(1))
    k = int(m.group(2)) if m.group(2) else 1
    if not is_prime(p):
        raise FieldError(f"{p} is not prime (write prime powers as p^k)")
    return make_field(p, k)


def arith(op: str, *operands):
    """Dispatch for add, sub, mul, neg, inv, pow on FieldElements."""
    if op == "add":
        a, b = operands
        return a + b
    if op == "sub":
        a, b = operands
        return a - b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "neg":
        (a,) = operands
        return -a
    if op == "inv":
        (a,) = operands
        return a.inverse()
    if op == "pow":
        a, e = operands
        return a**e
    raise ValueError(f"unknown op {op!r}")


def enumerate_field(field: FieldSpec) -> list[FieldElement]:
    return field.elements()


@lru_cache(maxsize=None)
def embedding_table(source: FieldSpec, target: FieldSpec) -> np.ndarray:
    """Encodings of the images of every source element under the fixed embedding."""
    if source.p != target.p or target.k % source.k:
        raise FieldError(f"F_{source.name} does not embed in F_{target.name}")
    # minimal root of the source modulus in the target
    vals = np.arange(target.q)
    acc = np.zeros(target.q, dtype=np.int64)
    power = np.ones(target.q, dtype=np.int64)
    for c in source.modulus:
        term = target.vmul(power, c)  # c lies in the prime subfield: encoding c is c
        acc = target.vadd(acc, term)
        power = target.vmul(power, vals)
    roots = np.flatnonzero(acc == 0)
    if len(roots) == 0:
        raise RuntimeError("source modulus has no root in target")  # impossible when k | K
    gamma = int(roots[0])
    gpow = [1]
    for _ in range(source.k - 1):
        gpow.append(target.mul(gpow[-1], gamma))
    table = np.zeros(source.q, dtype=np.int64)
    digits = source._digits
    for i, g in enumerate(gpow):
        table = target.vadd(table, target.vmul(digits[:, i], g))
    return table


def embed(e: FieldElement, target: FieldSpec) -> FieldElement:
    return FieldElement(target, int(embedding_table(e.field, target)[e.value]))


def extension(field: FieldSpec, degree: int) -> FieldSpec:
    return make_field(field.p, field.k * degree)
