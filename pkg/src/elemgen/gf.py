"""Finite fields GF(q), q = p^m, in an explicit quotient representation.

An element of GF(p^m) is a polynomial of degree < m in a generator g over
GF(p), reduced by a monic irreducible modulus.  Elements are stored as a
single integer *code*: the digit vector (c_0, ..., c_{m-1}) read base p,
code = c_0 + c_1 p + ... + c_{m-1} p^{m-1}.  For m = 1 the code is the
residue itself.

Besides scalar elements the field exposes vectorised helpers acting on
numpy arrays of codes; the polynomial ring uses these for its kernels.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_Q = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class FieldError(ValueError):
    pass


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m over GF(p).

    Candidates are ordered by the base-p integer of their ascending
    coefficients below the leading 1.  For m = 1 the placeholder X is
    returned; it plays no role in the arithmetic.
    """
    if not is_prime(p):
        raise FieldError(f"p = {p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    if m == 1:
        return (0, 1)
    from .polyring import Poly, is_irreducible

    base = GF(p)
    for idx in range(p**m):
        low = [(idx // p**i) % p for i in range(m)]
        f = Poly(base, low + [1])
        if is_irreducible(f):
            return tuple(low + [1])
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def _polymulmod_small(a, b, mod, p):
    # digit lists, mod monic of degree m
    m = len(mod) - 1
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for i in range(m + 1):
                prod[k - m + i] = (prod[k - m + i] - c * mod[i]) % p
    return prod[:m]


class GF:
    """The field GF(p^m) with a fixed modulus.

    Instances are interned per (p, m, modulus), so identity comparison and
    equality agree.
    """

    _cache: dict = {}

    def __new__(cls, p: int, m: int = 1, modulus=None):
        if not is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        if p >= MAX_Q:
            raise FieldError(f"p = {p} exceeds the supported range p < 2^16")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        if p**m > MAX_Q:
            raise FieldError(f"q = {p}^{m} exceeds the supported range q <= 2^16")
        if modulus is None or m == 1:
            modulus = default_modulus(p, m) if m > 1 else (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        key = (p, m, modulus)
        self = cls._cache.get(key)
        if self is not None:
            return self
        if m > 1:
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {m}")
        self = super().__new__(cls)
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._tables = None
        if m > 1:
            from .polyring import Poly, is_irreducible

            if not is_irreducible(Poly(GF(p), list(modulus))):
                raise FieldError(f"modulus {list(modulus)} is reducible over GF({p})")
        cls._cache[key] = self
        return self

    def __reduce__(self):
        return (GF, (self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    # -- tables (extension fields only) -------------------------------------

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        codes = np.arange(q, dtype=np.int64)
        digits = np.stack([(codes // p**i) % p for i in range(m)], axis=1)
        pw = p ** np.arange(m, dtype=np.int64)
        # reduction of g^k, k < 2m-1, to digit vectors
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        cur = [1] + [0] * (m - 1)
        gen = [0, 1] + [0] * (m - 2)
        for k in range(2 * m - 1):
            red[k] = cur
            cur = _polymulmod_small(cur, gen, self.modulus, p)
        # log / exp tables through a primitive element
        exp = np.zeros(q - 1, dtype=np.int64)
        order_checks = [(q - 1) // r for r in prime_factors(q - 1)]
        for cand in range(2, q):
            cd = digits[cand].tolist()
            seq = []
            cur = [1] + [0] * (m - 1)
            for _ in range(q - 1):
                seq.append(cur)
                cur = _polymulmod_small(cur, cd, self.modulus, p)
            enc = [sum(c * p**i for i, c in enumerate(v)) for v in seq]
            if all(enc[e] != 1 for e in order_checks):
                exp[:] = enc
                break
        else:  # pragma: no cover
            raise AssertionError("no primitive element")
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self._tables = (digits, pw, red, exp, log)
        return self._tables

    @property
    def tables(self):
        return self._tables or self._build_tables()

    # -- scalar interface -----------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        """Element from a code, a digit list, or an existing element."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            if len(value) != self.m:
                raise FieldError(f"expected {self.m} digits")
            code = sum((int(d) % self.p) * self.p**i for i, d in enumerate(value))
            return FieldElement(self, code)
        code = int(value)
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} outside [0, {self.q})")
        return FieldElement(self, code)

    def from_int(self, n: int) -> "FieldElement":
        """The image of the integer n (n times the unit)."""
        return FieldElement(self, int(n) % self.p)

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    def units(self):
        return [FieldElement(self, c) for c in range(1, self.q)]

    def digits(self, code: int) -> tuple[int, ...]:
        p = self.p
        return tuple((code // p**i) % p for i in range(self.m))

    # scalar ops on codes
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        d = self.tables[0]
        return int(((d[a] + d[b]) % self.p) @ self.tables[1])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        d = self.tables[0]
        return int(((-d[a]) % self.p) @ self.tables[1])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        _, _, _, exp, log = self.tables
        return int(exp[(log[a] + log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        _, _, _, exp, log = self.tables
        return int(exp[(-log[a]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if self.m == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 1 if e == 0 else 0
        _, _, _, exp, log = self.tables
        return int(exp[(int(log[a]) * e) % (self.q - 1)])

    # -- vectorised ops on int64 code arrays ----------------------------------

    def vadd(self, a, b):
        if self.m == 1:
            return (a + b) % self.p
        digits, pw = self.tables[:2]
        return ((digits[a] + digits[b]) % self.p) @ pw

    def vneg(self, a):
        if self.m == 1:
            return (-a) % self.p
        digits, pw = self.tables[:2]
        return ((-digits[a]) % self.p) @ pw

    def vsub(self, a, b):
        if self.m == 1:
            return (a - b) % self.p
        digits, pw = self.tables[:2]
        return ((digits[a] - digits[b]) % self.p) @ pw

    def vmul(self, a, b):
        if self.m == 1:
            return a * b % self.p
        _, _, _, exp, log = self.tables
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vscale(self, a, c: int):
        if c == 1:
            return a
        if self.m == 1:
            return a * c % self.p
        if c == 0:
            return np.zeros_like(a)
        _, _, _, exp, log = self.tables
        out = exp[(log[a] + log[c]) % (self.q - 1)]
        return np.where(a == 0, 0, out)


@lru_cache(maxsize=None)
def _frobenius_inverse_exp(p: int, m: int) -> int:
    return p ** (m - 1)


class FieldElement:
    """An element of a GF instance.  Immutable; compares by field and code."""

    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "code", int(code))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (FieldElement, (self.field, self.code))

    @property
    def digits(self) -> tuple[int, ...]:
        return self.field.digits(self.code)

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("operands belong to different fields")
            return other.code
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.code))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.code, self.field.inv(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(o, self.field.inv(self.code)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.code))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"{self.field!r}({self.code})"


def ff_arith(a: FieldElement, b: FieldElement, kind: str) -> FieldElement:
    if a.field is not b.field:
        raise FieldError("operands belong to different fields")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def ff_inv(a: FieldElement) -> FieldElement:
    if not a:
        raise ZeroDivisionError("zero has no inverse")
    return a.inverse()


def pth_root(a: FieldElement) -> FieldElement:
    """Inverse Frobenius: the unique r with r^p = a, namely a^(p^(m-1))."""
    f = a.field
    return FieldElement(f, f.pow(a.code, _frobenius_inverse_exp(f.p, f.m)))
