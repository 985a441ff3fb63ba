"""Univariate polynomials over GF(q).

Coefficients are numpy int64 arrays of field codes in ascending degree with
no trailing zero; the zero polynomial is the empty array.  Multiplication of
long operands goes through Kronecker substitution on gmpy2 integers, and
long division through Newton inversion of the reversed divisor, so the
exponentially large entries produced by the decomposition pipeline stay
tractable.
"""

from __future__ import annotations

import itertools
import math
import re

import gmpy2
import numpy as np

from .gf import GF, FieldElement, FieldError, pth_root

_SMALL = 48


class PolyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# kernels on code arrays


def _trim(c):
    n = len(c)
    if n == 0 or c[-1] != 0:
        return c
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if len(nz) else c[:0]


def _add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] = F.vadd(a[: len(b)], b)
    return _trim(out)


def _sub(F, a, b):
    if len(a) >= len(b):
        out = a.copy()
        out[: len(b)] = F.vsub(a[: len(b)], b)
    else:
        out = F.vneg(b)
        out[: len(a)] = F.vsub(a, b[: len(a)])
    return _trim(out)


def _pack(arr, s):
    raw = np.ascontiguousarray(arr, dtype="<u8").view(np.uint8).reshape(-1, 8)[:, :s]
    return gmpy2.mpz.from_bytes(raw.tobytes(), "little")


def _unpack(z, count, s):
    raw = z.to_bytes(count * s, "little")
    b = np.frombuffer(raw, dtype=np.uint8).reshape(count, s)
    wide = np.zeros((count, 8), dtype=np.uint8)
    wide[:, :s] = b
    return wide.view("<u8").ravel().astype(np.int64)


def _slot_bytes(bound):
    return max(1, (int(bound).bit_length() + 7) // 8)


def _mul_prime(p, a, b):
    na, nb = len(a), len(b)
    if min(na, nb) <= _SMALL:
        return np.convolve(a, b) % p
    s = _slot_bytes(min(na, nb) * (p - 1) ** 2)
    z = _pack(a, s) * _pack(b, s) if a is not b else _pack(a, s) ** 2
    return _unpack(z, na + nb - 1, s) % p


def _mul_ext(F, a, b):
    digits, pw, red = F.tables[:3]
    p, m = F.p, F.m
    A, B = digits[a], digits[b]
    na, nb = len(a), len(b)
    w = 2 * m - 1
    if min(na, nb) <= _SMALL:
        out = np.zeros((na + nb - 1, w), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                out[:, i + j] += np.convolve(A[:, i], B[:, j])
        out %= p
    else:
        s = _slot_bytes(min(na, nb) * m * (p - 1) ** 2)
        PA = np.zeros((na, w), dtype=np.int64)
        PA[:, :m] = A
        PB = np.zeros((nb, w), dtype=np.int64)
        PB[:, :m] = B
        z = _pack(PA.ravel(), s) * _pack(PB.ravel(), s)
        out = _unpack(z, (na + nb) * w, s).reshape(na + nb, w)[:-1] % p
    return ((out @ red) % p) @ pw


def _mul(F, a, b):
    if len(a) == 0 or len(b) == 0:
        return a[:0]
    if len(a) == 1:
        return _trim(F.vscale(b, int(a[0])))
    if len(b) == 1:
        return _trim(F.vscale(a, int(b[0])))
    if F.m == 1:
        return _trim(_mul_prime(F.p, a, b))
    return _trim(_mul_ext(F, a, b))


def _inv_series(F, g, k):
    """h with g*h = 1 mod X^k (g[0] != 0), by Newton iteration."""
    h = np.array([F.inv(int(g[0]))], dtype=np.int64)
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        e = _mul(F, g[:prec], h)[:prec]
        # h <- h + h (1 - g h)
        one_minus = F.vneg(e)
        if len(one_minus) == 0:
            one_minus = np.zeros(1, dtype=np.int64)
        one_minus = one_minus.copy()
        one_minus[0] = F.add(int(one_minus[0]), 1)
        corr = _mul(F, h, _trim(one_minus))[:prec]
        h = _add(F, h, corr)
        h = np.concatenate([h, np.zeros(max(0, prec - len(h)), dtype=np.int64)])[:prec]
    return h


def _divmod(F, f, g):
    if len(g) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    df, dg = len(f) - 1, len(g) - 1
    if df < dg:
        return f[:0], f
    lc_inv = F.inv(int(g[-1]))
    if dg == 0:
        return _trim(F.vscale(f, lc_inv)), f[:0]
    nq = df - dg + 1
    if nq <= _SMALL or dg <= 2:
        if dg <= 2 and nq > _SMALL:
            return _divmod_newton(F, f, g, nq)
        r = f.copy()
        qc = np.zeros(nq, dtype=np.int64)
        gs = F.vscale(g, lc_inv)  # monic divisor
        for i in range(nq - 1, -1, -1):
            c = int(r[i + dg])
            if c:
                qc[i] = c
                r[i : i + dg + 1] = F.vsub(r[i : i + dg + 1], F.vscale(gs, c))
        return _trim(F.vscale(qc, lc_inv)), _trim(r[:dg])
    return _divmod_newton(F, f, g, nq)


def _divmod_newton(F, f, g, nq):
    dg = len(g) - 1
    inv = _inv_series(F, g[::-1].copy(), nq)
    qrev = _mul(F, f[::-1][:nq].copy(), inv)[:nq]
    qrev = np.concatenate([qrev, np.zeros(nq - len(qrev), dtype=np.int64)])
    qc = _trim(qrev[::-1].copy())
    r = _sub(F, f, _mul(F, qc, g))
    assert len(r) <= dg
    return qc, r


# ---------------------------------------------------------------------------
# Poly


class Poly:
    """Element of F_q[X], immutable.

    ``Poly(F, coeffs)`` takes ascending coefficients as field codes,
    FieldElements or a numpy array.  Integers in arithmetic mean multiples
    of 1, so ``f + 1`` and ``2 * f`` behave as expected in any field.
    """

    __slots__ = ("field", "c", "_hash")

    def __init__(self, field: GF, coeffs=()):
        if isinstance(coeffs, np.ndarray):
            c = coeffs.astype(np.int64, copy=True)
            if len(c) and (c.min() < 0 or c.max() >= field.q):
                raise PolyError("coefficient code out of range")
        else:
            vals = []
            for x in coeffs:
                if isinstance(x, FieldElement):
                    if x.field is not field:
                        raise FieldError("coefficient from a different field")
                    vals.append(x.code)
                else:
                    x = int(x)
                    if not 0 <= x < field.q:
                        raise PolyError(f"coefficient code {x} outside [0, {field.q})")
                    vals.append(x)
            c = np.array(vals, dtype=np.int64)
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, field, c):
        self = cls.__new__(cls)
        c.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "_hash", None)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.field, [int(x) for x in self.c]))

    # construction helpers
    @classmethod
    def zero(cls, field):
        return cls._raw(field, np.zeros(0, dtype=np.int64))

    @classmethod
    def one(cls, field):
        return cls._raw(field, np.ones(1, dtype=np.int64))

    @classmethod
    def const(cls, field, value):
        if isinstance(value, FieldElement):
            value = value.code
        return cls(field, [int(value)])

    @classmethod
    def x(cls, field, power=1):
        c = np.zeros(power + 1, dtype=np.int64)
        c[power] = 1
        return cls._raw(field, c)

    # basic queries
    @property
    def degree(self) -> int:
        """Degree; -1 stands for the zero polynomial."""
        return len(self.c) - 1

    deg = degree

    @property
    def coeffs(self) -> list[int]:
        return [int(x) for x in self.c]

    def coeff(self, i: int) -> FieldElement:
        return FieldElement(self.field, int(self.c[i]) if 0 <= i < len(self.c) else 0)

    @property
    def lc(self) -> FieldElement:
        if not len(self.c):
            raise PolyError("zero polynomial has no leading coefficient")
        return FieldElement(self.field, int(self.c[-1]))

    def is_zero(self) -> bool:
        return len(self.c) == 0

    def is_constant(self) -> bool:
        return len(self.c) <= 1

    def is_unit(self) -> bool:
        return len(self.c) == 1

    def is_one(self) -> bool:
        return len(self.c) == 1 and self.c[0] == 1

    def constant(self) -> FieldElement:
        if len(self.c) > 1:
            raise PolyError("polynomial is not constant")
        return FieldElement(self.field, int(self.c[0]) if len(self.c) else 0)

    def monic(self) -> "Poly":
        if not len(self.c) or self.c[-1] == 1:
            return self
        return Poly._raw(self.field, self.field.vscale(self.c, self.field.inv(int(self.c[-1]))))

    def scale(self, k) -> "Poly":
        k = self._scalar(k)
        if k == 0:
            return Poly.zero(self.field)
        return Poly._raw(self.field, _trim(self.field.vscale(self.c, k)))

    def shift(self, k: int) -> "Poly":
        if not len(self.c):
            return self
        return Poly._raw(self.field, np.concatenate([np.zeros(k, dtype=np.int64), self.c]))

    def derivative(self) -> "Poly":
        F = self.field
        if len(self.c) <= 1:
            return Poly.zero(F)
        idx = np.arange(1, len(self.c)) % F.p
        out = np.array(
            [F.mul(int(x), int(i)) for x, i in zip(self.c[1:], idx)], dtype=np.int64
        ) if F.m > 1 else (self.c[1:] * idx) % F.p
        return Poly._raw(F, _trim(out))

    def __call__(self, x: FieldElement) -> FieldElement:
        F = self.field
        acc = 0
        xc = x.code if isinstance(x, FieldElement) else int(x) % F.p
        for c in reversed(self.c.tolist()):
            acc = F.add(F.mul(acc, xc), c)
        return FieldElement(F, acc)

    # arithmetic
    def _scalar(self, k):
        if isinstance(k, FieldElement):
            if k.field is not self.field:
                raise FieldError("scalar from a different field")
            return k.code
        return int(k) % self.field.p

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.field is not self.field:
                raise FieldError(f"field mismatch: {self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, (int, FieldElement)):
            k = self._scalar(other)
            return Poly._raw(self.field, np.array([k] if k else [], dtype=np.int64))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(self.field, _add(self.field, self.c, o.c))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(self.field, _sub(self.field, self.c, o.c))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(self.field, _sub(self.field, o.c, self.c))

    def __neg__(self):
        return Poly._raw(self.field, self.field.vneg(self.c))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly._raw(self.field, _mul(self.field, self.c, o.c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise PolyError("negative exponent")
        result, base = Poly.one(self.field), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        q, r = _divmod(self.field, self.c, o.c)
        return Poly._raw(self.field, q), Poly._raw(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise PolyError("division is not exact")
        return q

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field is other.field and np.array_equal(self.c, other.c)
        if isinstance(other, (int, FieldElement)):
            o = self._coerce(other)
            return np.array_equal(self.c, o.c)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.field.p, self.field.m, self.c.tobytes()))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return len(self.c) > 0

    def __len__(self):
        return len(self.c)

    def sort_key(self):
        """Degree first, then coefficients from the top; a total order."""
        return (len(self.c), tuple(self.c[::-1].tolist()))

    def __repr__(self):
        return format_poly(self)

    def __str__(self):
        return pretty(self)


def pretty(f: Poly, var: str = "X") -> str:
    if f.is_zero():
        return "0"
    terms = []
    for i in range(f.degree, -1, -1):
        c = int(f.c[i])
        if not c:
            continue
        cs = "" if (c == 1 and i > 0) else str(c)
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{cs}{var}")
        else:
            terms.append(f"{cs}{var}^{i}")
    return "+".join(terms)


def format_poly(f: Poly) -> str:
    """Text syntax ``[c0 c1 ... ck]`` with field codes, ascending."""
    return "[" + " ".join(str(int(x)) for x in f.c) + "]"


_POLY_RE = re.compile(r"\[([^\[\]]*)\]")


def parse_poly(field: GF, text: str) -> Poly:
    """Parse ``[c0 c1 ...]``; raises PolyError on malformed input."""
    text = text.strip()
    m = _POLY_RE.fullmatch(text)
    if not m:
        raise PolyError(f"malformed polynomial literal {text!r}")
    toks = m.group(1).split()
    vals = []
    for t in toks:
        if not re.fullmatch(r"\d+", t):
            raise PolyError(f"bad coefficient {t!r}")
        v = int(t)
        if v >= field.q:
            raise PolyError(f"coefficient {v} outside [0, {field.q})")
        vals.append(v)
    return Poly(field, vals)


def X(field: GF) -> Poly:
    return Poly.x(field)


def _same_field(*polys):
    F = polys[0].field
    for g in polys[1:]:
        if g.field is not F:
            raise FieldError("polynomials over different fields")
    return F


def poly_arith(f: Poly, g: Poly, kind: str) -> Poly:
    _same_field(f, g)
    if kind == "add":
        return f + g
    if kind == "sub":
        return f - g
    if kind == "mul":
        return f * g
    raise ValueError(f"unknown operation {kind!r}")


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    _same_field(f, g)
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    return divmod(f, g)


def gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd (zero only when both inputs are zero)."""
    _same_field(f, g)
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def xgcd(f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """(d, s, t) with d = s f + t g monic, d = gcd(f, g)."""
    F = _same_field(f, g)
    if f.is_zero() and g.is_zero():
        raise PolyError("xgcd(0, 0) is undefined")
    r0, r1 = f, g
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    inv = r0.lc.inverse()
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def modpow(base: Poly, exp: int, modulus: Poly) -> Poly:
    """base^exp mod modulus by square-and-multiply."""
    F = _same_field(base, modulus)
    if modulus.degree < 1:
        raise PolyError("modulus must be nonconstant")
    if exp < 0:
        raise PolyError("negative exponent")
    result = Poly.one(F)
    b = base % modulus
    for bit in bin(exp)[2:]:
        result = (result * result) % modulus
        if bit == "1":
            result = (result * b) % modulus
    return result


def _pth_root_poly(f: Poly) -> Poly:
    # f has only X^{pk} terms
    F = f.field
    p = F.p
    coeffs = f.c[::p]
    return Poly(F, [pth_root(FieldElement(F, int(c))) for c in coeffs])


def radical(f: Poly) -> Poly:
    """Product of the distinct monic primes dividing f."""
    if f.is_zero():
        raise PolyError("radical of zero")
    return _radical(f.monic())


def _radical(f: Poly) -> Poly:
    F = f.field
    if f.degree < 1:
        return Poly.one(F)
    df = f.derivative()
    if df.is_zero():
        return _radical(_pth_root_poly(f))
    g = gcd(f, df)
    # f / g is squarefree and carries every prime whose multiplicity is
    # prime to p; the rest lives in g.
    core = f // g
    rest = _radical(g)
    return (core * (rest // gcd(core, rest))).monic()


def coprime_shift(u: Poly, v: Poly, w: Poly) -> Poly:
    """t with gcd(u, v + t w) = 1, given u != 0 and gcd(u, v, w) = 1.

    t is the product of the primes dividing u but not v (one per associate
    class), or 1 when there are none.
    """
    F = _same_field(u, v, w)
    if u.is_zero():
        raise PolyError("coprime_shift needs u != 0")
    if not gcd(gcd(u, v), w).is_one():
        raise PolyError("coprime_shift needs gcd(u, v, w) = 1")
    t = support_shift(u, v)
    if gcd(u, v + t * w).is_one():
        return t
    # unreachable by construction; exhaustive fallback kept as a safety net
    for t in enumerate_polys(F, max_degree=u.degree):  # pragma: no cover
        if gcd(u, v + t * w).is_one():
            return t
    raise AssertionError("no coprime shift found")  # pragma: no cover


def support_shift(u: Poly, v: Poly) -> Poly:
    """Product of the monic primes dividing u but not v (1 if none).

    For any w, every prime dividing gcd(u, v + t w) then divides
    gcd(u, v, w).
    """
    r = radical(u)
    while True:
        g = gcd(r, v)
        if g.is_one():
            break
        r = r // g
    return r if r.degree >= 1 else Poly.one(u.field)


def enumerate_polys(field: GF, max_degree: int, min_degree: int = 0):
    """All polynomials in degree-ascending, coefficient order; 0 first."""
    if min_degree <= 0:
        yield Poly.zero(field)
        min_degree = 0
    for d in range(min_degree, max_degree + 1):
        yield from polys_of_degree(field, d)


def polys_of_degree(field: GF, d: int):
    """Degree-d polynomials: leading code 1 first, then constant term fastest."""
    q = field.q
    for lead in range(1, q):
        for low in itertools.product(range(q), repeat=d):
            yield Poly(field, list(reversed(low)) + [lead]) if d else Poly(field, [lead])


def _frobenius_chain(f: Poly, steps: int):
    """X^{q^i} mod f for i = 1..steps."""
    F = f.field
    x = Poly.x(F) % f
    cur = x
    out = []
    for _ in range(steps):
        cur = modpow(cur, F.q, f)
        out.append(cur)
    return out


def is_irreducible(f: Poly) -> bool:
    """Rabin's test over GF(q)."""
    d = f.degree
    if d < 1:
        return False
    if d == 1:
        return True
    F = f.field
    f = f.monic()
    chain = _frobenius_chain(f, d)
    x = Poly.x(F)
    if chain[-1] != x % f:
        return False
    for ell in _prime_divisors(d):
        h = chain[d // ell - 1]
        if not gcd(h - x, f).is_one():
            return False
    return True


def _prime_divisors(n):
    from .gf import prime_factors

    return prime_factors(n)


def primes_in_progression(a: Poly, b: Poly, degree: int):
    """Every prime of the given degree congruent to b mod a, in search order.

    Candidates are b0 + a h with b0 = b mod a; h runs over polynomials of
    degree ``degree - deg a``, leading coefficient 1 first, lower
    coefficients in counter order.
    """
    F = _same_field(a, b)
    b0 = b % a if a.degree >= 1 else Poly.zero(F)
    da = a.degree
    if degree < 1:
        return
    if degree < da:
        if b0.degree == degree and is_irreducible(b0):
            yield b0
        return
    for h in polys_of_degree(F, degree - da):
        cand = b0 + a * h
        if cand.degree == degree and is_irreducible(cand):
            yield cand


def find_prime_in_progression(
    a: Poly,
    b: Poly,
    degree_coprime_to: int | None = None,
    max_degree: int = 24,
    min_degree: int = 1,
) -> Poly:
    """Smallest-degree prime congruent to b mod a (first in search order).

    Raises PrimeSearchExhausted if nothing is found up to max_degree.  Past
    that budget a prime still exists; the error only means the budget was
    too small.
    """
    if a.is_zero():
        raise PolyError("modulus a must be nonzero")
    if not gcd(a, b).is_one():
        raise PolyError("gcd(a, b) != 1: no primes in this class")
    b0 = b % a if a.degree >= 1 else Poly.zero(a.field)
    start = max(1, min_degree, b0.degree)
    for D in range(start, max_degree + 1):
        if degree_coprime_to is not None and math.gcd(D, degree_coprime_to) != 1:
            continue
        for cand in primes_in_progression(a, b0, D):
            return cand
    raise PrimeSearchExhausted(a, b, degree_coprime_to, max_degree)


class PrimeSearchExhausted(RuntimeError):
    def __init__(self, a, b, degree_coprime_to, max_degree):
        self.params = dict(
            a=format_poly(a), b=format_poly(b),
            degree_coprime_to=degree_coprime_to, max_degree=max_degree,
        )
        super().__init__(
            f"no prime = {format_poly(b)} mod {format_poly(a)} of degree <= {max_degree}"
            + (f" with degree prime to {degree_coprime_to}" if degree_coprime_to else "")
            + "; raise --max-prime-degree"
        )


def delta(f: Poly) -> int:
    """(q^deg f - 1) / (q - 1)."""
    if f.degree < 1:
        raise PolyError("delta needs a nonconstant polynomial")
    q = f.field.q
    return (q**f.degree - 1) // (q - 1)


def delta_of_degree(q: int, d: int) -> int:
    return (q**d - 1) // (q - 1)


def int_xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s a + t b = g = gcd(a, b) >= 0."""
    if a == 0 and b == 0:
        raise ValueError("int_xgcd(0, 0) is undefined")
    r0, r1, s0, s1, t0, t1 = a, b, 1, 0, 0, 1
    while r1:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
        t0, t1 = t1, t0 - qq * t1
    if r0 < 0:
        r0, s0, t0 = -r0, -s0, -t0
    return r0, s0, t0
