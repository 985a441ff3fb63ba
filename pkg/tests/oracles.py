"""Slow, obviously-correct reference implementations used only by tests.

Polynomials here are plain tuples of field codes (ascending), independent
of the library's numpy/Kronecker kernels.
"""

from __future__ import annotations

import itertools

from elemgen.gf import GF


def trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(F: GF, a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return trim(F.add(x, y) for x, y in zip(a, b))


def pneg(F: GF, a):
    return tuple(F.neg(x) for x in a)


def pmul(F: GF, a, b):
    """Schoolbook product."""
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def pdivmod(F: GF, f, g):
    """Long division."""
    f, g = list(trim(f)), trim(g)
    if not g:
        raise ZeroDivisionError
    inv = F.inv(g[-1])
    q = [0] * max(0, len(f) - len(g) + 1)
    while len(f) >= len(g) and f:
        c = F.mul(f[-1], inv)
        sh = len(f) - len(g)
        q[sh] = c
        for i, y in enumerate(g):
            f[sh + i] = F.sub(f[sh + i], F.mul(c, y))
        f = list(trim(f))
    return trim(q), tuple(f)


def all_polys(F: GF, max_degree: int, min_degree: int = 0):
    for d in range(min_degree, max_degree + 1):
        for body in itertools.product(range(F.q), repeat=d):
            for lead in range(1, F.q):
                yield tuple(body) + (lead,)


def monic_polys(F: GF, d: int):
    for body in itertools.product(range(F.q), repeat=d):
        yield tuple(body) + (1,)


def is_irreducible_trial(F: GF, f) -> bool:
    """Irreducible iff no monic divisor of degree 1..deg/2."""
    f = trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in monic_polys(F, e):
            if not pdivmod(F, f, g)[1]:
                return False
    return True


def factor_trial(F: GF, f):
    """Monic irreducible factors with multiplicity, by trial division."""
    f = trim(f)
    if len(f) <= 1:
        return {}
    lc_inv = F.inv(f[-1])
    f = tuple(F.mul(x, lc_inv) for x in f)
    out = {}
    e = 1
    while len(f) > 1:
        found = False
        while e <= len(f) - 1:
            for g in monic_polys(F, e):
                q, r = pdivmod(F, f, g)
                if not r:
                    out[g] = out.get(g, 0) + 1
                    f = q
                    found = True
                    break
            if found:
                break
            e += 1
        if not found:
            break
    return out


def radical_trial(F: GF, f):
    r = (1,)
    for g in factor_trial(F, f):
        r = pmul(F, r, g)
    return r


def mat_mul(F: GF, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ()
            for k in range(n):
                acc = padd(F, acc, pmul(F, A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


def mat_pow(F: GF, A, k):
    """Repeated multiplication, k times."""
    n = len(A)
    P = [[(1,) if i == j else () for j in range(n)] for i in range(n)]
    for _ in range(k):
        P = mat_mul(F, P, A)
    return P


def det_leibniz(F: GF, A):
    n = len(A)
    total = ()
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (1,)
        for i in range(n):
            term = pmul(F, term, A[i][perm[i]])
        total = padd(F, total, pneg(F, term) if inv % 2 else term)
    return total


def primes_by_enumeration(F: GF, a, b, d):
    """All irreducible polynomials of degree d congruent to b mod a."""
    rb = pdivmod(F, b, a)[1]
    out = []
    for f in all_polys(F, d, d):
        if pdivmod(F, f, a)[1] == rb and is_irreducible_trial(F, f):
            out.append(f)
    return out
