"""Quick embedded invariant checks behind ``elemgen selftest``."""

from __future__ import annotations

import itertools

from .core import ch_power, decompose, swindle
from .gf import GF
from .polyring import Poly, delta_of_degree, gcd, is_irreducible, modpow, radical, xgcd
from .slmat import SqMatrix, unit_diag_word


def _field_axioms():
    for q, (p, m) in {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 9: (3, 2)}.items():
        F = GF(p, m)
        els = list(F.elements())
        for a in els:
            if a and (a * a.inverse() != F.one or a ** (q - 1) != F.one):
                return False
        for a, b in itertools.product(els, repeat=2):
            if a * b != b * a or a + b != b + a:
                return False
    return True


def _unit_patch():
    for p, m in [(2, 2), (3, 1), (5, 1), (3, 2)]:
        F = GF(p, m)
        for w in F.units():
            D = SqMatrix.diag(F, [w, w.inverse(), F.one])
            if unit_diag_word(w, 0, 1, 3).product() != D:
                return False
    return True


def _cayley_hamilton():
    F = GF(3)
    M = SqMatrix.from_codes(F, [[[0, 1], [1]], [[2], [0]]])
    P = SqMatrix.identity(F, 2)
    for k in range(20):
        ch = ch_power(M, k)
        if P != SqMatrix(F, [[ch.e + ch.f * M[0, 0], ch.f * M[0, 1]], [ch.f * M[1, 0], ch.e + ch.f * M[1, 1]]]):
            return False
        P = P @ M
    return True


def _polys():
    F = GF(2)
    x = Poly.x(F)
    d, s, t = xgcd(x * x + x, x * x + 1)
    return (
        d == x + 1 and s * (x * x + x) + t * (x * x + 1) == d
        and is_irreducible(x * x + x + 1) and not is_irreducible(x * x + 1)
        and radical((x * x + x + 1) ** 2) == x * x + x + 1
        and modpow(x, 4, x * x + x + 1) == x
        and gcd(Poly.const(F, 1), x).is_one()
        and delta_of_degree(2, 3) == 7
    )


def _swindle():
    F = GF(2)
    x = Poly.x(F)
    one = Poly.one(F)
    trace = []
    left, right, out = swindle(x + 1, one, one, one, x, 3, trace=trace)
    # move 6 has parameter k1 + s2 = 1 + 1 = 0 here: an identity move
    return len(trace) == 11 and len(left) + len(right) == 10 and left.product() @ SqMatrix.framed(
        SqMatrix(F, [[x + 1, one], [x, one]]), 3) @ right.product() == out


def _decompose():
    F = GF(2)
    x = Poly.x(F)
    one, zero = Poly.one(F), Poly.zero(F)
    B = SqMatrix(F, [[x, x + 1, zero], [x * x + x + 1, x * x, zero], [zero, zero, one]])
    cert = decompose(B)
    return cert.verified and cert.length <= 41


CHECKS = [
    ("field axioms (q <= 9)", _field_axioms),
    ("unit diagonal patch", _unit_patch),
    ("Cayley-Hamilton powers", _cayley_hamilton),
    ("polynomial arithmetic", _polys),
    ("swindle on the GF(2) example", _swindle),
    ("decompose a framed SL_3 matrix", _decompose),
]


def run(verbose: bool = True) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            res = bool(fn())
        except Exception as exc:  # a crash is a failed check
            res = False
            name += f" ({type(exc).__name__}: {exc})"
        ok &= res
        if verbose:
            print(("PASS " if res else "FAIL ") + name)
    return ok
