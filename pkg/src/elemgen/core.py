"""Reduction of framed SL_2 matrices and the full decomposition pipeline.

For a framed core (a b; c d) with a != 0 the anti-diagonal is first made
prime (two moves, primes found in the residue classes of b and c mod a,
with coprime degrees).  With D(b') = (q^deg b' - 1)/(q - 1) and likewise for
c', pick x, y > 0 with x D(b') - y D(c') = 1 and write the core as X Y^-1,
X = M^(x D(b')), Y = M^(y D(c')).  Each power is written e I + f M via the
Cayley-Hamilton relation, pushed through the 11-move swindle, and finished
with three more moves to diag(-u, u^-1, -1).  The X side runs on the
transposed core.  A 4-move patch matches the two units and the pieces are
glued by conjugating across the diagonal cores.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .gf import FieldElement
from .polyring import (
    Poly,
    PolyError,
    PrimeSearchExhausted,
    delta,
    delta_of_degree,
    find_prime_in_progression,
    primes_in_progression,
    gcd,
    is_irreducible,
)
from .reduce import NotSLError, SL2_MESSAGE, check_input, reduce_to_framed
from .slmat import (
    BREAKDOWN_KEYS,
    Certificate,
    ElemMat,
    ElemWord,
    ShapeError,
    SqMatrix,
    Tracker,
    bound_nu,
    det,
    stable_range_bound,
    unit_diag_word,
    verify,
    word_conjugate_by_diagonal,
    word_inverse,
    word_transpose,
)

DEFAULT_MAX_PRIME_DEGREE = 24
DEFAULT_DEGREE_CEILING = 10**5
DEFAULT_EXPONENT_CEILING = 10**6


class DegreeCeilingExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Cayley-Hamilton powers


@dataclass(frozen=True)
class CHPair:
    """M^k = e I + f M."""

    e: Poly
    f: Poly
    k: int


def _ch_pow_trace(tau: Poly, k: int):
    """(e, f) with T^k = f T + e modulo T^2 - tau T + 1."""
    F = tau.field
    f, e = Poly.zero(F), Poly.one(F)
    for bit in bin(k)[2:] if k else "":
        # square: (fT + e)^2 = (f^2 tau + 2 f e) T + (e^2 - f^2)
        if f:
            ff = f * f
            fe = f * e
            f, e = ff * tau + fe + fe, e * e - ff
        else:
            e = e * e
        if bit == "1":
            # times T: (f tau + e) T - f
            f, e = f * tau + e, -f
    return e, f


def ch_power(M: SqMatrix, k: int) -> CHPair:
    if M.n != 2:
        raise ShapeError("ch_power works on 2 x 2 matrices")
    if k < 0:
        raise ValueError("exponent must be non-negative")
    tau = M[0, 0] + M[1, 1]
    e, f = _ch_pow_trace(tau, k)
    return CHPair(e, f, k)


def lucas_split(tau: Poly, k: int):
    """Factor f_k = s1 * s2 with s1 | e_k - 1 and s2 | e_k + 1.

    With f_j the coefficient sequence of T^j (f_0 = 0, f_1 = 1,
    f_{j+1} = tau f_j - f_{j-1}) and e_k = -f_{k-1}:
      k = 2m + 1:  f_k = (f_{m+1} + f_m)(f_{m+1} - f_m)
      k = 2m:      f_k = f_m (f_{m+1} - f_{m-1})
    The first factor vanishes where the eigenvalue z has z^k = 1, the second
    where z^k = -1; both identities hold over Z[tau] and so in every
    characteristic.
    """
    m = k // 2
    em, fm = _ch_pow_trace(tau, m)  # em = -f_{m-1}
    f_next = tau * fm + em  # f_{m+1}
    if k % 2:
        return f_next + fm, f_next - fm
    return fm, f_next + em


# ---------------------------------------------------------------------------
# swindle


@dataclass(frozen=True)
class SwindleFactors:
    """s = s1 s2, a = k1 s1 + 1 = k2 s2 - 1."""

    s1: Poly
    s2: Poly
    k1: Poly
    k2: Poly

    @classmethod
    def from_split(cls, a: Poly, s: Poly, s1: Poly, s2: Poly) -> "SwindleFactors":
        if s1 * s2 != s:
            raise AssertionError("s1 * s2 != s")
        try:
            k1 = (a - 1).exact_div(s1)
            k2 = (a + 1).exact_div(s2)
        except PolyError as exc:
            raise AssertionError(f"swindle split is not admissible: {exc}") from exc
        return cls(s1, s2, k1, k2)

    @classmethod
    def from_gcd(cls, a: Poly, s: Poly) -> "SwindleFactors":
        # s | (a-1)(a+1); the (a-1)-part of s is gcd(s, a-1) in odd
        # characteristic, and in characteristic 2 the cofactor still
        # divides a+1 because s | (a+1)^2.
        s1 = gcd(s, a - 1)
        s2 = s.exact_div(s1)
        return cls.from_split(a, s, s1, s2)


def _framed_from(F, n, a, b, c, d, corner=None):
    core = SqMatrix(F, [[a, b], [c, d]])
    return SqMatrix.framed(core, n, corner)


def swindle(a, b, c, d, s, n, factors: SwindleFactors | None = None, trace=None, steps=None):
    """Eleven-move swindle on the framed 3 x 3 block.

    Takes framed (a, b; s c, d) with det 1 and a = d mod s to framed
    (-a, -s b; c, d) with -1 in position (3, 3).  When s != 0 the schedule
    has eleven moves; a move whose parameter happens to vanish is an
    identity and is not recorded in the words.
    Returns ``(left, right, out)`` with left @ input @ right == out.
    ``trace`` (a list) receives the matrix after every scheduled move and
    ``steps`` the scheduled moves as ``(kind, i, j, t)``.
    """
    F = a.field
    if n < 3:
        raise ShapeError("the swindle needs a 3 x 3 frame")
    if a * d - s * c * b != Poly.one(F):
        raise ValueError("swindle hypothesis: determinant must be 1")
    tr = Tracker(_framed_from(F, n, a, b, s * c, d))

    def snap():
        if trace is not None:
            trace.append(tr.matrix())

    if s.is_zero():
        if a != d:
            raise ValueError("swindle hypothesis: a = d mod s fails")
        ai = a.constant().inverse()
        tr.col(0, 1, -(b.scale(ai)))
        snap()
        for e in unit_diag_word(-F.one, 0, 2, n):
            tr.col(e.i, e.j, e.t)
            snap()
        tr.row(1, 0, -(c.scale(ai)))
        snap()
    else:
        if not s.divides(a - d):
            raise ValueError("swindle hypothesis: a = d mod s fails")
        fs = factors or SwindleFactors.from_gcd(a, s)
        s1, s2, k1, k2 = fs.s1, fs.s2, fs.k1, fs.k2
        schedule = [
            ("c", 2, 0, s1),  # C1 += s1 C3
            ("r", 0, 2, -k1),  # R1 -= k1 R3
            ("r", 1, 2, -(s2 * c)),  # R2 -= s2 c R3
            ("r", 2, 0, -s1),  # R3 -= s1 R1
            ("c", 0, 1, -b),  # C2 -= b C1
            ("c", 0, 2, k1 + s2),  # C3 += (k1 + s2) C1
            ("r", 1, 0, c),  # R2 += c R1
            ("r", 2, 0, -k2),  # R3 -= k2 R1
            ("r", 0, 2, s2),  # R1 += s2 R3
            ("c", 2, 0, -k2),  # C1 -= k2 C3
            ("c", 2, 1, -(s1 * b)),  # C2 -= s1 b C3
        ]
        for kind, i, j, t in schedule:
            if steps is not None:
                steps.append((kind, i, j, t))
            if kind == "r":
                tr.row(i, j, t)
            else:
                tr.col(i, j, t)
            snap()
    out = _framed_from(F, n, -a, -(s * b), c, d, corner=-Poly.one(F))
    if tr.matrix() != out:
        raise AssertionError("swindle schedule did not reach the target")
    return tr.left_word(), tr.right_word(), out


# ---------------------------------------------------------------------------
# the (dagger) reduction


@dataclass
class DaggerResult:
    left: ElemWord
    right: ElemWord
    u: FieldElement
    moves: int
    swindle_moves: int = 0
    swindle_scheduled: int = 0


def dagger_reduce(Mp: SqMatrix, k: int, cprime: Poly, n: int) -> DaggerResult:
    """left @ framed(Mp^k) @ right == diag(-u, u^-1, -1, 1, ...), <= 14 moves.

    Mp must have lower-left entry ``cprime`` (a prime) and k must be a
    positive multiple of delta(cprime).
    """
    F = Mp.field
    a, b, c, d = Mp[0, 0], Mp[0, 1], Mp[1, 0], Mp[1, 1]
    if c != cprime:
        raise ValueError("lower-left entry must be the prime c'")
    if k <= 0 or k % delta(cprime):
        raise ValueError("k must be a positive multiple of delta(c')")
    tau = a + d
    e, f = _ch_pow_trace(tau, k)
    A, D = e + f * a, e + f * d
    Y = _framed_from(F, n, A, f * b, f * c, D)
    target_diag = None
    if f.is_zero():
        # Y = e I with e = +-1
        u = e.constant()
        tr = Tracker(Y)
        for el in unit_diag_word(-F.one, 0, 2, n):
            tr.col(el.i, el.j, el.t)
        swm = 0
        sched = []
    else:
        s1, s2 = lucas_split(tau, k)
        try:
            fs = SwindleFactors.from_split(A, f, s1, s2)
        except AssertionError:  # pragma: no cover - identity guarantees this
            fs = SwindleFactors.from_gcd(A, f)
        sched = []
        sl, sr, out = swindle(A, f * b, c, D, f, n, fs, steps=sched)
        tr = Tracker(out)
        swm = len(sl) + len(sr)
        if swm != sum(1 for st in sched if st[3]):
            raise AssertionError("swindle word length differs from its schedule")
        ur = A % cprime
        if ur.degree > 0:
            raise AssertionError("e + f a is not a unit mod c'")
        u = ur.constant()
        if not u:
            raise AssertionError("e + f a vanishes mod c'")
        ui = u.inverse()
        if (D % cprime) != Poly.const(F, ui):
            raise AssertionError("e + f d is not u^-1 mod c'")
        tr.row(0, 1, (A - Poly.const(F, u)).exact_div(cprime))
        tr.col(0, 1, (Poly.const(F, ui) - D).exact_div(cprime))
        if not tr[0, 1].is_zero():
            raise AssertionError("missing entry is not zero")
        tr.row(1, 0, cprime.scale(ui))
        left = tr.left_word() + sl
        right = sr + tr.right_word()
        target_diag = u
    if target_diag is None:
        left, right = tr.left_word(), tr.right_word()
    expect = dagger_target(F, n, u)
    if tr.matrix() != expect:
        raise AssertionError("dagger reduction missed diag(-u, u^-1, -1)")
    moves = len(left) + len(right)
    if moves > 14:
        raise AssertionError(f"dagger reduction used {moves} > 14 moves")
    return DaggerResult(left, right, u, moves, swm, len(sched))


def dagger_target(F, n, u: FieldElement) -> SqMatrix:
    return SqMatrix.diag(F, [-u, u.inverse(), -F.one] + [F.one] * (n - 3))


def _dagger_diag(F, n, u):
    return [-u, u.inverse(), -F.one] + [F.one] * (n - 3)


# ---------------------------------------------------------------------------
# primalization and exponents


@dataclass
class Primalized:
    core: SqMatrix
    row_move: ElemMat | None
    col_move: ElemMat | None
    bprime: Poly
    cprime: Poly

    @property
    def moves(self):
        return (self.row_move is not None) + (self.col_move is not None)


def primalize_antidiagonal(
    M: SqMatrix,
    max_degree: int = DEFAULT_MAX_PRIME_DEGREE,
    keep_primes: bool = True,
    n: int = 2,
    bprime: Poly | None = None,
    cprime: Poly | None = None,
) -> Primalized:
    """E21(g) @ M @ E12(h) with prime anti-diagonal of coprime degrees.

    b' is the first prime = b mod a in search order (b itself when it is
    already prime and ``keep_primes``), c' likewise with deg c' prime to
    deg b'.  Explicit ``bprime``/``cprime`` override the search.  Returned
    moves are None when not needed.
    """
    a, b, c = M[0, 0], M[0, 1], M[1, 0]
    if a.is_zero():
        raise ValueError("primalization needs a != 0")
    if bprime is not None:
        bp = bprime
    elif keep_primes and is_irreducible(b):
        bp = b
    else:
        bp = find_prime_in_progression(a, b, max_degree=max_degree)
    if cprime is not None:
        cp = cprime
    elif keep_primes and is_irreducible(c) and math.gcd(c.degree, bp.degree) == 1:
        cp = c
    else:
        cp = find_prime_in_progression(a, c, degree_coprime_to=bp.degree, max_degree=max_degree)
    if not (is_irreducible(bp) and is_irreducible(cp)) or math.gcd(bp.degree, cp.degree) != 1:
        raise ValueError("b', c' must be primes of coprime degrees")
    h = (bp - b).exact_div(a)
    g = (cp - c).exact_div(a)
    tr = Tracker(M)
    tr.row(1, 0, g)
    tr.col(0, 1, h)
    Mp = tr.matrix()
    assert Mp[0, 1] == bp and Mp[1, 0] == cp
    row = ElemMat(n, 1, 0, g) if g else None
    col = ElemMat(n, 0, 1, h) if h else None
    return Primalized(Mp, row, col, bp, cp)


def split_exponents_from_deltas(db: int, dc: int, sign: int = 1):
    """Smallest x >= 1 (with y >= 1) such that x db - y dc = sign."""
    if math.gcd(db, dc) != 1:
        raise AssertionError("delta values are not coprime")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = (sign * pow(db, -1, dc)) % dc if dc > 1 else 0
    while x < 1 or x * db - sign < dc:
        x += dc
    return x, (x * db - sign) // dc


def split_exponents(bprime: Poly, cprime: Poly, sign: int = 1):
    """Smallest positive x (with y >= 1) such that x delta(b') - y delta(c') = sign.

    With sign = +1 the core is M^(x delta(b')) M^(-y delta(c')); with
    sign = -1 it is M^(-x delta(b')) M^(y delta(c')).
    """
    if math.gcd(bprime.degree, cprime.degree) != 1:
        raise AssertionError("prime degrees are not coprime")
    return split_exponents_from_deltas(delta(bprime), delta(cprime), sign)


# ---------------------------------------------------------------------------
# framed SL_2


@dataclass
class FramedPlan:
    orient: tuple  # (swap, transpose)
    cost: tuple
    kind: str  # "zero", "unit", "general"
    prim: Primalized | None = None
    x: int = 0
    y: int = 0
    sign: int = 1

    @property
    def exponents(self):
        return self.x * delta(self.prim.bprime), self.y * delta(self.prim.cprime)


def _orient(B: SqMatrix, swap: bool, transpose: bool) -> SqMatrix:
    if swap:
        B = B.relabel([1, 0])
    if transpose:
        B = B.transpose()
    return B


def _unorient(W: ElemWord, swap: bool, transpose: bool) -> ElemWord:
    if transpose:
        W = word_transpose(W)
    if swap:
        W = W.relabel([1, 0] + list(range(2, W.n)))
    return W


def predicted_size(prim: Primalized, x: int, y: int = None, sign: int = 1) -> tuple[int, int]:
    """(larger exponent, rough entry degree of the larger power)."""
    kx = x * delta(prim.bprime)
    ky = kx - sign if y is None else y * delta(prim.cprime)
    k = max(kx, ky)
    tau = prim.core[0, 0] + prim.core[1, 1]
    return k, k * max(1, tau.degree) + prim.core.max_degree()


def _first_primes(a: Poly, b: Poly, keep: bool, max_degree: int, width: int):
    """First prime = b mod a in each of ``width`` consecutive feasible degrees."""
    out = []
    if keep and b.degree >= 1 and is_irreducible(b):
        out.append(b)
    b0 = b % a
    D = max(1, b0.degree)
    while len(out) < width and D <= max_degree:
        for P in primes_in_progression(a, b0, D):
            if not out or P.degree != out[0].degree:
                out.append(P)
            break
        D += 1
    return out


def _plan_general(C: SqMatrix, orient, max_degree, width):
    a, b, c = C[0, 0], C[0, 1], C[1, 0]
    bs = _first_primes(a, b, True, max_degree, width)
    cs = _first_primes(a, c, True, max_degree, width)
    best = None
    for bp in bs:
        for cp in cs:
            if math.gcd(bp.degree, cp.degree) != 1:
                continue
            prim = primalize_antidiagonal(C, bprime=bp, cprime=cp)
            for sign in (1, -1):
                x, y = split_exponents(bp, cp, sign)
                k, deg = predicted_size(prim, x, y, sign)
                cost = (deg, k, prim.moves, -sign)
                if best is None or cost < best.cost:
                    best = FramedPlan(orient, cost, "general", prim, x, y, sign)
    return best


def plan_framed(
    B: SqMatrix,
    max_degree=DEFAULT_MAX_PRIME_DEGREE,
    search=True,
    widen_above: int = 4096,
) -> FramedPlan:
    """Pick the cheapest way to run the construction on a framed core.

    Relabelling the two core indices and transposing change neither the
    move counts nor validity; they change which entries feed the prime
    search and hence the exponent sizes.  Without ``search`` the plan is
    the plain one: first prime b', then the first c' of coprime degree,
    sign +1.  With ``search`` all four orientations and both signs are
    priced; when the best predicted entry degree still exceeds
    ``widen_above``, a few more prime degrees per side are tried.
    """
    orients = [(False, False), (True, False), (False, True), (True, True)] if search else [(False, False)]
    for sw, tp in orients:
        a = _orient(B, sw, tp)[0, 0]
        if a.is_zero():
            return FramedPlan((sw, tp), (0, 0, 3), "zero")
        if a.degree == 0:
            return FramedPlan((sw, tp), (0, 0, 6), "unit")
    if not search:
        prim = primalize_antidiagonal(B, max_degree)
        x, y = split_exponents(prim.bprime, prim.cprime)
        k, deg = predicted_size(prim, x, y)
        return FramedPlan((False, False), (deg, k, prim.moves, -1), "general", prim, x, y, 1)
    best = None
    last_exc = None
    for width in (2, 5):
        for sw, tp in orients:
            try:
                p = _plan_general(_orient(B, sw, tp), (sw, tp), max_degree, width)
            except PrimeSearchExhausted as exc:
                last_exc = exc
                continue
            if p is not None and (best is None or p.cost < best.cost):
                best = p
        if best is not None and best.cost[0] <= widen_above:
            break
    if best is None:
        raise last_exc or PrimeSearchExhausted(B[0, 0], B[0, 1], None, max_degree)
    return best


def _shortcut_zero(C: SqMatrix, n: int):
    """a = 0: three moves."""
    F = C.field
    b, d = C[0, 1], C[1, 1]
    tr = Tracker(SqMatrix.framed(C, n))
    tr.row(0, 1, -b)
    tr.col(0, 1, -(b - b * d))
    tr.row(1, 0, Poly.const(F, b.constant().inverse()))
    if not tr.matrix().is_identity():
        raise AssertionError("a = 0 shortcut failed")
    return word_inverse(tr.left_word()) + word_inverse(tr.right_word())


def _shortcut_unit(C: SqMatrix, n: int):
    """a a unit: clear b and c, then a 4-move diagonal patch."""
    a, b, c = C[0, 0], C[0, 1], C[1, 0]
    ai = a.constant().inverse()
    tr = Tracker(SqMatrix.framed(C, n))
    tr.col(0, 1, -(b.scale(ai)))
    tr.row(1, 0, -(c.scale(ai)))
    W = unit_diag_word(a.constant(), 0, 1, n)
    if tr.matrix() != W.product():
        raise AssertionError("unit shortcut failed")
    return word_inverse(tr.left_word()) + W + word_inverse(tr.right_word())


def _precondition_candidates(B: SqMatrix, depth: int):
    """Cores reachable from B by at most ``depth`` division moves.

    Each move replaces a diagonal entry by its remainder modulo an
    off-diagonal neighbour (a - (a div c) c, a - (a div b) b, d - (d div b) b,
    d - (d div c) c).  Yields ``(tracker, proxy)`` where the tracker holds
    the moves and proxy is the smaller diagonal degree (-1 for a zero or
    unit entry).
    """
    frontier = [Tracker(B)]
    for _ in range(depth):
        nxt = []
        for tr in frontier:
            a, b, c, d = tr[0, 0], tr[0, 1], tr[1, 0], tr[1, 1]
            for kind, num, den, i, j in (
                ("r", a, c, 0, 1), ("c", a, b, 1, 0), ("r", d, b, 1, 0), ("c", d, c, 0, 1),
            ):
                if den.is_zero() or num.degree < den.degree:
                    continue
                t = -(num // den)
                child = Tracker(tr.matrix())
                child._left, child._right = list(tr._left), list(tr._right)
                (child.row if kind == "r" else child.col)(i, j, t)
                nxt.append(child)
        for tr in nxt:
            ds = [tr[0, 0].degree, tr[1, 1].degree]
            yield tr, (-1 if min(ds) <= 0 else min(ds))
        frontier = nxt


def _lift(W: ElemWord, n: int) -> ElemWord:
    return ElemWord(W.field, n, [ElemMat(n, e.i, e.j, e.t) for e in W])


def _try_precondition(B, n, max_prime_degree, degree_ceiling, exponent_ceiling, depth=4, tries=6):
    """Pre-reduce the core so the construction fits the output ceiling.

    Returns ``(W, breakdown, log)`` or None.  Accepted only if the whole
    framed word stays within 34 moves.
    """
    cands = sorted(_precondition_candidates(B, depth), key=lambda tp: (tp[1], tp[0].moves))
    seen = set()
    for tr, proxy in cands:
        if len(seen) >= tries:
            break
        core = tr.matrix()
        if core in seen:
            continue
        seen.add(core)
        try:
            plan = plan_framed(core, max_prime_degree)
            if plan.kind == "general":
                check_ceiling(plan, degree_ceiling, exponent_ceiling)
        except (DegreeCeilingExceeded, PrimeSearchExhausted):
            continue
        sub = {}
        W2, bd = reduce_framed_sl2(
            core, n, max_prime_degree, degree_ceiling, exponent_ceiling, plan=plan, log=sub,
            precondition=False,
        )
        # tr: L B R = core, so framed(B) = L^-1 framed(core) R^-1
        W = _lift(word_inverse(tr.left_word()), n) + W2 + _lift(word_inverse(tr.right_word()), n)
        if len(W) > 34:
            continue
        bd["finish"] += tr.moves
        sub["precondition"] = tr.moves
        return W, bd, sub
    return None


def check_ceiling(plan: FramedPlan, degree_ceiling, exponent_ceiling):
    prim = plan.prim
    k, deg = predicted_size(prim, plan.x, plan.y, plan.sign)
    what = f"primes of degree {prim.bprime.degree}, {prim.cprime.degree}"
    if exponent_ceiling is not None and k > exponent_ceiling:
        raise DegreeCeilingExceeded(f"exponent {k} exceeds the ceiling {exponent_ceiling} ({what})")
    if degree_ceiling is not None and deg > degree_ceiling:
        raise DegreeCeilingExceeded(
            f"predicted entry degree {deg} exceeds the ceiling {degree_ceiling} (exponent {k}, {what})"
        )


def reduce_framed_sl2(
    B: SqMatrix,
    n: int,
    max_prime_degree: int = DEFAULT_MAX_PRIME_DEGREE,
    degree_ceiling: int | None = DEFAULT_DEGREE_CEILING,
    exponent_ceiling: int | None = DEFAULT_EXPONENT_CEILING,
    search: bool = True,
    plan: FramedPlan | None = None,
    log: dict | None = None,
    precondition: bool = True,
):
    """Word W with product(W) == framed(B), len(W) <= 34.

    Returns ``(W, breakdown)``.  ``log`` (a dict) receives the branch taken
    and the two DaggerResults of the general branch.

    When the planned construction would exceed the output ceiling and
    ``precondition`` is set, a few division moves are first spent on the
    core (counted under "finish") provided the total stays within 34.
    """
    if log is None:
        log = {}
    if n < 3:
        raise NotSLError(SL2_MESSAGE)
    if B.n != 2:
        raise ShapeError("core must be 2 x 2")
    if not det(B).is_one():
        raise NotSLError("core does not have determinant 1")
    F = B.field
    bd = dict.fromkeys(BREAKDOWN_KEYS[1:], 0)
    if B.is_identity():
        log["branch"] = "identity"
        return ElemWord(F, n), bd
    if plan is None:
        plan = plan_framed(B, max_prime_degree, search)
    sw, tp = plan.orient
    C = _orient(B, sw, tp)
    if plan.kind == "zero":
        W = _shortcut_zero(C, n)
        bd["finish"] = len(W)
        log["branch"] = "zero"
        return _unorient(W, sw, tp), bd
    if plan.kind == "unit":
        W = _shortcut_unit(C, n)
        bd["finish"] = len(W)
        log["branch"] = "unit"
        return _unorient(W, sw, tp), bd

    try:
        check_ceiling(plan, degree_ceiling, exponent_ceiling)
    except DegreeCeilingExceeded:
        if not precondition:
            raise
        res = _try_precondition(B, n, max_prime_degree, degree_ceiling, exponent_ceiling)
        if res is None:
            raise
        W, bd, sub = res
        log.update(sub)
        return W, bd
    prim = plan.prim
    k_x, k_y = plan.exponents
    if k_x - k_y != plan.sign:
        raise AssertionError("exponents do not split the core")
    if math.gcd(delta(prim.bprime), delta(prim.cprime)) != 1:
        raise AssertionError("delta values are not coprime")
    Mp = prim.core
    bd["primalize"] = prim.moves

    # L_Y Y R_Y = Dg(u) and L_X X^T R_X = Dg(v), Dg(w) = diag(-w, w^-1, -1)
    ydag = dagger_reduce(Mp, k_y, prim.cprime, n)
    xdag = dagger_reduce(Mp.transpose(), k_x, prim.bprime, n)
    log.update(branch="general", x_dagger=xdag, y_dagger=ydag, plan=plan)
    u, v = ydag.u, xdag.u
    bd["y_side"] = ydag.moves
    bd["x_side"] = xdag.moves
    if plan.sign == 1:
        # X Y^-1 = (R_X^-1)^T Dg(v) (L_X^-1)^T R_Y Dg(u)^-1 L_Y
        middle = word_transpose(word_inverse(xdag.left)) + ydag.right
        middle = word_conjugate_by_diagonal(middle, _dagger_diag(F, n, v))
        patch = unit_diag_word(v / u, 0, 1, n)
        Wp = word_transpose(word_inverse(xdag.right)) + middle + patch + ydag.left
    else:
        # X^-1 Y = L_X^T Dg(v)^-1 R_X^T L_Y^-1 Dg(u) R_Y^-1
        middle = word_transpose(xdag.right) + word_inverse(ydag.left)
        middle = word_conjugate_by_diagonal(middle, _dagger_diag(F, n, v.inverse()))
        patch = unit_diag_word(u / v, 0, 1, n)
        Wp = word_transpose(xdag.left) + middle + patch + word_inverse(ydag.right)
    bd["patch"] = len(patch)
    pre = ElemWord(F, n, [ElemMat(n, 1, 0, -prim.row_move.t)] if prim.row_move else [])
    post = ElemWord(F, n, [ElemMat(n, 0, 1, -prim.col_move.t)] if prim.col_move else [])
    W = pre + Wp + post
    if len(W) > 34:
        raise AssertionError(f"framed reduction used {len(W)} > 34 moves")
    return _unorient(W, sw, tp), bd


# ---------------------------------------------------------------------------
# the full pipeline


def _core_proxy(core: SqMatrix) -> int:
    a, d = core[0, 0], core[1, 1]
    if a.degree <= 0 or d.degree <= 0:
        return 0
    return min(a.degree, d.degree)


def _variants(n: int, search: bool):
    if not search:
        return [(tuple(range(n)), False)]
    out = []
    for perm in itertools.permutations(range(n)):
        for tp in (False, True):
            out.append((perm, tp))
    return out


def decompose(
    M: SqMatrix,
    max_prime_degree: int = DEFAULT_MAX_PRIME_DEGREE,
    degree_ceiling: int | None = DEFAULT_DEGREE_CEILING,
    exponent_ceiling: int | None = DEFAULT_EXPONENT_CEILING,
    search: bool = True,
    shortlist: int = 4,
) -> Certificate:
    """Certificate for M in SL_n(F_q[X]), n >= 3, of length <= bound_nu(n).

    With ``search`` the pipeline is run on index relabellings and the
    transpose of M (words transfer back at no cost) and the variant with
    the smallest predicted entry degree is kept.
    """
    check_input(M)
    n = M.n
    F = M.field
    candidates = []
    for perm, tp in _variants(n, search):
        Mv = M.relabel(perm)
        if tp:
            Mv = Mv.transpose()
        red = reduce_to_framed(Mv)
        candidates.append((_core_proxy(red.core), red.moves_used, perm, tp, red))
    candidates.sort(key=lambda c: (c[0], c[1]))
    best = None
    last_exc = None
    for proxy, used, perm, tp, red in candidates[: max(1, shortlist)]:
        try:
            plan = None if red.core.is_identity() else plan_framed(red.core, max_prime_degree, search)
        except PrimeSearchExhausted as exc:
            last_exc = exc
            continue
        cost = plan.cost if plan else (0, 0, 0)
        key = (cost, used)
        if best is None or key < best[0]:
            best = (key, perm, tp, red, plan)
        if cost[0] == 0:
            break
    if best is None:
        raise last_exc
    _, perm, tp, red, plan = best
    log = {"variant": (perm, tp), "stable_range": red}
    Wc, bd = reduce_framed_sl2(
        red.core, n, max_prime_degree, degree_ceiling, exponent_ceiling, search, plan, log
    )
    W = word_inverse(red.left) + Wc + word_inverse(red.right)
    if tp:
        W = word_transpose(W)
    W = W.relabel(perm)
    breakdown = {"stable_range": red.moves_used, **bd}
    if red.moves_used > stable_range_bound(n):
        raise AssertionError("stable-range budget exceeded")
    cert = Certificate(F, n, M, W, len(W), bound_nu(n), False, breakdown)
    cert.log = log
    if not verify(cert):
        raise AssertionError("certificate failed verification")
    return cert
