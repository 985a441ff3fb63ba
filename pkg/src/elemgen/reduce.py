"""Stable-range reduction of SL_n(F_q[X]), n >= 3, to a framed SL_2 matrix.

Stage k (k = n, ..., 3) works on the last row of the leading k x k block:
fold entries into one partner until an anchor pair is coprime, use the
Bezout identity of that pair to turn the last entry into 1 with two column
moves, then clear the last row and column.  A stage costs at most
(k - 2) + 2 + 2(k - 1) = 3k - 2 moves, so the whole reduction stays within
(3n^2 - n)/2 - 5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .polyring import Poly, coprime_shift, gcd, support_shift, xgcd
from .slmat import ElemWord, ShapeError, SqMatrix, Tracker, det, stable_range_bound


class NotSLError(ValueError):
    pass


SL2_MESSAGE = (
    "SL2 is not boundedly elementary generated: SL_2(F[X]) is not boundedly "
    "generated by the elementary matrices, so inputs need n >= 3"
)


@dataclass
class FramedReduction:
    left: ElemWord
    right: ElemWord
    core: SqMatrix
    moves_used: int
    stage_moves: dict = field(default_factory=dict)


def check_input(M: SqMatrix) -> None:
    if M.n < 3:
        raise NotSLError(SL2_MESSAGE)
    if not det(M).is_one():
        raise NotSLError("input matrix does not have determinant 1")


def coprimify_last_row(row):
    """Plan fold moves on a row whose entries have gcd 1.

    Returns ``(folds, pair)``: folds are ``(target, source, t)`` column moves
    (column target += t * column source) and pair the indices of two of the
    first k-1 entries that are coprime after folding.  ``pair`` is None when
    the first k-1 entries all vanish, i.e. the last entry is a unit.
    """
    row = list(row)
    k = len(row)
    if k < 3:
        raise ShapeError("row needs at least 3 entries")
    g = row[0]
    for x in row[1:]:
        g = gcd(g, x)
    if not g.is_one():
        raise AssertionError("row entries are not coprime")
    head = [i for i in range(k - 1) if not row[i].is_zero()]
    if not head:
        return [], None
    anchor = head[0]
    target = next(i for i in range(k - 1) if i != anchor)
    folds = []
    for src in range(k):
        if src in (anchor, target):
            continue
        if gcd(row[anchor], row[target]).is_one():
            break
        if row[src].is_zero():
            continue
        u, v, w = row[anchor], row[target], row[src]
        if gcd(gcd(u, v), w).is_one():
            t = coprime_shift(u, v, w)
        else:
            t = support_shift(u, v)
        folds.append((target, src, t))
        row[target] = v + t * w
    if not gcd(row[anchor], row[target]).is_one():
        raise AssertionError("folding failed to produce a coprime pair")
    return folds, (anchor, target)


def _bezout_to_one(tr: Tracker, k: int, pair):
    """Two column moves turning entry (k-1, k-1) into 1."""
    last = k - 1
    r = tr.rows[last]
    F = tr.field
    if r[last].is_one():
        return
    if pair is None:
        omega = r[last].constant()
        tr.col(last, 0, Poly.const(F, omega.inverse()))
        tr.col(0, last, Poly.const(F, 1 - omega))
        return
    a, b = pair
    ua, ub = r[a], r[b]
    need = r[last] - 1
    _, s, t = xgcd(ua, ub)
    if ub.is_zero():
        alpha, beta = need * s, Poly.zero(F)
    elif ub.degree == 0:
        alpha, beta = Poly.zero(F), need.scale(ub.lc.inverse())
    else:
        qq, alpha = divmod(need * s, ub)
        beta = need * t + qq * ua
    tr.col(a, last, -alpha)
    tr.col(b, last, -beta)
    if not tr.rows[last][last].is_one():
        raise AssertionError("Bezout step did not produce 1")


def _stage(tr: Tracker, k: int) -> int:
    before = tr.moves
    last = k - 1
    folds, pair = coprimify_last_row(tr.rows[last][:k])
    for target, src, t in folds:
        tr.col(src, target, t)
    _bezout_to_one(tr, k, pair)
    for j in range(last):
        x = tr.rows[last][j]
        if x:
            tr.col(last, j, -x)
    for i in range(last):
        x = tr.rows[i][last]
        if x:
            tr.row(i, last, -x)
    used = tr.moves - before
    if used > 3 * k - 2:
        raise AssertionError(f"stage {k} used {used} > {3 * k - 2} moves")
    for i in range(k):
        if i != last and (tr.rows[last][i] or tr.rows[i][last]):
            raise AssertionError("stage left a non-cleared entry")
    return used


def reduce_to_framed(M: SqMatrix) -> FramedReduction:
    """left @ M @ right == framed(core) with at most (3n^2-n)/2 - 5 moves."""
    check_input(M)
    tr = Tracker(M)
    stages = {}
    for k in range(M.n, 2, -1):
        stages[k] = _stage(tr, k)
    core = tr.matrix().block(2)
    if tr.moves > stable_range_bound(M.n):
        raise AssertionError("stable-range budget exceeded")
    if not det(core).is_one():
        raise AssertionError("core is not in SL_2")
    return FramedReduction(tr.left_word(), tr.right_word(), core, tr.moves, stages)
