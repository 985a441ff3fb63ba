import random

import pytest

from elemgen.gf import GF
from elemgen.polyring import Poly, gcd
from elemgen.reduce import NotSLError, coprimify_last_row, reduce_to_framed
from elemgen.slmat import ElemMat, ElemWord, SqMatrix, det, stable_range_bound
from elemgen import slmat

from .test_slmat import rand_word

F2, F3 = GF(2), GF(3)
X = Poly.x(F2)
ONE, ZERO = Poly.one(F2), Poly.zero(F2)


def test_identity():
    red = reduce_to_framed(SqMatrix.identity(F2, 3))
    assert red.moves_used == 0 and red.core == SqMatrix.identity(F2, 2)


def test_rejects_sl2_and_bad_det():
    with pytest.raises(NotSLError, match="not boundedly generated by the elementary"):
        reduce_to_framed(SqMatrix.identity(F2, 2))
    M = SqMatrix.diag(F3, [F3(2), F3(1), F3(1)])
    with pytest.raises(NotSLError):
        reduce_to_framed(M)


def test_coprimify_examples():
    folds, pair = coprimify_last_row([X, X + 1, X**3])
    assert folds == [] and pair == (0, 1)
    folds, pair = coprimify_last_row([X * X + X, X, ONE])
    assert pair == (0, 1) and len(folds) == 1
    target, src, t = folds[0]
    assert (target, src, t) == (1, 2, X + 1)
    assert gcd(X * X + X, X + t * ONE).is_one()
    assert coprimify_last_row([ZERO, ZERO, ONE]) == ([], None)
    with pytest.raises(AssertionError):
        coprimify_last_row([X, X, X * X])


def test_coprimify_zero_anchor_shift():
    folds, pair = coprimify_last_row([ZERO, X, X + 1, ONE])
    assert pair[0] == 1
    row = [ZERO, X, X + 1, ONE]
    for target, src, t in folds:
        row[target] = row[target] + t * row[src]
    assert gcd(row[pair[0]], row[pair[1]]).is_one()
    assert len(folds) <= 2


def _check(M, red):
    n = M.n
    assert red.left.product() @ M @ red.right.product() == SqMatrix.framed(red.core, n)
    assert red.moves_used == len(red.left) + len(red.right) <= stable_range_bound(n)
    assert det(red.core).is_one()
    for k, used in red.stage_moves.items():
        assert used <= 3 * k - 2


@pytest.mark.parametrize("n", [3, 4])
def test_random_inputs(n):
    rng = random.Random(n)
    for _ in range(250):
        field = rng.choice([F2, F3, GF(2, 2)])
        M = rand_word(field, n, rng.randint(0, 14), rng.randint(0, 2), rng).product()
        _check(M, reduce_to_framed(M))


def test_nonzero_31_entry_within_seven():
    rng = random.Random(31)
    seen = 0
    while seen < 50:
        M = rand_word(F2, 3, 10, 2, rng).product()
        if M[2, 0].is_zero():
            continue
        seen += 1
        assert reduce_to_framed(M).moves_used <= 7


def test_n5_and_unit_tail():
    rng = random.Random(5)
    for _ in range(20):
        M = rand_word(F3, 5, 12, 1, rng).product()
        _check(M, reduce_to_framed(M))
    # last row (0, 0, 2): unit-tail branch
    M = SqMatrix.diag(F3, [F3(2), F3(1), F3(2)])
    M = ElemMat(3, 0, 2, Poly.x(F3)).matrix() @ M
    _check(M, reduce_to_framed(M))


def test_debug_determinant_tracking(monkeypatch):
    monkeypatch.setattr(slmat, "DEBUG", True)
    M = rand_word(F2, 3, 10, 2, random.Random(9)).product()
    tr = slmat.Tracker(M)
    assert tr.check
    _check(M, reduce_to_framed(M))
