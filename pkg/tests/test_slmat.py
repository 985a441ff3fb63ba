import json
import random

import pytest

from elemgen.gf import GF
from elemgen.polyring import Poly
from elemgen.slmat import (
    Certificate,
    ElemMat,
    ElemWord,
    ShapeError,
    SqMatrix,
    apply_word,
    bound_nu,
    det,
    det_cofactor,
    mat_mul,
    stable_range_bound,
    unit_diag_word,
    verify,
    word_conjugate_by_diagonal,
    word_inverse,
    word_transpose,
)

from . import oracles

F2, F3, F4 = GF(2), GF(3), GF(2, 2)
X = Poly.x(F2)
ONE, ZERO = Poly.one(F2), Poly.zero(F2)


def rand_word(field, n, length, deg, rng):
    facs = []
    for _ in range(length):
        i, j = rng.sample(range(n), 2)
        t = Poly(field, [rng.randrange(field.q) for _ in range(deg + 1)])
        facs.append(ElemMat(n, i, j, t))
    return ElemWord(field, n, facs)


def corpus(count=200, seed=0):
    rng = random.Random(seed)
    for _ in range(count):
        field = rng.choice([F2, F3, F4])
        n = rng.choice([3, 4])
        yield rand_word(field, n, rng.randint(0, 12), rng.randint(0, 2), rng)


def test_bounds():
    assert bound_nu(3) == 41 and bound_nu(4) == 51
    assert stable_range_bound(3) == 7 and stable_range_bound(4) == 17


def test_mat_mul_examples():
    M = SqMatrix(F2, [[X, X + 1], [X * X + X + 1, X * X]])
    adj = SqMatrix(F2, [[X * X, X + 1], [X * X + X + 1, X]])  # char 2: -x = x
    assert M @ adj == SqMatrix.identity(F2, 2)
    assert mat_mul(M, SqMatrix.identity(F2, 2)) == M
    assert ElemMat(3, 0, 1, X).matrix() @ ElemMat(3, 0, 1, ONE).matrix() == ElemMat(3, 0, 1, X + 1).matrix()
    with pytest.raises(ShapeError):
        M @ SqMatrix.identity(F2, 3)


def test_det_examples():
    M = SqMatrix(F2, [[X, X + 1], [X * X + X + 1, X * X]])
    assert det(M).is_one()
    assert det(SqMatrix.identity(F3, 4)).is_one()
    assert det(ElemMat(4, 2, 0, Poly(F3, [1, 2, 1])).matrix()).is_one()


def test_det_against_leibniz():
    rng = random.Random(3)
    for _ in range(60):
        field = rng.choice([F2, F3, F4])
        n = rng.choice([2, 3, 4])
        rows = [[Poly(field, [rng.randrange(field.q) for _ in range(rng.randrange(0, 3))]) for _ in range(n)]
                for _ in range(n)]
        A = SqMatrix(field, rows)
        ref = oracles.det_leibniz(field, [[tuple(x.coeffs) for x in r] for r in rows])
        assert tuple(det(A).coeffs) == ref
        assert det_cofactor(A) == det(A)


def test_apply_word_examples():
    M = SqMatrix(F2, [[X, ONE], [ZERO, X + 1]])
    assert apply_word(M, ElemWord(F2, 2), "left") == M
    L = apply_word(M, ElemWord(F2, 2, [ElemMat(2, 1, 0, X)]), "left")
    assert L == SqMatrix(F2, [[X, ONE], [X * X, X + 1 + X]])
    R = apply_word(M, ElemWord(F2, 2, [ElemMat(2, 0, 1, X)]), "right")
    assert R == SqMatrix(F2, [[X, ONE + X * X], [ZERO, X + 1]])
    with pytest.raises(ValueError):
        apply_word(M, ElemWord(F2, 2), "middle")


def test_word_transform_examples():
    w = ElemWord(F2, 3, [ElemMat(3, 0, 1, X)])
    assert list(word_inverse(w)) == [ElemMat(3, 0, 1, -X)]
    assert len(word_inverse(ElemWord(F2, 3))) == 0
    assert list(word_transpose(w)) == [ElemMat(3, 1, 0, X)]
    g = F4(2)
    w4 = ElemWord(F4, 3, [ElemMat(3, 0, 1, Poly.x(F4))])
    c = word_conjugate_by_diagonal(w4, [g, F4.one, F4.one])
    assert list(c) == [ElemMat(3, 0, 1, Poly.x(F4).scale(g))]
    assert word_conjugate_by_diagonal(w4, [F4.one] * 3) == w4
    with pytest.raises(ZeroDivisionError):
        word_conjugate_by_diagonal(w4, [F4.zero, F4.one, F4.one])


def test_identity_factors_dropped():
    w = ElemWord(F2, 3, [ElemMat(3, 0, 1, ZERO), ElemMat(3, 1, 2, X)])
    assert len(w) == 1
    with pytest.raises(ShapeError):
        ElemMat(3, 1, 1, X)


def test_word_transforms_on_corpus():
    for W in corpus():
        P = W.product()
        F, n = W.field, W.n
        I = SqMatrix.identity(F, n)
        assert word_inverse(W).product() @ P == I
        assert P @ word_inverse(W).product() == I
        assert word_transpose(W).product() == P.transpose()
        assert word_transpose(word_transpose(W)) == W
        d = [F(1 + (k % (F.q - 1))) for k in range(n)]
        D = SqMatrix.diag(F, d)
        Di = SqMatrix.diag(F, [x.inverse() for x in d])
        assert word_conjugate_by_diagonal(W, d).product() == D @ P @ Di
        assert len(word_inverse(W)) == len(word_transpose(W)) == len(W)
        assert len(word_conjugate_by_diagonal(W, d)) == len(W)
        assert det(P).is_one()
        assert apply_word(I, W, "left") == P == apply_word(I, W, "right")


def test_relabel_word():
    rng = random.Random(8)
    for _ in range(40):
        W = rand_word(F3, 4, 6, 1, rng)
        perm = rng.sample(range(4), 4)
        # W.relabel(perm) realises the matrix N with N.relabel(perm) == product(W)
        assert W.relabel(perm).product().relabel(perm) == W.product()


def test_unit_diag_examples():
    w = F3(2)
    W = unit_diag_word(w, 0, 1, 2)
    one = Poly.one(F3)
    assert list(W) == [ElemMat(2, 0, 1, one), ElemMat(2, 1, 0, one), ElemMat(2, 0, 1, one), ElemMat(2, 1, 0, one)]
    assert W.product() == SqMatrix.diag(F3, [w, w])
    assert len(unit_diag_word(F3.one, 0, 1, 3)) == 0
    g = F4(2)
    W4 = unit_diag_word(g, 0, 1, 2)
    assert len(W4) == 4 and W4.product() == SqMatrix.diag(F4, [g, g + 1])
    with pytest.raises(ZeroDivisionError):
        unit_diag_word(F3.zero, 0, 1, 3)


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)])
def test_unit_diag_exhaustive(p, m):
    F = GF(p, m)
    for w in F.units():
        for i, j in [(0, 1), (1, 0), (0, 2), (2, 1)]:
            W = unit_diag_word(w, i, j, 3)
            d = [F.one] * 3
            d[i], d[j] = w, w.inverse()
            assert W.product() == SqMatrix.diag(F, d)
            assert len(W) == (0 if w == 1 else 4)


def _cert_for(W):
    P = W.product()
    return Certificate(W.field, W.n, P, W, len(W), bound_nu(W.n))


def test_verify_examples():
    assert verify(_cert_for(ElemWord(F2, 3)))
    rng = random.Random(4)
    W = rand_word(F3, 3, 8, 2, rng)
    cert = _cert_for(W)
    assert verify(cert) and cert.verified
    facs = list(W)
    facs[3] = ElemMat(3, facs[3].i, facs[3].j, facs[3].t + 1)
    bad = Certificate(F3, 3, cert.input, ElemWord(F3, 3, facs), len(W), 41)
    assert not verify(bad) and not bad.verified


def test_verify_bookkeeping():
    W = rand_word(F2, 3, 5, 1, random.Random(2))
    c = _cert_for(W)
    c.length += 1
    assert not verify(c)
    c = _cert_for(W)
    c.bound = 100
    assert not verify(c)
    long = ElemWord(F2, 3, [ElemMat(3, 0, 1, ONE)] * 42)
    assert not verify(_cert_for(long))


def test_certificate_json_roundtrip():
    W = rand_word(F4, 4, 9, 2, random.Random(6))
    cert = _cert_for(W)
    verify(cert)
    obj = json.loads(cert.dumps())
    assert obj["field"] == {"p": 2, "m": 2, "modulus": [1, 1, 1]}
    assert all(1 <= f["i"] <= 4 and 1 <= f["j"] <= 4 for f in obj["factors"])
    back = Certificate.from_json(obj)
    assert back.word == W and back.input == cert.input and verify(back)
    obj["factors"].append({"i": 1, "j": 2, "t": []})  # identity factor smuggled in
    obj["length"] += 1
    assert not verify(Certificate.from_json(obj))
    with pytest.raises(ValueError):
        Certificate.from_json({"n": 3})
