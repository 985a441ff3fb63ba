"""Dense matrices over F_q[X], elementary matrices and words of them.

Indices are 0-based in Python; the JSON certificate uses 1-based indices so
that factor ``{"i": 1, "j": 2, ...}`` reads as E_12.

A word is an ordered product read left to right.  A row move on M is left
multiplication by E_ij(t) (row i += t * row j); a column move is right
multiplication (column j += t * column i).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .gf import GF, FieldElement
from .polyring import Poly, PolyError, format_poly

DEBUG = bool(os.environ.get("ELEMGEN_DEBUG"))


def bound_nu(n: int) -> int:
    """Global word-length bound (3n^2 - n)/2 + 29."""
    return (3 * n * n - n) // 2 + 29


def stable_range_bound(n: int) -> int:
    return (3 * n * n - n) // 2 - 5


class ShapeError(ValueError):
    pass


class SqMatrix:
    """n x n matrix of Poly entries over one field.  Treat as immutable."""

    __slots__ = ("field", "n", "rows")

    def __init__(self, field: GF, rows: Sequence[Sequence[Poly]]):
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ShapeError("matrix must be square")
        for r in rows:
            for x in r:
                if not isinstance(x, Poly) or x.field is not field:
                    raise ShapeError("entries must be Poly over the matrix field")
        self.field = field
        self.n = n
        self.rows = tuple(tuple(r) for r in rows)

    @classmethod
    def identity(cls, field: GF, n: int) -> "SqMatrix":
        one, zero = Poly.one(field), Poly.zero(field)
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_codes(cls, field: GF, rows) -> "SqMatrix":
        """Build from nested lists of coefficient-code lists."""
        return cls(field, [[Poly(field, e) for e in r] for r in rows])

    @classmethod
    def framed(cls, core: "SqMatrix", n: int, corner=None) -> "SqMatrix":
        """Embed a k x k block top-left in I_n (optionally with entry
        ``corner`` placed at position (k, k))."""
        k = core.n
        if n < k:
            raise ShapeError("frame smaller than block")
        F = core.field
        rows = [list(r) for r in cls.identity(F, n).rows]
        for i in range(k):
            for j in range(k):
                rows[i][j] = core.rows[i][j]
        if corner is not None:
            rows[k][k] = corner if isinstance(corner, Poly) else Poly.const(F, corner)
        return cls(F, rows)

    @classmethod
    def diag(cls, field: GF, entries) -> "SqMatrix":
        n = len(entries)
        rows = [list(r) for r in cls.identity(field, n).rows]
        for i, e in enumerate(entries):
            rows[i][i] = e if isinstance(e, Poly) else Poly.const(field, e)
        return cls(field, rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def block(self, k: int) -> "SqMatrix":
        return SqMatrix(self.field, [r[:k] for r in self.rows[:k]])

    def transpose(self) -> "SqMatrix":
        return SqMatrix(self.field, [list(c) for c in zip(*self.rows)])

    def relabel(self, perm: Sequence[int]) -> "SqMatrix":
        """Matrix N with N[i][j] = self[perm[i]][perm[j]]."""
        return SqMatrix(self.field, [[self.rows[pi][pj] for pj in perm] for pi in perm])

    def __matmul__(self, other: "SqMatrix") -> "SqMatrix":
        return mat_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, SqMatrix):
            return NotImplemented
        return self.field is other.field and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def max_degree(self) -> int:
        return max(x.degree for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return all(
            (x.is_one() if i == j else x.is_zero())
            for i, r in enumerate(self.rows)
            for j, x in enumerate(r)
        )

    def to_codes(self):
        return [[x.coeffs for x in r] for r in self.rows]

    def __repr__(self):
        body = "; ".join(" ".join(format_poly(x) for x in r) for r in self.rows)
        return f"SqMatrix({body})"


def mat_mul(A: SqMatrix, B: SqMatrix) -> SqMatrix:
    if A.n != B.n:
        raise ShapeError("dimension mismatch")
    if A.field is not B.field:
        raise ShapeError("field mismatch")
    n = A.n
    zero = Poly.zero(A.field)
    cols = list(zip(*B.rows))
    out = []
    for r in A.rows:
        row = []
        for c in cols:
            acc = zero
            for x, y in zip(r, c):
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return SqMatrix(A.field, out)


def det(A: SqMatrix) -> Poly:
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    n = A.n
    F = A.field
    M = [list(r) for r in A.rows]
    sign = 1
    prev = Poly.one(F)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for r in range(k + 1, n):
                if not M[r][k].is_zero():
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(F)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num.exact_div(prev)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d if sign == 1 else -d


def det_cofactor(A: SqMatrix) -> Poly:
    """Laplace expansion along the first row; for small n and cross-checks."""
    rows = [list(r) for r in A.rows]

    def rec(m):
        if len(m) == 1:
            return m[0][0]
        acc = Poly.zero(A.field)
        for j, x in enumerate(m[0]):
            if x.is_zero():
                continue
            minor = [r[:j] + r[j + 1 :] for r in m[1:]]
            term = x * rec(minor)
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    return rec(rows)


@dataclass(frozen=True)
class ElemMat:
    """E_ij(t) = I + t e_i e_j^T (0-based i != j)."""

    n: int
    i: int
    j: int
    t: Poly

    def __post_init__(self):
        if self.i == self.j:
            raise ShapeError("elementary matrix needs i != j")
        if not (0 <= self.i < self.n and 0 <= self.j < self.n):
            raise ShapeError("index out of range")

    def matrix(self) -> SqMatrix:
        F = self.t.field
        rows = [list(r) for r in SqMatrix.identity(F, self.n).rows]
        rows[self.i][self.j] = self.t
        return SqMatrix(F, rows)

    def __repr__(self):
        return f"E{self.i + 1}{self.j + 1}({format_poly(self.t)})"


class ElemWord:
    """Ordered product of elementary matrices; identity factors are dropped."""

    __slots__ = ("n", "field", "factors")

    def __init__(self, field: GF, n: int, factors: Iterable[ElemMat] = ()):
        self.field = field
        self.n = n
        out = []
        for e in factors:
            if e.n != n or e.t.field is not field:
                raise ShapeError("factor does not match word shape")
            if not e.t.is_zero():
                out.append(e)
        self.factors = tuple(out)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __add__(self, other: "ElemWord") -> "ElemWord":
        if other.n != self.n or other.field is not self.field:
            raise ShapeError("word shape mismatch")
        w = ElemWord(self.field, self.n)
        w.factors = self.factors + other.factors
        return w

    def __eq__(self, other):
        if not isinstance(other, ElemWord):
            return NotImplemented
        return self.n == other.n and self.factors == other.factors

    def __repr__(self):
        return "ElemWord[" + ", ".join(map(repr, self.factors)) + "]"

    def product(self) -> SqMatrix:
        return apply_word(SqMatrix.identity(self.field, self.n), self, "right")

    def relabel(self, perm: Sequence[int]) -> "ElemWord":
        """Word for P^-1 W P where the matrix relabel uses ``perm``."""
        return ElemWord(
            self.field, self.n, [ElemMat(self.n, perm[e.i], perm[e.j], e.t) for e in self.factors]
        )


def _row_op(rows, i, j, t):
    rj = rows[j]
    rows[i] = [x + t * y if y else x for x, y in zip(rows[i], rj)]


def _col_op(rows, i, j, t):
    for r in rows:
        if r[i]:
            r[j] = r[j] + t * r[i]


def apply_word(M: SqMatrix, W: ElemWord, side: str) -> SqMatrix:
    """product(W) @ M for side='left', M @ product(W) for side='right'."""
    if W.n != M.n or W.field is not M.field:
        raise ShapeError("word and matrix shapes differ")
    rows = [list(r) for r in M.rows]
    if side == "left":
        for e in reversed(W.factors):
            _row_op(rows, e.i, e.j, e.t)
    elif side == "right":
        for e in W.factors:
            _col_op(rows, e.i, e.j, e.t)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return SqMatrix(M.field, rows)


def word_inverse(W: ElemWord) -> ElemWord:
    return ElemWord(W.field, W.n, [ElemMat(W.n, e.i, e.j, -e.t) for e in reversed(W.factors)])


def word_transpose(W: ElemWord) -> ElemWord:
    return ElemWord(W.field, W.n, [ElemMat(W.n, e.j, e.i, e.t) for e in reversed(W.factors)])


def word_conjugate_by_diagonal(W: ElemWord, d: Sequence[FieldElement]) -> ElemWord:
    """Word for D W D^-1, D = diag(d); each E_ij(t) becomes E_ij(d_i t / d_j)."""
    if len(d) != W.n:
        raise ShapeError("diagonal length differs from word size")
    if any(not x for x in d):
        raise ZeroDivisionError("diagonal entries must be units")
    return ElemWord(
        W.field, W.n, [ElemMat(W.n, e.i, e.j, e.t.scale(d[e.i] / d[e.j])) for e in W.factors]
    )


def unit_diag_word(w: FieldElement, i: int, j: int, n: int) -> ElemWord:
    """Four factors whose product is diag with w at i, w^-1 at j.

    E_ij(1) E_ji(w-1) E_ij(-w^-1) E_ji(-w(w-1)); empty for w = 1.
    """
    if not w:
        raise ZeroDivisionError("w must be a unit")
    if i == j:
        raise ShapeError("i and j must differ")
    F = w.field
    if w == 1:
        return ElemWord(F, n)
    wi = w.inverse()
    ts = [F.one, w - 1, -wi, -(w * (w - 1))]
    pos = [(i, j), (j, i), (i, j), (j, i)]
    return ElemWord(F, n, [ElemMat(n, a, b, Poly.const(F, t)) for (a, b), t in zip(pos, ts)])


class Tracker:
    """Two-sided reduction bookkeeping.

    Keeps ``L @ M0 @ R == current`` where L collects row moves and R column
    moves in the order they were applied.
    """

    def __init__(self, M: SqMatrix):
        self.field = M.field
        self.n = M.n
        self.rows = [list(r) for r in M.rows]
        self._left = []  # application order
        self._right = []
        self.check = DEBUG

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i, j, t):
        """Row i += t * row j."""
        if t.is_zero():
            return
        _row_op(self.rows, i, j, t)
        self._left.append(ElemMat(self.n, i, j, t))
        self._checkpoint()

    def col(self, i, j, t):
        """Column j += t * column i."""
        if t.is_zero():
            return
        _col_op(self.rows, i, j, t)
        self._right.append(ElemMat(self.n, i, j, t))
        self._checkpoint()

    def _checkpoint(self):
        if self.check and not det(self.matrix()).is_one():
            raise AssertionError("determinant drifted away from 1")

    @property
    def moves(self) -> int:
        return len(self._left) + len(self._right)

    def left_word(self) -> ElemWord:
        return ElemWord(self.field, self.n, reversed(self._left))

    def right_word(self) -> ElemWord:
        return ElemWord(self.field, self.n, self._right)

    def matrix(self) -> SqMatrix:
        return SqMatrix(self.field, self.rows)


# ---------------------------------------------------------------------------
# certificates

BREAKDOWN_KEYS = ("stable_range", "primalize", "x_side", "patch", "y_side", "finish")


@dataclass
class Certificate:
    field: GF
    n: int
    input: SqMatrix
    word: ElemWord
    length: int
    bound: int
    verified: bool = False
    breakdown: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": {"p": F.p, "m": F.m, "modulus": list(F.modulus)},
            "n": self.n,
            "input": self.input.to_codes(),
            "factors": [
                {"i": e.i + 1, "j": e.j + 1, "t": e.t.coeffs} for e in self.word
            ],
            "length": self.length,
            "bound": self.bound,
            "verified": self.verified,
            "breakdown": dict(self.breakdown),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        try:
            fd = obj["field"]
            F = GF(int(fd["p"]), int(fd["m"]), fd.get("modulus"))
            n = int(obj["n"])
            M = SqMatrix.from_codes(F, obj["input"])
            if M.n != n:
                raise ShapeError("input matrix size differs from n")
            facs = []
            for f in obj["factors"]:
                facs.append(ElemMat(n, int(f["i"]) - 1, int(f["j"]) - 1, Poly(F, f["t"])))
            cert = cls(
                field=F,
                n=n,
                input=M,
                word=ElemWord(F, n, facs),
                length=int(obj["length"]),
                bound=int(obj["bound"]),
                verified=bool(obj.get("verified", False)),
                breakdown=dict(obj.get("breakdown", {})),
            )
            cert._raw_factor_count = len(obj["factors"])
            return cert
        except (KeyError, TypeError, PolyError) as exc:
            raise ValueError(f"malformed certificate: {exc}") from exc


def verify(cert: Certificate) -> bool:
    """Recompute the product and the length bookkeeping; sets ``verified``."""
    ok = True
    raw = getattr(cert, "_raw_factor_count", len(cert.word))
    if raw != len(cert.word):  # identity factors present in the file
        ok = False
    if cert.length != len(cert.word) or cert.bound != bound_nu(cert.n):
        ok = False
    if cert.length > cert.bound:
        ok = False
    if ok:
        ok = cert.word.product() == cert.input
    cert.verified = ok
    return ok
