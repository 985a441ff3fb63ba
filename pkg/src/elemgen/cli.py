"""Command-line front end: ``elemgen decompose | verify | random | stats | prime | selftest``.

Matrix files (``.slm``) are line oriented::

    field 2 1
    size 3
    [1] [0 1] [0]
    [0] [1] [0]
    [0] [0] [1]

``field p m`` may be followed by a modulus literal ``[c0 ... cm]``.  Blank
lines and lines starting with ``#`` are ignored.

Exit codes: 0 success, 1 parse or validation error, 2 verification failure,
3 budget exhausted (prime search degree or output-size ceiling).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .core import (
    DEFAULT_DEGREE_CEILING,
    DEFAULT_EXPONENT_CEILING,
    DEFAULT_MAX_PRIME_DEGREE,
    DegreeCeilingExceeded,
    decompose,
)
from .gf import GF, FieldError
from .polyring import Poly, PolyError, PrimeSearchExhausted, find_prime_in_progression, format_poly, parse_poly
from .reduce import NotSLError
from .slmat import BREAKDOWN_KEYS, Certificate, ElemMat, ElemWord, ShapeError, SqMatrix, verify

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3


class SlmError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = f"line {line}" + (f", column {col}" if col is not None else "") + ": " if line else ""
        super().__init__(where + msg)


# ---------------------------------------------------------------------------
# matrix files

_LIT = re.compile(r"\[[^\[\]]*\]|\S+")


def _literals(text: str, lineno: int, offset: int = 0):
    for m in _LIT.finditer(text, offset):
        yield m.group(0), m.start() + 1


def parse_slm(text: str) -> SqMatrix:
    lines = [
        (i + 1, ln) for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if len(lines) < 2:
        raise SlmError("expected a 'field' line and a 'size' line")
    no, ln = lines[0]
    m = re.match(r"\s*field\s+(\d+)\s+(\d+)\s*(\[[^\]]*\])?\s*$", ln)
    if not m:
        raise SlmError("expected 'field p m [modulus]'", no, 1)
    p, deg = int(m.group(1)), int(m.group(2))
    modulus = None
    if m.group(3):
        try:
            modulus = [int(t) for t in m.group(3)[1:-1].split()]
        except ValueError:
            raise SlmError("bad modulus literal", no, m.start(3) + 1) from None
    try:
        F = GF(p, deg, modulus)
    except FieldError as exc:
        raise SlmError(str(exc), no, 1) from None
    no, ln = lines[1]
    m = re.match(r"\s*size\s+(\d+)\s*$", ln)
    if not m:
        raise SlmError("expected 'size n'", no, 1)
    n = int(m.group(1))
    body = lines[2:]
    if len(body) != n:
        raise SlmError(f"expected {n} matrix rows, found {len(body)}", body[-1][0] if body else no)
    rows = []
    for no, ln in body:
        row = []
        for tok, col in _literals(ln, no):
            try:
                row.append(parse_poly(F, tok))
            except PolyError as exc:
                raise SlmError(str(exc), no, col) from None
        if len(row) != n:
            raise SlmError(f"expected {n} entries, found {len(row)}", no)
        rows.append(row)
    try:
        return SqMatrix(F, rows)
    except ShapeError as exc:
        raise SlmError(str(exc)) from None


def format_slm(M: SqMatrix) -> str:
    F = M.field
    head = f"field {F.p} {F.m}"
    if F.m > 1:
        head += " [" + " ".join(map(str, F.modulus)) + "]"
    out = [head, f"size {M.n}"]
    out += [" ".join(format_poly(x) for x in r) for r in M.rows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# randomness


def default_seed() -> int:
    env = os.environ.get("ELEMGEN_SEED")
    return int(env) if env else 0


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent stream per label, all derived from one 64-bit seed."""
    return np.random.default_rng([seed & (2**64 - 1), zlib.crc32(label.encode())])


def random_word(F: GF, n: int, length: int, max_deg: int, rng: np.random.Generator) -> ElemWord:
    """Uniform (i, j), i != j, and t uniform among polynomials of degree <= max_deg."""
    facs = []
    for _ in range(length):
        i, j = rng.choice(n, size=2, replace=False)
        t = Poly(F, [int(c) for c in rng.integers(0, F.q, size=max_deg + 1)])
        facs.append(ElemMat(n, int(i), int(j), t))
    return ElemWord(F, n, facs)


def random_sl(F: GF, n: int, length: int, max_deg: int, rng) -> SqMatrix:
    return random_word(F, n, length, max_deg, rng).product()


def corpus(F: GF, n: int, max_len: int, max_deg: int, count: int, seed: int):
    """Sample i uses a word of length uniform in [0, max_len] and its own stream."""
    for k in range(count):
        rng = rng_for(seed, f"corpus/{F.q}/{n}/{k}")
        L = int(rng.integers(0, max_len + 1))
        yield random_sl(F, n, L, max_deg, rng)


# ---------------------------------------------------------------------------
# commands


def _field_from_args(args) -> GF:
    mod = None
    if getattr(args, "modulus", None):
        mod = [int(t) for t in args.modulus.strip("[] ").split()]
    return GF(args.p, args.m, mod)


def _decompose_kwargs(args):
    return dict(
        max_prime_degree=args.max_prime_degree,
        degree_ceiling=args.degree_ceiling or None,
        exponent_ceiling=args.exponent_ceiling or None,
    )


def cmd_decompose(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            M = parse_slm(fh.read())
        cert = decompose(M, **_decompose_kwargs(args))
    except (OSError, SlmError, NotSLError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PrimeSearchExhausted, DegreeCeilingExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"internal verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    text = json.dumps(cert.to_json(), separators=(",", ":")) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"length {cert.length} <= bound {cert.bound}; breakdown {cert.breakdown}", file=sys.stderr)
    return EXIT_OK if cert.verified else EXIT_VERIFY


def cmd_verify(args) -> int:
    try:
        with open(args.cert, encoding="utf-8") as fh:
            obj = json.load(fh)
        cert = Certificate.from_json(obj)
    except (OSError, ValueError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ok = verify(cert)
    print("verified" if ok else "NOT verified", f"(length {cert.length}, bound {cert.bound})")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_random(args) -> int:
    try:
        F = _field_from_args(args)
        if args.n < 2 or args.len < 0 or args.deg < 0:
            raise ValueError("need n >= 2, len >= 0, deg >= 0")
    except (FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else default_seed()
    M = random_sl(F, args.n, args.len, args.deg, rng_for(seed, "random"))
    text = format_slm(M)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _stats_item(job):
    M, kw = job
    try:
        cert = decompose(M, **kw)
    except Exception as exc:  # reported, not raised
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
    facs = max((e.t.degree for e in cert.word), default=0)
    return {
        "ok": cert.verified,
        "length": cert.length,
        "breakdown": cert.breakdown,
        "max_degree": max(facs, M.max_degree()),
    }


def stats_report(F, n, max_len, max_deg, count, seed, kw, jobs=1) -> dict:
    items = [(M, kw) for M in corpus(F, n, max_len, max_deg, count, seed)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            res = list(ex.map(_stats_item, items, chunksize=4))
    else:
        res = [_stats_item(it) for it in items]
    good = [r for r in res if r["ok"]]
    lengths = [r["length"] for r in good]
    hist = {k: Counter(r["breakdown"].get(k, 0) for r in good) for k in BREAKDOWN_KEYS}
    from .slmat import bound_nu

    return {
        "field": {"p": F.p, "m": F.m},
        "n": n,
        "count": count,
        "seed": seed,
        "max_len": max_len,
        "max_deg": max_deg,
        "bound": bound_nu(n),
        "verified": len(good),
        "failures": [dict(index=i, error=r.get("error", "not verified")) for i, r in enumerate(res) if not r["ok"]],
        "length": {
            "min": min(lengths, default=0),
            "mean": round(sum(lengths) / len(lengths), 4) if lengths else 0,
            "max": max(lengths, default=0),
        },
        "breakdown": {k: {str(v): c for v, c in sorted(h.items())} for k, h in hist.items()},
        "max_entry_degree": max((r["max_degree"] for r in good), default=-1),
    }


def format_report(rep: dict) -> str:
    lines = [
        f"corpus: GF({rep['field']['p']}^{rep['field']['m']}), n = {rep['n']}, "
        f"{rep['count']} samples, word length <= {rep['max_len']}, degree <= {rep['max_deg']}, seed {rep['seed']}",
        f"verified: {rep['verified']}/{rep['count']}   failures: {len(rep['failures'])}",
        f"length: min {rep['length']['min']}  mean {rep['length']['mean']}  max {rep['length']['max']}  (bound {rep['bound']})",
        f"max entry degree: {rep['max_entry_degree']}",
        "phase histograms (moves: count):",
    ]
    for k, h in rep["breakdown"].items():
        lines.append(f"  {k:<13}" + "  ".join(f"{v}:{c}" for v, c in h.items()))
    for f in rep["failures"][:10]:
        lines.append(f"  failure #{f['index']}: {f['error']}")
    return "\n".join(lines)


def cmd_stats(args) -> int:
    try:
        F = _field_from_args(args)
    except (FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else default_seed()
    rep = stats_report(F, args.n, args.len, args.deg, args.count, seed, _decompose_kwargs(args), args.jobs)
    print(format_report(rep))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rep, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if not rep["failures"] else EXIT_VERIFY


def cmd_prime(args) -> int:
    try:
        F = _field_from_args(args)
        a = parse_poly(F, args.mod_a)
        b = parse_poly(F, args.res_b)
        P = find_prime_in_progression(a, b, args.deg_coprime_to, args.max_degree)
    except (FieldError, PolyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrimeSearchExhausted as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(format_poly(P), f"degree {P.degree}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run

    return EXIT_OK if run(verbose=not args.quiet) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elemgen", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    def budget(p):
        p.add_argument("--max-prime-degree", type=int, default=DEFAULT_MAX_PRIME_DEGREE)
        p.add_argument("--degree-ceiling", type=int, default=DEFAULT_DEGREE_CEILING,
                       help="abort if the predicted entry degree exceeds this (0: no limit)")
        p.add_argument("--exponent-ceiling", type=int, default=DEFAULT_EXPONENT_CEILING,
                       help="abort if the Cayley-Hamilton exponent exceeds this (0: no limit)")

    def field(p):
        p.add_argument("-p", type=int, required=True, help="characteristic")
        p.add_argument("-m", type=int, default=1, help="extension degree")
        p.add_argument("--modulus", help="modulus literal '[c0 ... cm]'")

    p = sub.add_parser("decompose", help="factor a matrix file into elementary matrices")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", default="-")
    budget(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="re-check a certificate")
    p.add_argument("-c", "--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", help="emit a random product of elementary matrices")
    field(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("stats", help="decompose a seeded random corpus and report")
    field(p)
    p.add_argument("-n", type=int, default=3)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--len", type=int, default=15, help="maximal word length")
    p.add_argument("--deg", type=int, default=2)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", help="write the machine-readable report here")
    budget(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("prime", help="prime congruent to b mod a")
    field(p)
    p.add_argument("--mod-a", required=True)
    p.add_argument("--res-b", required=True)
    p.add_argument("--deg-coprime-to", type=int)
    p.add_argument("--max-degree", type=int, default=DEFAULT_MAX_PRIME_DEGREE)
    p.set_defaults(func=cmd_prime)

    p = sub.add_parser("selftest", help="run the embedded invariant checks")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
