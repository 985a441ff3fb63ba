import json

import pytest

from elemgen import cli
from elemgen.cli import SlmError, corpus, format_slm, main, parse_slm, random_sl, rng_for
from elemgen.gf import GF
from elemgen.polyring import Poly
from elemgen.slmat import SqMatrix, det

F2, F3, F4 = GF(2), GF(3), GF(2, 2)

GENERAL = """field 2 1
size 3
[0 1 0 1 1 1 1] [1 0 1 1 1] [1 0 1 1 0 1]
[1 1 1 0 1] [1 0 1] [1 0 1 1]
[1 0 0 0 1] [0 0 1] [1 0 1 1]
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_slm_roundtrip():
    M = random_sl(F4, 3, 8, 2, rng_for(1, "t"))
    text = format_slm(M)
    assert text.startswith("field 2 2 [1 1 1]\nsize 3\n")
    assert parse_slm(text) == M
    commented = "# a comment\n\n" + text
    assert parse_slm(commented) == M


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("field 2 1\nsize 3\n[1] [] []\n[] [1] [1 2]\n[] [] [1]\n", 4, 8),
        ("field 2 1\nsize 3\n[1] [] []\n[] x []\n[] [] [1]\n", 4, 4),
        ("field two\nsize 3\n", 1, 1),
        ("field 2 1\nsize 2\n[1] []\n[1]\n", 4, None),
    ],
)
def test_slm_errors_carry_position(text, line, col):
    with pytest.raises(SlmError) as ei:
        parse_slm(text)
    assert ei.value.line == line and ei.value.col == col
    assert f"line {line}" in str(ei.value)


def test_slm_errors_misc():
    for bad in ["", "field 2 1\n", "field 4 1\nsize 2\n[1] []\n[] [1]\n", "field 2 1\nsize 2\n[1] []\n"]:
        with pytest.raises(SlmError):
            parse_slm(bad)


def test_decompose_identity(tmp_path, capsys):
    src = write(tmp_path, "id.slm", format_slm(SqMatrix.identity(F3, 3)))
    out = str(tmp_path / "c.json")
    assert main(["decompose", "-i", src, "-o", out]) == 0
    obj = json.loads(open(out).read())
    assert obj["factors"] == [] and obj["length"] == 0 and obj["bound"] == 41
    assert main(["verify", "-c", out]) == 0


def test_decompose_rejects_sl2_and_bad_det(tmp_path, capsys):
    src = write(tmp_path, "two.slm", "field 2 1\nsize 2\n[1] []\n[] [1]\n")
    assert main(["decompose", "-i", src]) == 1
    err = capsys.readouterr().err
    assert "SL2 is not boundedly elementary generated" in err
    assert "not boundedly generated by the elementary" in err
    src = write(tmp_path, "det.slm", "field 3 1\nsize 3\n[2] [] []\n[] [1] []\n[] [] [1]\n")
    assert main(["decompose", "-i", src]) == 1
    assert "determinant" in capsys.readouterr().err


def test_decompose_malformed_token(tmp_path, capsys):
    src = write(tmp_path, "bad.slm", "field 2 1\nsize 3\n[1] [] []\n[] [1] [1 3]\n[] [] [1]\n")
    assert main(["decompose", "-i", src]) == 1
    assert "line 4, column 8" in capsys.readouterr().err
    assert main(["decompose", "-i", str(tmp_path / "missing.slm")]) == 1


def test_decompose_verify_and_tamper(tmp_path, capsys):
    src = write(tmp_path, "g.slm", GENERAL)
    out = str(tmp_path / "g.json")
    assert main(["decompose", "-i", src, "-o", out]) == 0
    assert main(["verify", "-c", out]) == 0
    obj = json.loads(open(out).read())
    assert 0 < obj["length"] <= 41 and obj["verified"]

    tampered = dict(obj, factors=[dict(f) for f in obj["factors"]])
    f0 = tampered["factors"][0]
    f0["t"] = [1] if f0["t"] != [1] else [0, 1]
    assert main(["verify", "-c", write(tmp_path, "t1.json", json.dumps(tampered))]) == 2

    wrong_len = dict(obj, length=obj["length"] - 1)
    assert main(["verify", "-c", write(tmp_path, "t2.json", json.dumps(wrong_len))]) == 2

    # a stored verdict is never trusted
    lying = dict(tampered, verified=True)
    assert main(["verify", "-c", write(tmp_path, "t3.json", json.dumps(lying))]) == 2

    assert main(["verify", "-c", write(tmp_path, "junk.json", "{not json")]) == 1


def test_decompose_deterministic(tmp_path, capsys):
    src = write(tmp_path, "g.slm", GENERAL)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["decompose", "-i", src, "-o", a]) == 0
    assert main(["decompose", "-i", src, "-o", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_decompose_budget_exit(tmp_path, capsys):
    src = write(tmp_path, "g.slm", GENERAL)
    assert main(["decompose", "-i", src, "--max-prime-degree", "1"]) == 3
    assert "budget exceeded" in capsys.readouterr().err


def test_random_command(tmp_path, capsys, monkeypatch):
    out = str(tmp_path / "r.slm")
    assert main(["random", "-p", "3", "-n", "4", "--len", "9", "--deg", "2", "--seed", "7", "-o", out]) == 0
    M = parse_slm(open(out).read())
    assert M.n == 4 and M.field is F3 and det(M).is_one()
    out2 = str(tmp_path / "r2.slm")
    main(["random", "-p", "3", "-n", "4", "--len", "9", "--deg", "2", "--seed", "7", "-o", out2])
    assert open(out).read() == open(out2).read()
    monkeypatch.setenv("ELEMGEN_SEED", "7")
    assert main(["random", "-p", "3", "-n", "4", "--len", "9", "--deg", "2"]) == 0
    assert capsys.readouterr().out == open(out).read()
    assert main(["random", "-p", "4", "-n", "3", "--len", "2", "--deg", "1"]) == 1


def test_corpus_properties():
    a = list(corpus(F2, 3, 15, 2, 20, seed=3))
    b = list(corpus(F2, 3, 15, 2, 20, seed=3))
    assert a == b
    assert all(det(M).is_one() for M in a)
    assert a != list(corpus(F2, 3, 15, 2, 20, seed=4))
    # sample k does not depend on how many samples precede it
    assert list(corpus(F2, 3, 15, 2, 5, seed=3)) == a[:5]


def test_stats_command(tmp_path, capsys):
    js = str(tmp_path / "s.json")
    args = ["stats", "-p", "2", "-n", "3", "--count", "12", "--len", "8", "--deg", "1", "--seed", "5"]
    assert main(args + ["--json", js]) == 0
    text1 = capsys.readouterr().out
    rep1 = open(js).read()
    assert main(args + ["--json", js, "--jobs", "2"]) == 0
    assert capsys.readouterr().out == text1 and open(js).read() == rep1
    rep = json.loads(rep1)
    assert rep["verified"] == 12 and rep["failures"] == []
    assert rep["length"]["max"] <= 41
    assert set(rep["breakdown"]) == {"stable_range", "primalize", "x_side", "patch", "y_side", "finish"}
    assert "verified: 12/12" in text1


def test_stats_identity_corpus(capsys):
    rep = cli.stats_report(F2, 3, 0, 2, 5, 1, {})
    assert rep["length"] == {"min": 0, "mean": 0.0, "max": 0}


def test_prime_command(capsys):
    assert main(["prime", "-p", "2", "--mod-a", "[0 1]", "--res-b", "[1]"]) == 0
    assert capsys.readouterr().out.split()[:2] == ["[1", "1]"]
    assert main(["prime", "-p", "2", "--mod-a", "[0 1]", "--res-b", "[1]", "--deg-coprime-to", "2",
                 "--max-degree", "9"]) == 0
    deg = int(capsys.readouterr().out.split()[-1])
    assert deg % 2 == 1
    assert main(["prime", "-p", "2", "--mod-a", "[0 1 1]", "--res-b", "[0 1]"]) == 1
    assert main(["prime", "-p", "2", "--mod-a", "[1 1 0 0 0 0 1]", "--res-b", "[1 0 0 0 0 1]",
                 "--max-degree", "5"]) == 3


def test_selftest_command(capsys):
    assert main(["selftest", "-q"]) == 0


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
