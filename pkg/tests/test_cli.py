import json

import pytest

from conftest import FIGURE_BP
from hypertree.cli import main


def run(*argv):
    return main(list(argv))


def test_encode_decode_roundtrip(tmp_path):
    src = tmp_path / "t.bp"
    src.write_text(FIGURE_BP + "\n")
    hst = tmp_path / "t.hst"
    out = tmp_path / "t2.bp"
    assert run("encode", "--kind", "binary", str(src), str(hst)) == 0
    assert run("decode", str(hst), str(out)) == 0
    assert out.read_text() == src.read_text()


def test_encode_decode_ordinal(tmp_path):
    src = tmp_path / "o.bp"
    src.write_text("(()()(()))\n")
    hst = tmp_path / "o.hst"
    out = tmp_path / "o2.bp"
    assert run("encode", "--kind", "ordinal", "--block", "2", str(src), str(hst)) == 0
    assert run("decode", str(hst), str(out)) == 0
    assert out.read_text() == src.read_text()


def test_encode_rejects_malformed(tmp_path, capsys):
    src = tmp_path / "bad.bp"
    src.write_text("(()\n")
    hst = tmp_path / "bad.hst"
    assert run("encode", "--kind", "binary", str(src), str(hst)) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as se:
        run("encode", "--kind", "weird", "a", "b")
    assert se.value.code == 2


def test_sample_deterministic(tmp_path):
    a = tmp_path / "a.bp"
    b = tmp_path / "b.bp"
    assert run("sample", "--source", "bst", "--size", "50", "--seed", "9",
               "--count", "4", "--out", str(a)) == 0
    assert run("sample", "--source", "bst", "--size", "50", "--seed", "9",
               "--count", "4", "--out", str(b)) == 0
    assert a.read_text() == b.read_text()
    assert len(a.read_text().splitlines()) == 4


def test_sample_every_cli_source(tmp_path):
    for spec, size in [("bst", 40), ("uniform", 40), ("binomial:0.5", 40),
                       ("almostpath:2", 40), ("fringebalanced:1", 41),
                       ("avl-size", 20), ("avl-height", 4), ("llrb", 12),
                       ("wb:2/7", 15), ("motzkin", 64),
                       ("memoryless:0.25,0.25,0.25,0.25", 64),
                       ("composition", 40), ("lrm", 40)]:
        out = tmp_path / "s.bp"
        assert run("sample", "--source", spec, "--size", str(size),
                   "--seed", "1", "--out", str(out)) == 0, spec
        assert out.read_text().strip(), spec


def test_analyze_figure_tree(tmp_path, capsys):
    src = tmp_path / "t.bp"
    src.write_text(FIGURE_BP + "\n")
    assert run("analyze", "--source", "bst", str(src)) == 0
    row = json.loads(capsys.readouterr().out.strip())
    assert row["n"] == 20
    assert abs(row["logProbBits"] - 28.74) < 0.01
    assert row["space"]["total"] > 0


def test_analyze_ordinal_and_dump(tmp_path, capsys):
    src = tmp_path / "o.bp"
    src.write_text("(()()())\n")
    assert run("analyze", "--source", "lrm", "--order", "1",
               "--dump-cover", str(src)) == 0
    row = json.loads(capsys.readouterr().out.strip())
    assert row["kind"] == "ordinal"
    assert "shapeEntropy" in row and "cover" in row


def test_rmq_commands(tmp_path, capsys):
    arr = tmp_path / "a.txt"
    arr.write_text("2 3 4 1 6 5 7 9 10 8\n")
    hst = tmp_path / "a.hst"
    assert run("rmq", "build", str(arr), str(hst)) == 0
    assert run("rmq", "query", str(hst), "5", "8") == 0
    assert capsys.readouterr().out.strip() == "6"
    assert run("rmq", "query", str(hst), "1", "10") == 0
    assert capsys.readouterr().out.strip() == "4"
    assert run("rmq", "runs", str(arr)) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["r"] == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("\n")
    assert run("rmq", "runs", str(bad)) == 1


def test_bench_csv_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    args = ["bench", "--source", "bst", "--sizes", "64,256", "--seed", "7",
            "--reps", "2"]
    assert run(*args, "--csv", str(a)) == 0
    assert run(*args, "--csv", str(b)) == 0
    assert a.read_text() == b.read_text()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("source,n,replicate,seed,B,m,bitsTotal")
    assert len(lines) == 1 + 4
    row = lines[1].split(",")
    header = lines[0].split(",")
    total = int(row[header.index("bitsTotal")])
    parts = sum(int(row[header.index(k)]) for k in
                ["headerBits", "topTierBits", "codebookBits", "codewordBits",
                 "portalBits", "edgeTypeBits"])
    assert total == parts


def test_bench_ordinal_source(tmp_path):
    out = tmp_path / "o.csv"
    assert run("bench", "--source", "lrm", "--sizes", "128", "--seed", "3",
               "--reps", "2", "--csv", str(out)) == 0
    assert len(out.read_text().splitlines()) == 3
