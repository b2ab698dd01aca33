import csv
import io
import json

import pytest

from polarpunct.cli import main
from polarpunct.patterns import Pattern


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pfile(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("N=8\n# table patterns\n11101000\n0xD8\n")
    return str(path)


def test_enumerate_count(capsys):
    code, out, err = run(capsys, "enumerate", "--kind", "search-tree", "--N", "256", "--Np", "85", "--lmax", "3", "--count-only")
    assert code == 0
    assert out == "count=2940\n"
    assert '"argv"' in err  # manifest on stderr


def test_enumerate_patterns(capsys):
    code, out, _ = run(capsys, "enumerate", "--kind", "symmetric", "--N", "8", "--Np", "4")
    lines = out.split()
    assert code == 0 and lines[0] == "N=8" and len(lines) == 5
    code, out, _ = run(capsys, "enumerate", "--kind", "primitive", "--N", "64", "--Np", "6", "--count-only")
    assert out == "count=381\n"


def test_enumerate_cap_exit_code(capsys):
    code, _, err = run(capsys, "enumerate", "--kind", "primitive", "--N", "64", "--Np", "12", "--max-patterns", "50")
    assert code == 3
    assert "cap" in err


def test_usage_errors(capsys):
    assert run(capsys, "enumerate", "--kind", "nope", "--N", "8", "--Np", "2")[0] == 1
    assert run(capsys, "enumerate", "--kind", "search-tree", "--N", "8", "--Np", "2")[0] == 1
    assert run(capsys, "de", "--channel", "foo:1", "--pattern-file", "/nonexistent")[0] == 1
    assert run(capsys)[0] == 1


def test_erasure_and_canonicalize(capsys, pfile):
    code, out, _ = run(capsys, "erasure", "--pattern-file", pfile)
    assert code == 0
    assert out.splitlines() == [
        "11101000\t11101000\tsymmetric:1\torder:3",
        "11011000\t11101000\tsymmetric:0\torder:-",
    ]
    code, out, _ = run(capsys, "canonicalize", "--pattern-file", pfile)
    assert out.splitlines() == [
        "11101000\t11101000\tprimitive:1",
        "11011000\t11011000\tprimitive:1",
    ]


def test_de_csv(capsys, tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("N=8\n11101000\n")
    code, out, _ = run(capsys, "de", "--channel", "bec:1/2", "--pattern-file", str(f))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["position", "reliability", "p_ga"]
    assert [float(r["p_ga"]) for r in rows] == [0.5, 0.5, 0.5, 0.375, 0.5, 0.3125, 0.28125, 0.03125]
    code, out, _ = run(capsys, "de", "--channel", "awgn:0.5", "--pattern-file", str(f))
    assert code == 0 and len(out.splitlines()) == 9


def test_threshold_and_optimize(capsys, tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("N=8\n11101000\n")
    code, out, _ = run(capsys, "threshold", "--pattern-file", str(f), "--K", "3", "--eta", "0.01")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["info_set"] == "5 6 7"
    code, out, _ = run(capsys, "optimize", "--objective", "wer", "--sigma2", "0.5", "--K", "20",
                       "--N", "64", "--Np", "8", "--kind", "symmetric")
    rec = json.loads(out)
    assert code == 0
    assert set(rec) == {"pattern", "info_set", "score", "candidates_evaluated"}
    assert rec["candidates_evaluated"] == 605 and len(rec["info_set"]) == 20
    assert Pattern.from_bits(rec["pattern"]).weight == 8
    code, out, _ = run(capsys, "optimize", "--objective", "wer", "--K", "3", "--pattern-file", str(f))
    assert code == 1


def test_simulate_csv_and_manifest(capsys, tmp_path):
    out_path = tmp_path / "sim.csv"
    argv = ["simulate", "--N", "64", "--K", "20", "--Np", "8", "--pattern", "qup",
            "--channel", "awgn:0.8", "--channel", "bec:0.2", "--max-words", "3000",
            "--max-errors", "20", "--seed", "5", "--out", str(out_path)]
    assert run(capsys, *argv)[0] == 0
    text = out_path.read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == "snr_db,sigma2,words,errors,wer,ci_lo,ci_hi"
    assert len(rows) == 2 and float(rows[0]["sigma2"]) == 0.8
    manifest = json.loads((tmp_path / "sim.csv.manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["flags"]["channel"] == ["awgn:0.8", "bec:0.2"]
    assert "numpy" in manifest["versions"]
    # same flags reproduce the file byte for byte, also with more workers
    assert run(capsys, *argv, "--workers", "2")[0] == 0
    assert out_path.read_text() == text


def test_simulate_shorten_and_bitstring(capsys):
    code, out, _ = run(capsys, "simulate", "--N", "8", "--K", "3", "--Np", "2", "--pattern", "shorten",
                       "--channel", "bec:0.5", "--max-words", "2000", "--max-errors", "50")
    assert code == 0
    code, out, _ = run(capsys, "simulate", "--N", "8", "--K", "3", "--Np", "4", "--pattern", "11101000",
                       "--channel", "bec:1/2", "--max-words", "2000", "--max-errors", "50")
    assert code == 0
    code, _, _ = run(capsys, "simulate", "--N", "8", "--K", "3", "--Np", "3", "--pattern", "11101000",
                     "--channel", "bec:0.5")
    assert code == 1


def test_workers_env(capsys, monkeypatch):
    monkeypatch.setenv("POLARPUNCT_WORKERS", "2")
    code, _, err = run(capsys, "simulate", "--N", "8", "--K", "2", "--Np", "2", "--pattern", "qup",
                       "--channel", "awgn:0.5", "--max-words", "100", "--max-errors", "5")
    assert code == 0 and '"workers": 2' in err
    monkeypatch.setenv("POLARPUNCT_WORKERS", "many")
    assert run(capsys, "simulate", "--N", "8", "--K", "2", "--Np", "2", "--pattern", "qup",
               "--channel", "awgn:0.5")[0] == 1


def test_repro_table1(capsys, tmp_path):
    out_path = tmp_path / "t1.json"
    code, out, _ = run(capsys, "repro", "table1", "--out", str(out_path))
    assert code == 0
    assert "overall: PASS" in out
    rep = json.loads(out_path.read_text())
    assert rep["ok"] and sum(c["name"].startswith("p[") for c in rep["checks"]) == 16
    assert sum(c["name"].startswith("I[") for c in rep["checks"]) == 16


def test_repro_table3(capsys):
    code, out, _ = run(capsys, "repro", "table3")
    assert code == 0 and "PASS  N=256 lmax=3: computed=2940" in out
