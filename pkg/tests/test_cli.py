import json

import pytest

from astdkit.cli import main
from astdkit.corpus import path

L1 = str(path("trains_L1"))
L2 = str(path("trains_L2"))
MUT = str(path("trains_L2_mut_mal"))


def test_check_ok(capsys):
    assert main(["check", L1]) == 0
    assert "well-formed" in capsys.readouterr().out


def test_check_missing_file():
    assert main(["check", "no/such/file.astd"]) == 2


def test_check_parse_error(tmp_path):
    bad = tmp_path / "bad.astd"
    bad.write_text("SPEC broken LEVEL x")
    assert main(["check", str(bad)]) == 2


def test_check_static_error(tmp_path, capsys):
    bad = tmp_path / "dup.astd"
    bad.write_text(
        "SPEC dup LEVEL 1\nSORTS\n  T = { a }\nVARIABLES\n  v : T +-> T\n"
        "  v : T +-> T\nASTD\n  ELEM\n"
    )
    assert main(["check", str(bad)]) == 1
    assert "duplicate" in capsys.readouterr().err


def test_explore_clean(capsys):
    assert main(["explore", L1, "--invariants", "--theorems", "--calling"]) == 0
    out = capsys.readouterr().out
    assert "65 states" in out and "0 violation(s)" in out


def test_explore_mutant_fails(capsys):
    assert main(["explore", MUT, "--invariants"]) == 1
    assert "violation" in capsys.readouterr().out


def test_explore_json_export(tmp_path, capsys):
    out = tmp_path / "lts.json"
    assert main(["explore", L1, "--json", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert blob["spec"] == "trains_L1"
    assert len(blob["states"]) == 65


def test_explore_truncated(capsys):
    assert main(["explore", L1, "--max-states", "1"]) == 0
    assert "truncated" in capsys.readouterr().out


def test_refine_preservation_pass(capsys):
    code = main(["refine", L1, L2, "--mode", "preservation", "--new", "compute_l"])
    assert code == 0
    assert "PASS" in capsys.readouterr().out


def test_refine_inclusion_fail_without_hiding(capsys):
    code = main(["refine", L1, L2, "--mode", "inclusion"])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "counterexample" in out


def test_refine_projection(capsys, docs):
    l3 = str(path("trains_L3"))
    code = main(["refine", L2, l3, "--mode", "projection:t1",
                 "--relabel", "compute=compute_l"])
    assert code == 0
    assert "PASS" in capsys.readouterr().out


def test_refine_bad_mode():
    assert main(["refine", L1, L2, "--mode", "sideways"]) == 2


def test_relcheck(capsys):
    l3 = str(path("trains_L3"))
    assert main(["relcheck", l3]) == 0
    out = capsys.readouterr().out
    assert "commute compute_l(t1) ; compute_l(t2): PASS" in out
    assert "seq-equivalence: PASS" in out


def test_translate_state(tmp_path, capsys):
    out = tmp_path / "l1.mch"
    assert main(["translate", L1, "-o", str(out)]) == 0
    assert out.read_text().startswith("MACHINE trains_L1")


def test_translate_enabled(tmp_path, capsys):
    out = tmp_path / "l1.bench.mch"
    assert main(["translate", L1, "--backend", "enabled", "-o", str(out)]) == 0
    assert "MACHINE trains_L1_bench" in out.read_text()


def test_translate_missing_file():
    assert main(["translate", "missing.astd"]) == 2


def test_usage_error():
    assert main(["frobnicate"]) == 2


def test_simulate_repl(monkeypatch, capsys):
    inputs = iter(["0", "0", "s", "u", "q"])
    monkeypatch.setattr("builtins.input", lambda *a: next(inputs))
    assert main(["simulate", L1]) == 0
    out = capsys.readouterr().out
    assert "enabled events:" in out
    assert "0: start(t1)" in out
    assert "fired start(t1)" in out       # successor chooser then fire
    assert "position = { t1 |-> p1 }" in out
