import json
import subprocess
import sys

import pytest

from modelcomplete.cli import main


def run(*argv):
    return main(list(argv))


def test_decide_exit_codes(tmp_path):
    assert run("decide", "--theory", "dlo++", "--presentation", "dlo01",
               "--sentence", "exists x. (lo<x & x<hi)", "--max-steps", "10000", "--quiet") == 0
    assert run("decide", "--theory", "succ", "--presentation", "succ:shift=1",
               "--sentence", "exists x. S(x)=#0", "--max-steps", "100000", "--quiet") == 1
    assert run("decide", "--theory", "succ", "--presentation", "succ:shift=1",
               "--sentence", "exists x. S(x)=#0", "--max-steps", "10", "--quiet") == 2
    trace = tmp_path / "t.json"
    assert run("decide", "--theory", "succ0", "--presentation", "succ0",
               "--sentence", "exists y. S(y)=#3", "--trace", str(trace), "--quiet") == 0
    d = json.loads(trace.read_text())
    assert set(d) >= {"verdict", "qe", "witness", "queries", "steps"}


@pytest.mark.parametrize("argv", [
    ["decide", "--theory", "nope", "--presentation", "dlo01", "--sentence", "true"],
    ["decide", "--theory", "dlo++", "--presentation", "nope", "--sentence", "true"],
    ["decide", "--theory", "dlo++", "--presentation", "dlo01", "--sentence", "exists x"],
    ["decide", "--theory", "dlo++", "--presentation", "succ", "--sentence", "true"],
    ["decide", "--theory", "dlo++", "--presentation", "dlo01", "--sentence", "true",
     "--max-steps", "0"],
    ["list", "nope"],
    [],
])
def test_errors_exit_3(argv, capsys):
    assert main(argv) == 3


@pytest.mark.parametrize("kind,count", [("theories", 4), ("presentations", 7), ("functionals", 7)])
def test_list(kind, count, tmp_path):
    out = tmp_path / "l.json"
    assert run("list", kind, "--out", str(out), "--quiet") == 0
    entries = [e["id"] for e in json.loads(out.read_text())["entries"]]
    assert len(entries) == count
    if kind == "presentations":
        assert {"succ", "dlo01", "a_n", "shuffle", "shuffle+adj", "pullback"} <= set(entries)
    if kind == "functionals":
        assert {"gamma:succ0", "zero-anchored", "always-diverge", "nonuniform"} <= set(entries)


def test_output_is_deterministic_and_records_seed(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"v{k}.json"
        assert run("verify-qe", "--theory", "adj", "--formula", "exists y. Adj(x, y)",
                   "--samples", "30", "--seed", "4", "--out", str(path), "--quiet") == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 4


def test_sigma1_command(tmp_path):
    path = tmp_path / "s.json"
    code = run("sigma1", "--theory", "succ0", "--alpha", "~exists y. S(y) = x0", "--stage", "60",
               "--eval", "succ0:0", "--witness-bound", "20", "--out", str(path), "--quiet")
    assert code == 0
    d = json.loads(path.read_text())
    assert d["eval"]["result"] is True
    assert d["patterns"][0]["disjuncts"] and "sigma_bits" in d["patterns"][0]["disjuncts"][0]
    assert run("sigma1", "--theory", "succ0", "--alpha", "~exists y. S(y) = x0", "--stage", "60",
               "--eval", "succ0:3", "--quiet") == 2


def test_diagonalize_end_to_end(tmp_path):
    path = tmp_path / "run.json"
    assert run("diagonalize", "--base", "succ:shift=0", "--functionals", "zero-anchored",
               "--stages", "200", "--out", str(path), "--quiet") == 0
    d = json.loads(path.read_text())
    assert {"stages", "p_final", "requirements", "evidence", "injuries"} <= set(d)
    verified = [e for e in d["evidence"] if e["kind"] == "disagreement" and e["verified"]]
    assert len(verified) >= 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modelcomplete", "list", "theories"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "succ0" in proc.stdout and "dlo++" in proc.stdout
