import json
import subprocess
import sys

import pytest

from pentagram.cli import main

EXE = [sys.executable, "-m", "pentagram"]


def run(*args, cwd=None):
    return subprocess.run([*EXE, *args], capture_output=True, text=True, cwd=cwd)


def test_verify_miquel_exit_zero(tmp_path):
    out = tmp_path / "r.json"
    proc = run("verify", "--theorem", "miquel", "--mode", "exact", "--trials", "30", "--seed", "7",
               "--json", str(out))
    assert proc.returncode == 0, proc.stderr
    assert "PASS 30" in proc.stdout
    data = json.loads(out.read_text())
    assert data["counts"]["PASS"] == 30 and data["spec"]["seed"] == 7


@pytest.mark.parametrize("args", [
    ["verify", "--theorem", "five-circles-chain", "--mode", "exact", "--trials", "2"],
    ["verify", "--theorem", "pythagoras"],
    ["verify", "--theorem", "miquel", "--trials", "0"],
    ["verify", "--theorem", "miquel", "--tolerance", "0.5"],
    ["verify", "--theorem", "miquel", "--mode", "exact", "--bits", "80"],
    ["render", "--input", "missing.json"],
    [],
])
def test_usage_errors_exit_three(args, tmp_path):
    assert run(*args, cwd=tmp_path).returncode == 3


def test_verify_failure_and_degenerate_codes():
    assert run("verify", "--theorem", "miquel", "--trials", "3", "--perturb", "1/1000").returncode == 1
    assert run("verify", "--theorem", "takada", "--trials", "3", "--generator", "random").returncode == 2


def test_verify_input_regular(tmp_path):
    doc = tmp_path / "regular_pentagon.json"
    assert run("sample", "--generator", "regular", "--out", str(doc)).returncode == 0
    proc = run("verify", "--theorem", "eleven", "--input", str(doc))
    assert proc.returncode == 0
    x, y = proc.stdout.split("X = (")[1].rstrip(")\n").split(", ")
    assert abs(float(x)) < 1e-12 and abs(float(y)) < 1e-12


def test_verify_input_star_document(tmp_path):
    doc = tmp_path / "star.json"
    run("sample", "--generator", "star", "--seed", "3", "--derive", "--out", str(doc))
    assert run("verify", "--theorem", "collinear-b", "--input", str(doc)).returncode == 0
    assert run("verify", "--theorem", "collinear-a", "--input", str(doc)).returncode == 2


def test_solve_and_chain(tmp_path):
    out = tmp_path / "t6.json"
    proc = run("solve", "--count", "3", "--seed", "11", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    data = json.loads(out.read_text())
    assert len(data["configurations"]) == 3
    assert all(c["solve_report"]["final_residual"] < 1e-12 for c in data["configurations"])
    proc = run("verify", "--theorem", "five-circles-chain", "--input", str(out))
    assert proc.returncode == 0 and proc.stdout.count("float256: PASS") == 3


def test_solve_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("solve", "--count", "1", "--seed", "11", "--out", str(a))
    run("solve", "--count", "1", "--seed", "11", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_solve_starved(tmp_path):
    out = tmp_path / "s.json"
    proc = run("solve", "--count", "1", "--max-iter", "1", "--out", str(out))
    assert proc.returncode == 1
    assert "NoConvergence" in proc.stderr
    data = json.loads(out.read_text())
    assert data["configurations"] == [] and data["failures"][0]["error"] == "NoConvergence"


def test_render(tmp_path):
    doc, svg = tmp_path / "r.json", tmp_path / "r.svg"
    run("sample", "--generator", "regular", "--out", str(doc))
    assert run("render", "--input", str(doc), "--show", "A,B,C,circles", "--out", str(svg)).returncode == 0
    first = svg.read_bytes()
    run("render", "--input", str(doc), "--show", "A,B,C,circles", "--out", str(svg))
    assert svg.read_bytes() == first and first.startswith(b"<?xml")
    rand = tmp_path / "rand.json"
    run("sample", "--generator", "random", "--seed", "2", "--out", str(rand))
    proc = run("render", "--input", str(rand), "--show", "A,O,J", "--out", str(svg))
    assert proc.returncode == 2 and svg.exists()
    assert run("render", "--input", str(rand), "--show", "A,zz").returncode == 3


def test_normalize_canonicalizes(tmp_path):
    doc = tmp_path / "d.json"
    doc.write_text(json.dumps({
        "schema_version": "1", "mode": "exact",
        "points": [["3/6", "0"], ["4", "0"], ["5", "3"], ["2", "5"], ["-2/2", "3"]],
    }))
    out = tmp_path / "n.json"
    assert run("normalize", "--input", str(doc), "--out", str(out)).returncode == 0
    assert json.loads(out.read_text())["points"][0] == ["1/2", "0"]
    doc.write_text(doc.read_text().replace('"4"', '"4/0"'))
    assert run("normalize", "--input", str(doc)).returncode == 3


def test_in_process_main(tmp_path, capsys):
    assert main(["verify", "--theorem", "dual", "--trials", "2", "--workers", "1"]) == 0
    assert "PASS 2" in capsys.readouterr().out
