import subprocess
import sys
from pathlib import Path

import pytest

from lltemporal.cli import main

ROOT = Path(__file__).resolve().parents[1]
PHI1 = str(ROOT / "instances" / "phi1.tcsp")
CYCLE = str(ROOT / "instances" / "cycle.tcsp")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_phi1_model(capsys):
    code, out, _ = run(capsys, "solve", PHI1, "--model")
    assert code == 0
    assert out.splitlines() == ["sat", "x1=0", "x2=0", "y1=1", "y2=1", "y3=1"]


def test_solve_classes(capsys):
    _, out, _ = run(capsys, "solve", PHI1, "--classes")
    assert "equal x1 x2" in out and "equal y1 y2 y3" in out


def test_solve_cycle_unsat(capsys):
    code, out, _ = run(capsys, "solve", CYCLE)
    assert code == 1 and out.strip() == "unsat"


def test_solve_dump_graph(capsys, tmp_path):
    dot = tmp_path / "g.dot"
    code, _, _ = run(capsys, "solve", PHI1, "--dump-graph", str(dot))
    assert code == 0
    text = dot.read_text()
    first = text.split("}\n")[0]
    assert first.startswith("digraph iter0")
    for y in ("y1", "y2", "y3"):
        assert f'"{y}" [label="{y} [blocked]"];' in first
    assert '"x2" -> "x1";' in first


def test_solve_dump_to_stdout(capsys):
    code, out, _ = run(capsys, "solve", PHI1, "--dump-graph")
    assert code == 0 and out.startswith("digraph iter0") and out.rstrip().endswith("sat")


def test_check_closure_warns(capsys, tmp_path):
    f = tmp_path / "rmax.tcsp"
    f.write_text("rel Rmax 3 = 0,1,0 | 0,0,1 | 0,1,1 | 0,1,2 | 0,2,1 | 1,2,0 | 1,0,2\ncon Rmax(a, b, c)\n")
    code, _, err = run(capsys, "solve", str(f), "--check-closure")
    # A single R^max constraint is satisfiable; the warning is advisory.
    assert code == 0 and "Rmax is not ll-closed" in err
    code, _, err = run(capsys, "solve", str(f), "--check-closure", "--dual")
    assert code == 0 and "warning" not in err


def test_closure_command(capsys, tmp_path):
    f = tmp_path / "r.tcsp"
    f.write_text("rel Rmin 3 = 1,0,0 | 1,0,1 | 1,1,0 | 2,0,1 | 2,1,0 | 1,0,2 | 1,2,0\n")
    code, out, _ = run(capsys, "closure", str(f))
    assert code == 0
    assert "Rmin arity=3 orders=7 ll=yes dual-ll=no lex=yes" in out


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", PHI1)
    assert code == 0 and "solutions 1" in out and "equal y1 y2 y3" in out
    code, _, err = run(capsys, "oracle", "--limit", "3", PHI1)
    assert code == 2 and "limit" in err


def test_convert_command(capsys, tmp_path):
    code, out, _ = run(capsys, "convert", CYCLE)
    assert code == 0
    assert "rel C1 2 = 1,0" in out and "con C1(y, x)" in out
    f = tmp_path / "conv.tcsp"
    f.write_text(out)
    assert run(capsys, "solve", str(f))[0] == 1


def test_gen_hard_and_pc(capsys, tmp_path):
    f = tmp_path / "hard.tcsp"
    assert run(capsys, "gen-hard", "--girth", "5", "--seed", "2", "--out", str(f))[0] == 0
    assert run(capsys, "solve", str(f))[0] == 1
    code, out, _ = run(capsys, "pc", str(f))
    assert code == 0 and out.strip() == "path-consistent"
    code, out, _ = run(capsys, "pc", CYCLE)
    assert code == 1 and out.strip() == "inconsistency-derived"


def test_parse_errors_exit_two(capsys, tmp_path):
    f = tmp_path / "bad.tcsp"
    f.write_text("con Q(a)\npa a ? b\n")
    code, out, err = run(capsys, "solve", str(f))
    assert code == 2 and out == ""
    assert f"{f}:1:" in err and f"{f}:2:" in err


def test_usage_errors_exit_two(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "solve")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    code, _, err = run(capsys, "solve", "/nonexistent/file.tcsp")
    assert code == 2 and err
    assert run(capsys, "gen-hard", "--girth", "2", "--seed", "1")[0] == 2


def test_pipeline_through_stdin():
    gen = subprocess.run(
        [sys.executable, "-m", "lltemporal", "gen-hard", "--girth", "7", "--seed", "1"],
        capture_output=True, text=True, check=True,
    )
    solved = subprocess.run(
        [sys.executable, "-m", "lltemporal", "solve", "-"],
        input=gen.stdout, capture_output=True, text=True,
    )
    assert solved.returncode == 1 and solved.stdout.strip() == "unsat"
