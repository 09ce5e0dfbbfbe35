import json
import shutil
import subprocess
from pathlib import Path

import pytest

from hogsos.cli import main

DEMO = Path(__file__).resolve().parents[1] / "demo"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys):
    code, out, _ = run(capsys, "check", DEMO / "f.mutcl")
    assert code == 0
    data = json.loads(out)
    assert data["terms"] == [{"term": "(I bool)", "type": "(fun bool bool)"}]
    assert data["command"][:2] == ["hogsos", "check"]
    assert "elapsed_seconds" not in data


def test_trace_text(capsys):
    code, out, _ = run(capsys, "trace", DEMO / "s_redex.mutcl")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(None, 1)[1].startswith("(app (app (app (S bool bool bool)")
    assert lines[1].split(None, 1)[1].startswith("(app (app (S1 bool bool bool (K bool bool))")
    assert lines[-1] == "final: inl (value)"


def test_trace_fpc(capsys):
    code, out, _ = run(capsys, "trace", DEMO / "omega.fpc")
    assert code == 0
    assert out.strip().splitlines()[-1] == "may-terminate: no_certified"


def test_logrel_holds_and_fails(capsys, tmp_path):
    code, out, _ = run(capsys, "logrel", DEMO / "eta.mutcl", "--index", 3)
    assert code == 0 and json.loads(out)["verdict"] == "holds"
    a = tmp_path / "a.mutcl"
    b = tmp_path / "b.mutcl"
    a.write_text("(inl unit unit (I void))")
    b.write_text("(inr unit unit (I void))")
    code, out, _ = run(capsys, "logrel", a, b, "--index", 2)
    data = json.loads(out)
    assert code == 1 and data["verdict"] == "fails"
    assert data["witness"]["clause"] == "V"


def test_logrel_unknown_exits_one(capsys, tmp_path):
    a = tmp_path / "a.mutcl"
    a.write_text("(pair-of (inl unit unit (I void)) (app (I bool) (app (I bool) (inl unit unit (I void)))))")
    code, out, _ = run(capsys, "logrel", a, "--fuel", 1)
    assert code == 1 and json.loads(out)["verdict"] == "unknown"


def test_ctx(capsys):
    code, out, _ = run(capsys, "ctx", DEMO / "eta.mutcl", "--max-size", 3)
    assert code == 0 and json.loads(out)["verdict"] == "no_counterexample"


def test_fpc_commands(capsys):
    code, out, _ = run(capsys, "fpc", "may", DEMO / "choice.fpc")
    data = json.loads(out)
    assert code == 0 and data["status"] == "yes" and data["path"]
    code, out, _ = run(capsys, "fpc", "ctx", DEMO / "eta_vs_omega.fpc", "--max-size", 3)
    data = json.loads(out)
    assert code == 1 and data["verdict"] == "counterexample"
    assert data["context"] == "(hole (fun bool bool))"
    code, out, _ = run(capsys, "fpc", "rel", DEMO / "eta_vs_omega.fpc")
    assert code == 1 and json.loads(out)["verdict"] == "fails"
    code, out, _ = run(capsys, "fpc", "check", DEMO / "omega.fpc")
    assert code == 0 and json.loads(out)["terms"][0]["type"] == "bool"


def test_kernel(capsys):
    code, out, _ = run(capsys, "kernel", "henceforth", DEMO / "three_state.json")
    data = json.loads(out)
    assert code == 0
    assert data["nu"] == 2 and data["chain_sizes"] == [10, 7, 6]
    assert data["oracle_agrees"] and data["logical_relation"]


def test_json_is_deterministic(capsys, tmp_path):
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    run(capsys, "kernel", "henceforth", DEMO / "three_state.json", "--json", p1)
    run(capsys, "kernel", "henceforth", DEMO / "three_state.json", "--json", p2)
    a, b = p1.read_bytes(), p2.read_bytes()
    assert json.loads(a)["command"][-1] == str(p1)
    assert a.replace(str(p1).encode(), b"X") == b.replace(str(p2).encode(), b"X")
    run(capsys, "logrel", DEMO / "eta.mutcl", "--index", 2, "--json", p1)
    first = p1.read_bytes()
    run(capsys, "logrel", DEMO / "eta.mutcl", "--index", 2, "--json", p1)
    assert p1.read_bytes() == first


def test_timing_flag(capsys):
    code, out, _ = run(capsys, "check", DEMO / "f.mutcl", "--timing")
    assert "elapsed_seconds" in json.loads(out)


def test_suite_rho_vs_gamma(capsys):
    code, out, _ = run(capsys, "suite", "rho-vs-gamma", "--max-size", 6)
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["mismatches"] == 0


@pytest.mark.parametrize("argv", [
    ["check", "/nonexistent/file.mutcl"],
    ["frobnicate"],
    ["suite", "rho-vs-gamma", "--ctx-size", "3"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.mutcl"
    bad.write_text("(app (I bool) (I unit))")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "type mismatch" in err
    bad.write_text("(app I)")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and err.startswith("error:")
    model = tmp_path / "m.json"
    model.write_text('{"sorts": {"b": {"kind": "base"}}, "states": {"b": ["u"]}, "behaviors": {"u": [{"silent": "v"}]}}')
    code, _, err = run(capsys, "kernel", "henceforth", model)
    assert code == 2


def test_console_script():
    exe = shutil.which("hogsos")
    if exe is None:
        pytest.skip("console script not installed")
    res = subprocess.run([exe, "check", str(DEMO / "f.mutcl")], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["terms"][0]["term"] == "(I bool)"
