import json
import subprocess
import sys
from pathlib import Path

import pytest

from curvlinf.algebroid import check_algebroid, free_tangent_model
from curvlinf.cli import run
from curvlinf.samples import base_cdgas, make_rng, random_split_algebroid
from curvlinf.serialize import dumps, load, save

DATA = Path(__file__).parent / "data"


def _ok(argv):
    code, out, err = run(argv)
    assert code == 0, err
    return json.loads(out)


def test_validate_abelian():
    rep = _ok(["validate", str(DATA / "abelian.json")])
    assert rep["ok"] is True and "failure" not in rep


def test_validate_curved_triple():
    assert _ok(["validate", str(DATA / "triple.json")])["ok"]


def test_validate_reports_failing_relation():
    code, out, err = run(["validate", str(DATA / "triple_flipped.json")])
    assert code == 1
    rep = json.loads(out)
    assert rep["failure"]["relation"] == "arity 1"
    assert rep["failure"]["tuple"] == ["x"]
    assert "arity 1" in err


def test_bad_input_exit_code(tmp_path):
    m = json.loads((DATA / "triple.json").read_text())
    m["payload"]["ells"]["1"][0][1]["y"] = "1/0"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(m))
    code, out, err = run(["validate", str(p)])
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "input"
    assert "/payload/ells/1/0/1/y" in err


def test_jobs_variable_checked(monkeypatch):
    monkeypatch.setenv("CURVLINF_JOBS", "0")
    assert run(["validate", str(DATA / "abelian.json")])[0] == 2
    monkeypatch.setenv("CURVLINF_JOBS", "4")
    assert run(["validate", str(DATA / "abelian.json")])[0] == 0


def test_selftest_operad():
    rep = _ok(["selftest-operad"])
    assert rep["details"]["descends"] and all(rep["details"]["printed"].values())


def test_ce_command_matches_library():
    rep = _ok(["ce", str(DATA / "dual_tangent.json"), "--arity-bound", "1"])
    assert rep["details"]["dim"] == 4 and rep["details"]["d_squared_zero"]
    assert rep["result"]["kind"] == "cdga"


def test_tangent_command(tmp_path):
    out = tmp_path / "t.json"
    _ok(["tangent", str(DATA / "exterior.json"), "--weight", "-1", "-o", str(out)])
    L = load(out)
    assert L == free_tangent_model(base_cdgas()["ext"], weight=-1)
    assert check_algebroid(L).ok


def test_rees_unrees_roundtrip(tmp_path):
    L = random_split_algebroid(make_rng(3))
    src, mid, back = tmp_path / "L.json", tmp_path / "R.json", tmp_path / "L2.json"
    save(L, src)
    _ok(["rees", str(src), "-o", str(mid)])
    _ok(["unrees", str(mid), "-o", str(back)])
    assert back.read_text() == src.read_text()


def test_curv_uncurv_roundtrip(tmp_path):
    L = random_split_algebroid(make_rng(5))
    src, mid, back = tmp_path / "L.json", tmp_path / "g.json", tmp_path / "L2.json"
    save(L, src)
    _ok(["curv", str(src), "-o", str(mid)])
    assert _ok(["image-check", str(mid)])["ok"]
    _ok(["uncurv", str(mid), "-o", str(back)])
    assert load(back) == L


def test_deterministic_output():
    argv = ["ce", str(DATA / "dual_tangent.json"), "--arity-bound", "2"]
    assert run(argv) == run(argv)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "curvlinf", "validate",
                        str(DATA / "triple_flipped.json")], capture_output=True, text=True)
    assert p.returncode == 1
    assert json.loads(p.stdout)["failure"]["relation"] == "arity 1"
