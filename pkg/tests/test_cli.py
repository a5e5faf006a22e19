import json
import subprocess
import sys

import pytest

from wncoeff.cli import EXIT_CONTRA, EXIT_NOT_FF, EXIT_OK, EXIT_USAGE, main
from wncoeff.groups import FreeProductSpec

C33 = {"factors": [{"cyclic": 3}, {"cyclic": 3}]}
K1 = {"spec": C33, "generators": [[[1, 2], [2, 1]], [[1, 1], [2, 2]]]}
CYC = {"spec": C33, "generators": [[[1, 1], [2, 1]]]}
NFF = {"spec": C33, "generators": [[[1, 1], [2, 1]], [[1, 2], [2, 1]]]}
THREE = {"spec": {"factors": [{"cyclic": 2}, {"cyclic": 2}, {"cyclic": 2}]},
         "generators": [[[3, 1], [1, 1]], [[3, 1], [2, 1], [3, 1], [1, 1], [2, 1]]]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, data in [("k1", K1), ("cyc", CYC), ("nff", NFF), ("three", THREE)]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_check(files, capsys):
    code, out = run(["check", files["k1"]], capsys)
    assert code == EXIT_OK and "factor-free: yes" in out and "cyclic: no" in out
    code, out = run(["check", files["nff"], "--json"], capsys)
    assert code == EXIT_NOT_FF and json.loads(out)["factor_free"] is False
    code, out = run(["check", files["cyc"], "--json"], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["cyclic"] is True and rep["rank"] == 1


def test_sigma(files, capsys):
    lp = files["dir"] / "k1.lp"
    code, out = run(["sigma", files["k1"], "--lp-out", str(lp)], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "sigma_3 = 3"
    assert "inequalities: 88" in out
    assert lp.read_text().startswith("\\")
    code, out = run(["sigma", files["k1"], "--json"], capsys)
    rep = json.loads(out)
    assert rep["sigma_d"] == "3" and rep["primal_value"] == rep["dual_value"] == "-3"
    assert rep["is_sigma"] and rep["upper_bound_ok"] and rep["primal_point"]["xs"] == "3"


def test_sigma_is_deterministic(files, capsys):
    a = run(["sigma", files["k1"], "--json"], capsys)[1]
    b = run(["sigma", files["k1"], "--json"], capsys)[1]
    assert a == b


def test_witness_and_verify(files, capsys):
    w = files["dir"] / "w.json"
    code, out = run(["witness", files["k1"], "--out", str(w)], capsys)
    assert code == EXIT_OK and "connected: True" in out
    data = json.loads(w.read_text())
    assert data["report"]["sigma"] == "3" and FreeProductSpec.from_json(data["spec"]).m == 2
    code, out = run(["verify", files["k1"], str(w)], capsys)
    assert code == EXIT_OK and out.startswith("ok: True")
    # tamper with sigma: the equality check must fail
    data["report"]["sigma"] = "2"
    w.write_text(json.dumps(data))
    code, _ = run(["verify", files["k1"], str(w)], capsys)
    assert code == EXIT_CONTRA


def test_intersect(files, capsys):
    code, out = run(["intersect", files["k1"], files["k1"], "--json"], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["brr"] == 3 and rep["ratio"] == "3"
    assert len(rep["components"]) == 3


def test_oracle(files, capsys):
    code, out = run(["oracle", files["k1"], "--max-secondary", "2"], capsys)
    assert code == EXIT_OK and out.splitlines() == ["cap 1: 0", "cap 2: 3"]


def test_three_factors(files, capsys):
    code, _ = run(["sigma", files["three"]], capsys)
    assert code == EXIT_USAGE
    code, out = run(["check", files["three"], "--json"], capsys)
    assert code == EXIT_OK and json.loads(out)["factor_free"] is True


def test_usage_errors(files, capsys):
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["sigma", str(files["dir"] / "missing.json")]) == EXIT_USAGE
    assert main(["sigma", files["k1"], "--d", "2"]) == EXIT_USAGE
    bad = files["dir"] / "bad.json"
    bad.write_text(json.dumps({"spec": {"factors": [{"order": 2, "mul": [[0, 1], [1, 1]]}]},
                               "generators": []}))
    assert main(["check", str(bad)]) == EXIT_USAGE
    capsys.readouterr()


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "wncoeff", "sigma", files["k1"]],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("sigma_3 = 3")
