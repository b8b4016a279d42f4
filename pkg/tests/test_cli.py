import json
import subprocess
import sys

import pytest

from hybridspdc import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_pump_solve_zero_coupling(capsys):
    code, out = run(["pump-solve", "--eta", "0"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == 1
    assert rep["config"]["eta"] == 0
    assert abs(rep["total_output_norm"] - 1) < 1e-12
    for blk in rep["f_blocks"]:
        assert blk["f"] == [1.0] + [0.0] * blk["l"]


def test_invalid_config_exit_code(capsys):
    assert cli.main(["gmatrix", "--alpha", "9"]) == 1
    assert cli.main(["gmatrix", "--eta", "0.6"]) == 1
    assert cli.main(["gmatrix", "--m-max", "0"]) == 1
    assert "config error" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "eta": 0.05, "m_max": 3}))
    code, out = run(["gmatrix", "--config", str(cfg), "--eta", "0.02"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["config"]["alpha"] == 1.0 and rep["config"]["eta"] == 0.02 and rep["config"]["m_max"] == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"alpha": 1.0, "colour": "red"}))
    assert cli.main(["gmatrix", "--config", str(bad)]) == 1


def test_gmatrix_report_lists_flags(capsys):
    _, out = run(["gmatrix", "--alpha", "2", "--eta", "0.02"], capsys)
    rep = json.loads(out)
    flagged = [r for r in rep["comparison"] if r["flagged"]]
    assert {(r["n"], r["m"]) for r in flagged} == {(1, 2), (2, 0), (2, 1), (2, 2)}
    assert all(len(r["numeric"]) == 2 and len(r["series"]) == 2 for r in flagged)


def test_sweep_deterministic_and_slope(tmp_path):
    path = tmp_path / "sweep.json"
    runs = []
    for _ in range(2):
        assert cli.main(["sweep", "--out", str(path)]) == 0
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]
    rep = json.loads(runs[0])
    assert 1.9 <= rep["slope_P2"] <= 2.1


def test_sweep_csv(capsys):
    code, out = run(["sweep", "--format", "csv", "--sweep-eta", "0.01,0.02,0.04"], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0].startswith("eta,alpha,P2,P3")
    assert len(lines) == 4


def test_output_state_and_heralds(capsys):
    _, out = run(["output-state", "--alpha", "3", "--eta", "0.01"], capsys)
    rep = json.loads(out)
    assert rep["negativity_12_vs_p"] > 0 and rep["hybrid_witness"] > 0
    assert rep["fidelity_tmsv"] > 0.999
    _, out = run(["herald2", "--alpha", "3", "--eta", "0.01"], capsys)
    assert json.loads(out)["two_source"]["fidelities"]["Psi-"] > 0.99
    _, out = run(["herald3", "--alpha", "3", "--eta", "0.01"], capsys)
    pats = json.loads(out)["patterns"]
    assert pats[0]["click_pattern"] == {"p2": "click", "p3": "no-click"}


@pytest.mark.slow
def test_verify_default_exit_zero():
    proc = subprocess.run([sys.executable, "-m", "hybridspdc", "verify"], capture_output=True, text=True)
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    assert rep["passed"]
    assert {f["name"] for f in rep["suites"]["identities"]["flagged"]} == {"dft_varphi_-phi", "dft_varphi_-2phi"}


def test_verify_breach_exit_code(monkeypatch, capsys):
    from hybridspdc import verification

    monkeypatch.setattr(verification, "run_all", lambda *a, **k: {"passed": False, "suites": {}})
    assert cli.main(["verify"]) == 2
