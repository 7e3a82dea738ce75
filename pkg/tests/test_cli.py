import csv
import io
import json
import math

import numpy as np
import pytest

import qsl.cli as cli
from conftest import random_hermitian, random_state
from qsl.cli import run_cli
from qsl.core import QuantumState
from qsl.files import dump_system_file, load_system_file
from qsl.verify import VerificationReport


def run(argv):
    buf = io.StringIO()
    code = run_cli(argv, out=buf)
    return code, buf.getvalue()


@pytest.fixture
def system_file(tmp_path):
    gen = np.random.default_rng(5)
    path = tmp_path / "sys.json"
    dump_system_file(path, random_hermitian(gen, 3), random_state(gen, 3).amplitudes)
    return path


def test_bounds_example():
    code, text = run(["bounds", "--theta", "1.5707963", "--mean", "1", "--spread", "1",
                      "--emin", "0", "--emax", "2"])
    assert code == 0
    assert "glm_beta = 1.5708" in text and "mean_min_e = 1.5708" in text


def test_bounds_theta_out_of_range(capsys):
    code, _ = run(["bounds", "--theta", "4.0", "--mean", "1", "--spread", "1",
                   "--emin", "0", "--emax", "2"])
    assert code == 2
    assert "theta must lie in [0, pi/2]" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["bounds", "--theta", "1.0"],
    ["bounds", "--theta", "1.0", "--mean", "5", "--spread", "1", "--emin", "0", "--emax", "2"],
    ["nonsense"],
    ["curve", "--points", "1", "--out", "x.csv"],
    ["case", "hadamard", "--epsilon", "1", "--delta", "0.5"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == 2


def test_file_errors(tmp_path):
    missing = str(tmp_path / "none.json")
    assert run(["bounds", "--theta", "1", "--system", missing])[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"hamiltonian": [[[1, 0], [0, 0]]], "state": [[1, 0]]}')
    assert run(["bounds", "--theta", "1", "--system", str(bad)])[0] == 3
    bad.write_text("not json")
    assert run(["evolve", "--system", str(bad), "--t-max", "1", "--samples", "3",
                "--out", str(tmp_path / "o.csv")])[0] == 3
    assert run(["curve", "--points", "5", "--out", str(tmp_path / "no" / "c.csv")])[0] == 3


def test_system_file_round_trip(system_file):
    h, psi = load_system_file(system_file)
    assert isinstance(psi, QuantumState)
    assert np.allclose(h.matrix, h.matrix.conj().T)
    code, text = run(["bounds", "--theta", "0.7", "--system", str(system_file), "--format", "json"])
    assert code == 0
    rec = json.loads(text)
    assert rec["tightest_value"] == max(rec[k] for k in ("glm_beta", "mean_min_e", "max_mean_e",
                                                         "max_min", "delta_e_variant", "bc"))


def test_bounds_units_and_csv():
    base = ["bounds", "--theta", "1.0", "--mean", "1", "--spread", "0.5", "--emin", "0",
            "--emax", "2"]
    rec = json.loads(run(base + ["--format", "json"])[1])
    rec_h = json.loads(run(base + ["--format", "json", "--units", "h"])[1])
    assert rec_h["glm_beta"] == pytest.approx(rec["glm_beta"] / (2 * math.pi))
    rows = list(csv.reader(io.StringIO(run(base + ["--format", "csv"])[1])))
    assert rows[0][:2] == ["theta", "glm_beta"] and len(rows) == 2


def test_curve(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["curve", "--points", "101", "--out", str(a)])[0] == 0
    assert run(["curve", "--points", "101", "--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["cos_theta", "theta", "glm_beta_dimensionless", "mean_e_dimensionless",
                       "bc_dimensionless", "bc_poly"]
    body = [[float(x) for x in r] for r in rows[1:]]
    assert len(body) == 101
    assert body[0][0] == 0.0 and body[0][4] == pytest.approx(math.pi / 2, abs=1e-3)
    assert body[0][5] == pytest.approx(1.57, abs=1e-12)
    assert body[-1][0] == 1.0 and all(v == 0 for v in body[-1][1:])


def test_evolve(system_file, tmp_path):
    out = tmp_path / "ev.csv"
    assert run(["evolve", "--system", str(system_file), "--t-max", "5", "--samples", "50",
                "--out", str(out)])[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 51
    assert float(rows[0]["s_real"]) == pytest.approx(1.0, abs=1e-12)
    assert rows[0]["ratio_glm_beta"] == "inf"
    for r in rows[1:]:
        t = float(r["time"])
        s = complex(float(r["s_real"]), float(r["s_imag"]))
        assert abs(s) <= 1 + 1e-12
        assert float(r["theta"]) == pytest.approx(math.acos(min(1, abs(s))), abs=1e-9)
        for key in r:
            if key.startswith("ratio_") and r[key] != "inf":
                assert float(r[key]) >= 1 - 1e-9 * (1 + t)
    out_h = tmp_path / "ev_h.csv"
    run(["evolve", "--system", str(system_file), "--t-max", "5", "--samples", "50",
         "--out", str(out_h), "--units", "h"])
    last_h = list(csv.DictReader(out_h.open()))[-1]
    assert float(last_h["time"]) == pytest.approx(5 / (2 * math.pi))
    assert last_h["ratio_bc"] == rows[-1]["ratio_bc"]


def test_case_commands():
    code, text = run(["case", "hadamard", "--epsilon", "0.5", "--delta", "1", "--endpoint",
                      "--format", "json"])
    rec = json.loads(text)
    assert code == 0 and rec["spread_time_product"] == pytest.approx(0.8154835185180084)
    assert rec["endpoint_ratio_printed_to_recomputed"] == pytest.approx(2.0)
    rec = json.loads(run(["case", "cnot", "--epsilon", "1", "--variant", "B",
                          "--format", "json"])[1])
    assert rec["theta"] == pytest.approx(math.pi / 3)
    rec = json.loads(run(["case", "cnot", "--epsilon", "1", "--delta", "500",
                          "--format", "json"])[1])
    assert rec["gate_fidelity_z_control"] > 0.999
    code, text = run(["case", "grover", "--n", "1000000", "--units", "h", "--format", "json"])
    rec = json.loads(text)
    assert code == 0 and rec["total_min_time"] == pytest.approx(0.25)


def test_verify_empty_and_default(monkeypatch):
    monkeypatch.setenv("QSL_THREADS", "2")
    code, text = run(["verify", "--trials", "0"])
    rep = json.loads(text)
    assert code == 0 and rep["trials"] == 0 and rep["violations"] == []
    code, text = run(["verify", "--trials", "100", "--dim-max", "8", "--seed", "42"])
    rep = json.loads(text)
    assert code == 0 and rep["violations"] == [] and "elapsed" not in rep
    assert rep["dimensions_tested"] == list(range(2, 9))
    assert rep["worst_saturation"] >= 1 - 1e-9


def test_verify_thread_independent(monkeypatch):
    argv = ["verify", "--trials", "30", "--seed", "3", "--saturating", "3"]
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("QSL_THREADS", threads)
        outs.append(run(argv)[1])
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["saturation_max_deviation"] < 1e-9


def test_verify_timing_and_out(tmp_path):
    out = tmp_path / "rep.json"
    code, text = run(["verify", "--trials", "2", "--timing", "--out", str(out)])
    assert code == 0 and text == ""
    assert "elapsed" in json.loads(out.read_text())


def test_verify_violation_exit_code(monkeypatch):
    fake = VerificationReport(
        trials=1, dimensions_tested=[2], samples_per_trial=1,
        violations=[{"seed": 0, "trial": 0, "dimension": 2, "time": 0.1, "theta": 1.0,
                     "bound_label": "bc", "deficit": 0.5}],
        worst_saturation=0.5, worst_saturation_by_bound={}, saturating_trials=0,
        saturation_max_deviation=0.0, elapsed=0.0,
    )
    monkeypatch.setattr(cli, "verify_random", lambda cfg, threads=None: fake)
    assert run(["verify", "--trials", "1"])[0] == 1


def test_main_entry(monkeypatch):
    monkeypatch.setattr("sys.argv", ["qsl", "case", "grover", "--n", "4"])
    with pytest.raises(SystemExit) as exc:
        cli.main()
    assert exc.value.code == 0
