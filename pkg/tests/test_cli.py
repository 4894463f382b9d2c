"""CLI behavior: payloads, exit codes, byte-for-byte reproducibility."""

import json
import math

from spiderlab.cli import main
from spiderlab.dp_solver import STUDY_CSV_HEADER
from spiderlab.mc_engine import CSV_HEADER


def run(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out.read_text()


def test_constants_payload(tmp_path):
    code, text = run(tmp_path, "c2.json", ["constants", "--n", "2"])
    assert code == 0
    d = json.loads(text)
    assert d["theta"] == 0.75
    assert d["c_n"] == math.sqrt(3.0)
    assert abs(d["c_star_m1"] - math.sqrt(0.75)) < 1e-15


def test_constants_beyond_closed_forms(capsys):
    assert main(["constants", "--n", "3"]) == 2
    assert "open problem" in capsys.readouterr().err


def test_eval_payload(tmp_path):
    code, text = run(tmp_path, "e.json",
                     ["eval", "--n", "1", "--x", "0.3", "--s", "0.5"])
    assert code == 0
    d = json.loads(text)
    assert d["value"] == (0.3 - 0.5 + 0.5) ** 2 + 0.5
    assert d["in_stopping_set"] is False
    _, text = run(tmp_path, "e2.json",
                  ["eval", "--n", "1", "--x", "0.0", "--s", "0.6"])
    assert json.loads(text)["in_stopping_set"] is True


def test_verify_passes(tmp_path):
    code, text = run(tmp_path, "v.json", ["verify", "--n", "0"])
    assert code == 0
    assert json.loads(text)["passed"] is True


def test_simulate_deterministic(tmp_path):
    argv = ["simulate", "--n", "1", "--paths", "3", "--seed", "9",
            "--rule", "drawdown:a=0.3", "--h", "0.02"]
    code, a = run(tmp_path, "s1.json", argv)
    assert code == 0
    assert len(json.loads(a)["paths"]) == 3
    _, b = run(tmp_path, "s2.json", argv)
    assert a == b


def test_estimate_json_and_csv(tmp_path):
    argv = ["estimate", "--n", "0", "--h", "0.02", "--paths", "2000",
            "--rule", "fixed-time:t=0.5", "--seed", "4"]
    code, text = run(tmp_path, "est.json", argv)
    assert code == 0
    d = json.loads(text)
    assert d["coverage_bound"]["satisfied"] is True
    assert d["estimate"]["n_paths"] == 2000
    code, text = run(tmp_path, "est.csv", argv + ["--format", "csv"])
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER and len(lines) == 2


def test_estimate_censoring_exit_code(capsys):
    # a short hard horizon censors nearly every drawdown path
    code = main(["estimate", "--n", "0", "--h", "0.02", "--paths", "200",
                 "--rule", "drawdown:a=1.0", "--max-steps", "100"])
    assert code == 1
    assert "check failed" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["estimate", "--n", "0", "--rule", "nonsense:a=1"]) == 2
    assert main(["dp", "--n", "1", "--format", "csv"]) == 2
    assert main(["dp", "--n", "9"]) == 2
    capsys.readouterr()


def test_dp_payloads(tmp_path):
    code, text = run(tmp_path, "dp1.json", ["dp", "--n", "1", "--h", "0.1"])
    assert code == 0
    d = json.loads(text)
    assert 0.4 < d["theta_estimate"] < 0.6
    assert d["config"]["n"] == 1 and "X_depth" not in d["config"]
    code, text = run(tmp_path, "dp0.json",
                     ["dp", "--n", "0", "--h", "0.1", "--x-depth", "1.0"])
    assert code == 0
    assert json.loads(text)["config"]["X_depth"] == 1.0


def test_study_csv(tmp_path):
    code, text = run(tmp_path, "st.csv",
                     ["study", "--n", "0", "--h-ladder", "0.08,0.04,0.02",
                      "--format", "csv"])
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == STUDY_CSV_HEADER and len(lines) == 4


def test_threads_flag_does_not_change_bytes(tmp_path):
    argv = ["estimate", "--n", "1", "--h", "0.02", "--paths", "2000",
            "--rule", "first-entry", "--seed", "12"]
    _, a = run(tmp_path, "t1.json", argv + ["--threads", "1"])
    _, b = run(tmp_path, "t4.json", argv + ["--threads", "4"])
    assert a == b
    argv = ["dp", "--n", "2", "--h", "0.1"]
    _, a = run(tmp_path, "d1.json", argv + ["--threads", "1"])
    _, b = run(tmp_path, "d4.json", argv + ["--threads", "4"])
    assert a == b


def test_out_keeps_stdout_clean(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert main(["constants", "--n", "0", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith("{")
