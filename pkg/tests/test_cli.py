import csv
import io
import json
import subprocess
import sys

import pytest

import entlab


def run_cli(*args, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "entlab.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == expect, proc.stderr or proc.stdout
    return proc


def test_measure_leak_report_schema():
    proc = run_cli(
        "measure",
        "--name",
        "leak",
        "--channel",
        '{"family": "dephasing", "epsilon": 0.2}',
        "--qubits",
        "0",
    )
    report = json.loads(proc.stdout)
    assert sorted(report) == ["config", "diagnostics", "results", "version"]
    assert report["version"] == entlab.__version__
    assert report["config"]["command"] == "measure"
    entry = report["results"][0]
    assert entry["measure"] == "leak"
    assert abs(entry["value"] - 0.468996) < 1e-6


def test_measure_assisted_on_bell():
    proc = run_cli(
        "measure",
        "--name",
        "assisted",
        "--state",
        '{"family": "bell"}',
        "--qubits",
        "0,1",
        "--restarts",
        "2",
        "--sweeps",
        "8",
        "--seed",
        "1",
    )
    report = json.loads(proc.stdout)
    entry = report["results"][0]
    assert abs(entry["value"] - 2.0) < 1e-9
    assert "floor" in entry["diagnostics"]


def test_relation_subcommand():
    proc = run_cli(
        "relation",
        "--id",
        "1",
        "--level",
        "0.5",
        "--state",
        '{"family": "bell"}',
        "--channel",
        '{"family": "correlated_flip", "epsilon": 0.2, "pauli": "ZZ"}',
        "--qubits",
        "0,1",
    )
    report = json.loads(proc.stdout)
    entry = report["results"][0]
    assert entry["verdict"] == "satisfied"
    assert abs(entry["k_hat_per_leak"] - 0.5) < 1e-9


def test_censorship_subcommand_frozen_values():
    proc = run_cli(
        "censorship",
        "--family",
        "ghz",
        "--n-min",
        "3",
        "--n-max",
        "4",
        "--truncate",
        "2",
        "--include-full",
        "never",
    )
    report = json.loads(proc.stdout)
    values = [r["value"] for r in report["results"] if r["measure"] == "family-total-defect"]
    assert abs(values[0] - 3.0) < 1e-6
    assert abs(values[1] - 6.0) < 1e-6
    growth = [r for r in report["results"] if r["measure"] == "growth-exponent"][0]
    assert abs(growth["value"] - 2.40942083965) < 1e-6


def test_sync_subcommand():
    proc = run_cli("sync", "--p1", "1e-3", "--p2", "2e-5", "--n", "1000", "--threshold", "10")
    report = json.loads(proc.stdout)
    by_name = {r["measure"]: r for r in report["results"]}
    burst = by_name["mixture-burst-probability"]
    assert abs(burst["value"] - 0.05) < 1e-12
    assert abs(burst["diagnostics"]["in_burst_rate"] - 0.02) < 1e-12
    assert 0.045 < by_name["correlated-tail"]["value"] < 0.05
    assert by_name["independent-tail"]["value"] < 1e-6
    assert abs(by_name["triple-moment-ratio"]["value"] - 400.0) < 1e-6


def test_sync_mean_weight_from_channel():
    proc = run_cli(
        "sync",
        "--channel",
        '{"family": "depolarizing", "p": 0.3}',
    )
    report = json.loads(proc.stdout)
    entry = [r for r in report["results"] if r["measure"] == "mean-error-weight"][0]
    assert abs(entry["value"] - 0.3) < 1e-9


def test_qec_demo_subcommand():
    proc = run_cli("qec-demo", "--epsilon", "0.5", "--logical", "plus")
    report = json.loads(proc.stdout)
    by_name = {r["measure"]: r for r in report["results"]}
    assert abs(by_name["decoded-fidelity"]["value"] - 0.5625) < 1e-9


def test_stochastic_spec_requires_seed():
    proc = run_cli(
        "measure",
        "--name",
        "leak",
        "--state",
        '{"family": "random_circuit", "n": 2, "depth": 3}',
        "--channel",
        '{"family": "dephasing", "epsilon": 0.2}',
        "--qubits",
        "0",
        expect=2,
    )
    assert "seed" in proc.stderr.lower()


def test_unknown_evaluation_kind_is_config_error(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"evaluations": [{"kind": "mystery"}]}))
    proc = run_cli("run", "--config", str(config), expect=2)
    assert "kind" in proc.stderr


def test_csv_format():
    proc = run_cli(
        "measure",
        "--name",
        "mutual-information",
        "--state",
        '{"family": "ghz", "n": 3}',
        "--qubits",
        "0,2",
        "--format",
        "csv",
    )
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert rows
    assert "index" in rows[0]
    assert abs(float(rows[0]["value"]) - 1.0) < 1e-9


RUN_CONFIG = {
    "seed": 99,
    "evaluations": [
        {
            "kind": "measure",
            "name": "excess-leak",
            "channel": {"family": "correlated_flip", "epsilon": 0.2, "pauli": "ZZ"},
            "qubits": [0, 1],
        },
        {
            "kind": "relation",
            "id": 2,
            "level": 0.5,
            "state": {"family": "bell"},
            "channel": {"family": "correlated_flip", "epsilon": 0.2, "pauli": "ZZ"},
            "qubits": [0, 1],
            "restarts": 2,
            "sweeps": 8,
        },
        {
            "kind": "measure",
            "name": "leak",
            "channel": {"family": "random_unitary", "n": 2, "epsilon": 0.4},
            "qubits": [0],
        },
        {"kind": "sync", "p1": 1e-3, "p2": 2e-5, "n": 1000, "threshold": 10},
        {"kind": "qec_demo", "epsilon": 0.5, "logical": "zero"},
    ],
}


def test_run_is_deterministic(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps(RUN_CONFIG))
    first = run_cli("run", "--config", str(config), "--out", str(tmp_path / "a.json"))
    second = run_cli("run", "--config", str(config), "--out", str(tmp_path / "b.json"))
    assert "wrote" in first.stdout
    a = (tmp_path / "a.json").read_bytes()
    b = (tmp_path / "b.json").read_bytes()
    assert a == b
    report = json.loads(a)
    assert report["config"]["seed"] == 99
    assert report["diagnostics"]["result_count"] == len(report["results"])
    # derived seed labels are recorded for reproducibility
    assert any("random_unitary" in s or "relation" in s for s in report["diagnostics"]["seed_labels"])


def test_run_without_seed_fails_on_stochastic_parts(tmp_path):
    config = tmp_path / "config.json"
    body = dict(RUN_CONFIG)
    body = {k: v for k, v in body.items() if k != "seed"}
    config.write_text(json.dumps(body))
    proc = run_cli("run", "--config", str(config), expect=2)
    assert "seed" in proc.stderr.lower()
