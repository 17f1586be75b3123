import json
import re

import numpy as np
import pytest

from cqec import io
from cqec.cli import ReplayError, main, replay
from cqec.config import SimConfig
from cqec.trajectory import COLUMNS


def run(*argv):
    assert main([str(a) for a in argv]) == 0


def check_csv_format(path, header):
    raw = open(path, "rb").read()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert tuple(lines[0].split(",")) == tuple(header)
    for line in lines[1:]:
        assert len(line.split(",")) == len(header)


def test_simulate_writes_schema_and_summary(tmp_path):
    run("simulate", "--set", "T_gamma=0.01", "--set", "output_stride=10", "--out", tmp_path)
    check_csv_format(tmp_path / "trajectory.csv", COLUMNS)
    header, data = io.read_csv(tmp_path / "trajectory.csv", COLUMNS)
    assert data.shape == (101, 17)
    summary = io.read_json(tmp_path / "summary.json")
    assert {"final_fidelity", "events", "wall_time", "config", "dw_checksum"} <= set(summary)
    assert summary["config"]["T_gamma"] == 0.01


def test_numbers_keep_twelve_significant_digits(tmp_path):
    run("simulate", "--set", "T_gamma=0.01", "--out", tmp_path)
    _, data = io.read_csv(tmp_path / "trajectory.csv")
    text = (tmp_path / "trajectory.csv").read_text().splitlines()[5]
    digits = [len(re.sub(r"[^0-9]", "", v.split("e")[0]).lstrip("0")) for v in text.split(",")]
    assert max(digits) >= 12
    summary = io.read_json(tmp_path / "summary.json")
    assert data[-1, 1] == pytest.approx(summary["final_fidelity"], abs=1e-14)


def test_simulate_gamma_zero(tmp_path):
    run("simulate", "--set", "gamma=0", "--set", "T_gamma=0.01", "--out", tmp_path)
    assert io.read_json(tmp_path / "summary.json")["final_fidelity"] == 1.0


def test_config_file_preset_seed(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"T_gamma": 0.005, "eta": 0.9}))
    run("simulate", "--config", cfg, "--preset", "fig2", "--seed", 9, "--out", tmp_path)
    echo = io.read_json(tmp_path / "summary.json")["config"]
    assert echo["seed"] == 9 and echo["eta"] == 0.9 and echo["lambda0_over_kappa"] == 0.75


def test_bad_config_reports_field(tmp_path, capsys):
    assert main(["simulate", "--set", "eta=3", "--out", str(tmp_path)]) == 1
    assert "eta" in capsys.readouterr().err


def test_ensemble_n1_matches_simulate(tmp_path):
    run("simulate", "--set", "T_gamma=0.01", "--out", tmp_path / "s")
    run("ensemble", "--set", "T_gamma=0.01", "--set", "n_trajectories=1", "--out", tmp_path / "e")
    _, traj = io.read_csv(tmp_path / "s" / "trajectory.csv")
    _, ens = io.read_csv(tmp_path / "e" / "ensemble.csv", io.ENSEMBLE_COLUMNS)
    assert np.array_equal(traj[:, 1], ens[:, 1])
    assert np.all(ens[:, 2] == 0)


def test_ensemble_sweep_writes_one_csv_per_point(tmp_path):
    run("ensemble", "--set", "T_gamma=0.005", "--set", "n_trajectories=2",
        "--set", 'sweep={"param": "eta", "values": [1.0, 0.8, 0.6, 0.4]}', "--out", tmp_path)
    index = io.read_json(tmp_path / "index.json")
    assert [p["value"] for p in index["points"]] == [1.0, 0.8, 0.6, 0.4]
    for p in index["points"]:
        check_csv_format(tmp_path / p["csv"], io.ENSEMBLE_COLUMNS)


def test_replay_manifest_and_determinism(tmp_path):
    run("replay", "--set", "T_gamma=0.01", "--lambdas", "1", "1", "0", "--out", tmp_path)
    m = io.read_json(tmp_path / "manifest.json")
    assert m["checksums_identical"] and len({r["dw_checksum"] for r in m["runs"]}) == 1
    run("simulate", "--set", "T_gamma=0.01", "--set", "controller=none", "--out", tmp_path / "none")
    _, zero = io.read_csv(tmp_path / "replay_lam0.csv")
    _, none = io.read_csv(tmp_path / "none" / "trajectory.csv")
    assert np.array_equal(zero, none)


def test_replay_aborts_on_checksum_mismatch(monkeypatch):
    import cqec.cli as cli

    real = cli.run_trajectory
    calls = []

    def tampered(cfg, index=0):
        r = real(cfg, index=index)
        calls.append(1)
        if len(calls) == 2:
            r.dw_checksum = "0" * 64
        return r

    monkeypatch.setattr(cli, "run_trajectory", tampered)
    with pytest.raises(ReplayError):
        replay(SimConfig(T_gamma=0.002), [1.0, 1.0])


def test_baseline_csv(tmp_path):
    run("baseline", "--t-max", 1, "--points", 3, "--out", tmp_path)
    check_csv_format(tmp_path / "baseline.csv", io.BASELINE_COLUMNS)
    _, d = io.read_csv(tmp_path / "baseline.csv")
    assert np.array_equal(d[0], [0, 1, 1, 1])
    assert d[1, 1] == pytest.approx(0.763463, abs=5e-7)
    assert np.all(np.diff(d[:, 1:], axis=0) < 0)
    assert main(["baseline", "--points", "1", "--out", str(tmp_path)]) == 2


def test_plot_from_csvs(tmp_path):
    run("baseline", "--out", tmp_path)
    run("plot", tmp_path / "baseline.csv", "--columns", "F_DQEC", "--out", tmp_path, "--name", "one.svg")
    assert (tmp_path / "one.svg").read_text().count("<polyline") == 1
    for seed in (1, 2):
        run("ensemble", "--set", "T_gamma=0.005", "--set", "n_trajectories=3", "--seed", seed,
            "--out", tmp_path / f"s{seed}")
    run("plot", tmp_path / "s1" / "ensemble.csv", tmp_path / "s2" / "ensemble.csv", "--out", tmp_path,
        "--name", "two.svg")
    svg = (tmp_path / "two.svg").read_text()
    assert svg.count("<polyline") == 2 and svg.count('class="band"') == 2
    assert main(["plot", str(tmp_path / "s1" / "ensemble.csv"), "--columns", "nope", "--out", str(tmp_path)]) == 1


def test_csv_schema_violations(tmp_path):
    with pytest.raises(io.SchemaError):
        io.write_csv(tmp_path / "a.csv", ("t", "x"), np.zeros((3, 3)))
    io.write_csv(tmp_path / "b.csv", ("t", "x"), np.zeros((3, 2)))
    with pytest.raises(io.SchemaError):
        io.read_csv(tmp_path / "b.csv", ("t", "y"))
