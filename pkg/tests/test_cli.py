import json
import subprocess
import sys

import pytest

from ata_heat.cli import ConfigError, load_config, main


def write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_defaults_and_validation():
    cfg = load_config(None)
    assert cfg["grid"]["n"] == 8
    with pytest.raises(ConfigError):
        load_config({"version": 2})
    with pytest.raises(ConfigError):
        load_config({"version": 1, "grid": {"qubits": 3}})
    with pytest.raises(ConfigError):
        load_config({"grid": {}})
    assert load_config({"version": 1, "grid": {"n": 3}})["grid"]["c"] == 0.1


def test_spectrum_command(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 5, "c": 0.1}})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "k,exact,approx" and len(lines) == 33
    meta = json.loads((tmp_path / "o" / "spectrum.meta.json").read_text())
    assert meta["outputs"] == ["spectrum.csv"] and meta["config"]["grid"]["n"] == 5


def test_spectrum_n1(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 1}})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "spectrum.csv").read_text().splitlines()) == 3


def test_step_eigenvector_depth_one(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 6}, "sources": {"kind": "eigenvector", "mode": 2}})
    assert main(["step", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "step.meta.json").read_text())
    assert meta["summary"]["final_depth"] == 1 and meta["summary"]["min_depth_for_target"] == 1


def test_step_smooth_field(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 8, "c": 0.1}})
    assert main(["step", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "step.meta.json").read_text())["summary"]
    assert summary["min_depth_for_target"] is not None and not summary["saturated"]


def test_step_oracle_off(tmp_path):
    assert main(["step", "--out", str(tmp_path), "--oracle", "off"]) == 0
    rows = (tmp_path / "step.csv").read_text().splitlines()
    assert rows[1].endswith(",")


def test_evolve_sweep_and_determinism(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 5, "c": 1.0, "n_t": 5},
                           "evolve": {"n_steps": 5, "d_cut_sweep": [4, 8], "preset": "repr"},
                           "sources": {"n_terms": 4}})
    for d in ("a", "b"):
        assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", "3"]) == 0
    for name in ("trajectory_dcut_4.csv", "trajectory_dcut_8.csv", "dropout.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert b"\r" not in (tmp_path / "a" / "dropout.csv").read_bytes()
    meta = json.loads((tmp_path / "a" / "evolve.meta.json").read_text())
    assert meta["seed"] == 3


@pytest.mark.parametrize("preset", ["heater_cooler", "zero_source", "field"])
def test_evolve_presets(tmp_path, preset):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 5, "n_t": 4}, "evolve": {"n_steps": 4, "preset": preset}})
    assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "trajectory.csv").read_text().splitlines()) == 5


def test_cluster_and_resources(tmp_path):
    cfg = write(tmp_path, {"version": 1, "cluster": {"ns": [4, 5], "samples": 3, "depth_cap": 8,
                                                     "smoothness": [2], "n": 4, "n_steps": 3, "depth": 5}})
    assert main(["cluster", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "cluster_haar.csv").read_text().startswith("n,samples,cluster_size,masks\n")
    assert main(["resources", "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "resources.csv").read_text().splitlines()) == 1 + 17 * 2 * 2


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, {"version": 1, "unknown": True})
    assert main(["spectrum", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err
    wrong = write(tmp_path, {"version": 1, "command": "step"})
    assert main(["spectrum", "--config", str(wrong)]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2


def test_runtime_error_exit_1(tmp_path):
    cfg = write(tmp_path, {"version": 1, "grid": {"n": 30}})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ata_heat.cli", "resources", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0
