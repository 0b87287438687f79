import json
import subprocess
import sys

import pytest
import yaml

from gokuui.cli import main

TINY = {
    "seed": 4,
    "data": {"n_oscillators": 1, "output_dim": 3, "n_train": 4, "n_test": 2, "total_time": 3.0, "trim_steps": 10},
    "model": {"n_oscillators": 1, "feature_dim": 8, "feature_hidden": 8, "latent_hidden": 8},
    "train": {"batch_size": 2, "seq_len": 10, "window_len": 4, "max_epochs": 3, "warmup_epochs": 1},
    "eval": {"horizon": 5},
}


@pytest.fixture()
def config(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(TINY))
    return path


def test_round_trip(tmp_path, config):
    data, run, ev, fig = (tmp_path / n for n in ("data", "run", "eval", "fig"))
    assert main(["generate-data", "--config", str(config), "--out", str(data)]) == 0
    assert main(["train", "--config", str(config), "--data", str(data), "--out", str(run)]) == 0
    log = [json.loads(l) for l in (run / "train_log.jsonl").read_text().splitlines()]
    assert [r["epoch"] for r in log] == [0, 1, 2]
    assert (run / "config.yaml").exists() and (run / "inputs.json").exists()
    assert main(["evaluate", "--checkpoint", str(run / "checkpoint"), "--data", str(data), "--out", str(ev)]) == 0
    lines = (ev / "metrics.csv").read_text().splitlines()
    assert len(lines) == 3
    assert main(["plot", "--report", str(ev), "--out", str(fig)]) == 0
    assert (fig / "box_forecast.svg").exists()


def test_generate_is_reproducible(tmp_path, config):
    for k in ("a", "b"):
        assert main(["generate-data", "--config", str(config), "--out", str(tmp_path / k)]) == 0
    files = sorted(f.name for f in (tmp_path / "a").iterdir() if f.is_file())
    assert files
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_invalid_input_exit_1(tmp_path, config, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"train": {"window_length": 3}}))
    assert main(["generate-data", "--config", str(bad), "--out", str(tmp_path / "d")]) == 1
    assert "window_length" in capsys.readouterr().err
    assert main(["train", "--config", str(config), "--data", str(tmp_path / "missing"), "--out", str(tmp_path / "r")]) == 1
    assert main(["plot", "--report", str(tmp_path / "none"), "--out", str(tmp_path / "f")]) == 1


def test_bad_plan_exit_1(tmp_path, config):
    data = tmp_path / "data"
    assert main(["generate-data", "--config", str(config), "--out", str(data)]) == 0
    bad = dict(TINY, train=dict(TINY["train"], window_len=5))
    path = tmp_path / "plan.yaml"
    path.write_text(yaml.safe_dump(bad))
    assert main(["train", "--config", str(path), "--data", str(data), "--out", str(tmp_path / "r")]) == 1


def test_usage_error():
    proc = subprocess.run([sys.executable, "-m", "gokuui.cli", "train"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "--data" in proc.stderr
