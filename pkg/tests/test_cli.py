import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from timechange.cli import main
from timechange.config import ConfigError, load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, doc, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_charfn_selfdec(tmp_path):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"seed": 1, "t": 1.0, "u": [1.0]}})
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 0
    rows = read_csv(tmp_path / "o" / "charfn.csv")
    assert float(rows[0]["re_curve"]) == pytest.approx(-0.446287102628419530, rel=1e-15)
    assert float(rows[0]["im_curve"]) == 0.0


def test_triplet_identity_clock(tmp_path):
    cfg = write(tmp_path, {"model": {"base": {"name": "merton", "drift": 0.1, "variance": 0.04,
                                              "rate": 2.0, "jump_mean": -0.1, "jump_std": 0.2},
                                     "clock": {"name": "trivial"}},
                           "action": "triplet", "numeric": {"seed": 1, "s": [5.0]}})
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    row = read_csv(tmp_path / "triplet.csv")[0]
    assert float(row["drift"]) == 0.1 and float(row["variance"]) == 0.04
    assert float(row["s"]) == 5.0


def test_missing_seed_exits_2_without_output(tmp_path, capsys):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"t": 1.0}})
    out = tmp_path / "nothing"
    assert main(["--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()
    assert "seed" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [
    {"model": {"name": "nope"}, "action": "charfn", "numeric": {"seed": 1}},
    {"model": {"name": "selfdec", "gamma": -1, "nu": 1}, "action": "charfn", "numeric": {"seed": 1}},
    {"model": {"name": "selfdec", "gamma": 1, "nu": 1}, "action": "fly", "numeric": {"seed": 1}},
    {"model": {"name": "selfdec", "gamma": 1, "nu": 1}, "action": "price", "numeric": {"seed": 1}},
    {"model": {"name": "selfdec", "gamma": 1, "nu": 1}, "action": "charfn",
     "numeric": {"seed": 1, "eps": "tiny"}},
])
def test_config_errors(tmp_path, doc):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, doc))
    assert main(["--config", write(tmp_path, doc), "--out", str(tmp_path / "x"), "--quiet"]) == 2


def test_numeric_error_exit_3(tmp_path):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 0.5, "nu": 1.0}, "action": "price",
                           "numeric": {"seed": 1},
                           "market": {"spot": 100, "maturity": 1, "strikes": [100]}})
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 3


def test_simulate_byte_identical_and_seed_override(tmp_path):
    doc = {"model": {"name": "selfdec", "gamma": 0.5, "nu": 0.2}, "action": "simulate",
           "numeric": {"seed": 7, "n_paths": 4, "eps": "1e-4", "grid": [0.0, 0.5, 1.0]}}
    cfg = write(tmp_path, doc)
    for d in ("a", "b"):
        assert main(["--config", cfg, "--out", str(tmp_path / d), "--quiet"]) == 0
    a = (tmp_path / "a" / "simulate.csv").read_bytes()
    assert a == (tmp_path / "b" / "simulate.csv").read_bytes()
    assert main(["--config", cfg, "--out", str(tmp_path / "c"), "--seed", "8", "--quiet"]) == 0
    assert a != (tmp_path / "c" / "simulate.csv").read_bytes()
    rows = read_csv(tmp_path / "a" / "simulate.csv")
    assert list(rows[0]) == ["path_id", "t", "Z", "Y"] and len(rows) == 12


def test_env_output_dir(tmp_path, monkeypatch):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"seed": 1}})
    monkeypatch.setenv("TIMECHANGE_OUT_DIR", str(tmp_path / "env"))
    assert main(["--config", cfg, "--quiet"]) == 0
    assert (tmp_path / "env" / "charfn.csv").exists()


def test_round_trip_precision(tmp_path):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"seed": 1, "u": [0.3]},
                           "output": {"format": "json"}})
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    from timechange.selfdec import SelfDecParams, build_timechanged
    val = json.loads((tmp_path / "charfn.json").read_text())[0]["re_curve"]
    exact = build_timechanged(SelfDecParams(1.0, 0.5)).char_exponent_curve(1.0, 0.3).real
    assert val == exact
    # CSV uses 17 significant digits, which round-trips doubles exactly
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"seed": 1, "u": [0.3]}})
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    assert float(read_csv(tmp_path / "charfn.csv")[0]["re_curve"]) == exact


def test_validate_and_price_actions(tmp_path):
    doc = {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5}, "action": "validate",
           "numeric": {"seed": 3, "n_paths": 4000, "u": [1.0], "times": [0.001, 0.5, 1.0]}}
    assert main(["--config", write(tmp_path, doc), "--out", str(tmp_path), "--quiet"]) == 0
    assert json.loads((tmp_path / "validate.json").read_text())["passed"] is True
    doc = {"model": {"base": {"name": "brownian", "variance": 0.04}, "clock": {"name": "trivial"}},
           "action": "price", "numeric": {"seed": 1},
           "market": {"spot": 100, "rate": 0.05, "maturity": 1, "strikes": [100]}}
    assert main(["--config", write(tmp_path, doc), "--out", str(tmp_path), "--quiet"]) == 0
    row = read_csv(tmp_path / "price.csv")[0]
    assert float(row["price"]) == pytest.approx(10.4505835721856, abs=1e-8)


def test_generator_check_action(tmp_path):
    doc = {"model": {"base": {"name": "brownian"}, "clock": {"name": "trivial"}},
           "action": "generator-check",
           "numeric": {"seed": 3, "s": 0.0, "n_paths": 100000, "t_list": [0.1, 0.05, 0.025]}}
    assert main(["--config", write(tmp_path, doc), "--out", str(tmp_path), "--quiet"]) == 0
    assert read_csv(tmp_path / "generator-check.csv")[0].keys() >= {"t", "quotient", "stderr"}


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_shipped_configs_parse(name):
    load_config(CONFIGS / name)


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, {"model": {"name": "selfdec", "gamma": 1.0, "nu": 0.5},
                           "action": "charfn", "numeric": {"seed": 1}})
    res = subprocess.run([sys.executable, "-m", "timechange", "--config", cfg, "--out",
                          str(tmp_path)], capture_output=True, text=True,
                         env={**os.environ, "TIMECHANGE_OUT_DIR": ""})
    assert res.returncode == 0, res.stderr
    assert "wrote" in res.stdout
