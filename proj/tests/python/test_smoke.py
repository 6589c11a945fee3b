import json
import pathlib

import numpy as np
import pytest

import hskdv

DESK = """L = 1
N = 64
M = 128
T = 0.5
omega = 0.45, 0.8
obs = 0.2, 0.6
omega0 = 0.48, 0.56
"""


def test_gap_constant():
    assert abs(hskdv.weight_gap(DESK) - 0.5) < 1e-12


def test_simulate_decays():
    t, x, y = hskdv.simulate(DESK, {"N": "32", "M": "40"})
    assert y.shape == (41, 34)
    assert x[0] == 0.0 and x[-1] == 1.0
    norms = np.sqrt((y[:, 1:-1] ** 2).sum(axis=1) / 33)
    assert np.all(np.diff(norms) <= 1e-12)


def test_duality_and_control():
    assert hskdv.duality_defect(DESK, {"trials": "2"}) < 1e-8
    r = hskdv.control_linear(DESK)
    assert r["pq0_norm"] <= 1e-3 * r["baseline_max_t"]
    assert r["h1"].shape == (129, 66)
    # controls live on omega = (0.45, 0.8)
    xs = np.arange(66) / 65
    assert np.all(r["h1"][:, xs < 0.44] == 0.0)


def test_bad_geometry_raises():
    with pytest.raises(hskdv.ConfigError):
        hskdv.weight_gap(DESK, {"omega": "0.7, 0.9", "obs": "0.1, 0.3"})
    with pytest.raises(ValueError):
        hskdv.canonical_config("L = 1\n")


def test_run_writes_artifacts(tmp_path):
    d = pathlib.Path(hskdv.run("audit-weights", DESK, {}, str(tmp_path)))
    assert d.parent == tmp_path
    rec = json.loads((d / "summary.jsonl").read_text().splitlines()[0])
    assert rec["gap_ok"] and rec["beta_ok"]
    assert hskdv.config_hash(DESK) in d.name
    assert "control-linear" in hskdv.subcommands
