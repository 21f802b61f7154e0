import json

import numpy as np
import pytest

import tvpf


def tiny(name="advection_logistic", horizon=1.0, particles=60):
    cfg = tvpf.canned_config(name)
    cfg["problem"]["T_final"] = horizon
    cfg["filter"]["N"] = particles
    return cfg


def test_canned_configs_validate():
    for name in ("advection_logistic", "heat_sine"):
        cfg = tvpf.canned_config(name)
        assert cfg["name"] == name
        assert len(tvpf.data_hash(cfg)) == 16


def test_simulate_shapes():
    sim = tvpf.simulate(tiny())
    steps = len(sim["times"])
    assert steps == 21
    assert sim["truth"].shape == (steps, len(sim["state_x"]))
    assert sim["observations"].shape == (steps - 1, len(sim["obs_x"]))
    assert sim["sigma_noise"] > 0


def test_estimate_is_deterministic():
    cfg = tiny()
    sim = tvpf.simulate(cfg)
    a = tvpf.estimate(cfg, sim["observations"])
    b = tvpf.estimate(cfg, sim["observations"])
    np.testing.assert_array_equal(a["theta"], b["theta"])
    assert a["theta"].shape == (21, 5)
    bands = a["theta"]
    assert np.all(bands[:, 1] <= bands[:, 4])
    assert abs(a["final_weights"].sum() - 1.0) < 1e-12


def test_run_experiment_reports_metrics():
    out = tvpf.run_experiment(tiny("heat_sine", horizon=2.0))
    metrics = out["metrics"]
    assert metrics["scored_steps"] == 19
    assert metrics["theta"]["rmse"] >= 0
    assert [p["x"] for p in metrics["probes"]] == [0.5, 1.5]


def test_file_commands(tmp_path):
    cfg = tiny()
    tvpf.simulate_to(cfg, tmp_path / "data", seed=3)
    meta = json.loads((tmp_path / "data" / "meta.json").read_text())
    assert meta["seed"] == 3
    tvpf.estimate_to(cfg, tmp_path / "data", tmp_path / "est", seed=3)
    metrics = tvpf.report_to(tmp_path / "data", tmp_path / "est", tmp_path / "report")
    assert 0.0 <= metrics["theta"]["coverage95"] <= 1.0


def test_errors_map_to_python_exceptions(tmp_path):
    cfg = tiny()
    cfg["filter"]["N"] = 1
    with pytest.raises(ValueError):
        tvpf.simulate(cfg)
    with pytest.raises(tvpf.ValidationError):
        tvpf.simulate('{"bogus": 1}')
    with pytest.raises(OSError):
        tvpf.report_to(tmp_path / "missing", tmp_path / "est", tmp_path / "out")
    cfg = tiny()
    cfg["filter"]["sigma_D"] = 1e-200
    sim = tvpf.simulate(cfg)
    with pytest.raises(tvpf.DegenerateWeightsError):
        tvpf.estimate(cfg, sim["observations"])
