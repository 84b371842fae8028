import math

import numpy as np
import pytest

import nfbeam

SMALL = {"array": {"num_antennas": 32}}


def test_defaults_round_trip():
    cfg = nfbeam.default_config()
    assert cfg["array"]["num_antennas"] == 512
    assert nfbeam.resolve_config(cfg) == cfg
    resolved = nfbeam.resolve_config(SMALL, ["num_cpis=7"])
    assert resolved["num_cpis"] == 7
    assert resolved["array"]["num_antennas"] == 32


def test_config_errors_are_value_errors():
    with pytest.raises(nfbeam.ConfigError):
        nfbeam.resolve_config({"noise": {"sigma_e2": -1.0}})
    with pytest.raises(ValueError, match="array.bogus"):
        nfbeam.resolve_config({"array": {"bogus": 1}})


def test_track_columns_and_determinism():
    cfg = dict(SMALL, num_cpis=25, seed=4)
    metrics, summary = nfbeam.track(cfg)
    assert metrics["cpi"].shape == (25,)
    assert summary["method"] == "ekf"
    assert np.all(metrics["rate_method"] <= metrics["rate_opt"] + 1e-9)
    again, _ = nfbeam.track(cfg)
    for key, col in metrics.items():
        assert np.array_equal(col, again[key]), key


def test_opt_column_matches_closed_form():
    cfg = dict(SMALL, num_cpis=10)
    metrics, _ = nfbeam.track(cfg)
    for i in range(10):
        state = [metrics[k][i] for k in ("x", "y", "vx", "vy")]
        a1 = 1.0 / (state[0] ** 2 + state[1] ** 2)
        closed = math.log2(1 + 1.0 * 32 * a1 * a1 / 1e-8)
        assert metrics["rate_opt"][i] == pytest.approx(closed, rel=1e-9)
        assert nfbeam.mrt_throughput(state, SMALL) == pytest.approx(closed, rel=1e-12)


def test_array_vectors():
    a = nfbeam.steering_vector(1.0, 5.0, SMALL)
    assert a.shape == (32,)
    assert np.allclose(np.abs(a), 1.0, atol=1e-12)
    f = nfbeam.opt_beamformer([1.0, 5.0, 2.0, 3.0], 10, SMALL)
    assert np.linalg.norm(f) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(IndexError):
        nfbeam.opt_beamformer([1.0, 5.0, 2.0, 3.0], 11, SMALL)


def test_sweep_and_convergence():
    cells = nfbeam.sweep_power(dict(SMALL, num_cpis=5), powers=[10, 40], methods=["ekf", "fd"])
    assert [c["method"] for c in cells] == ["ekf", "fd", "ekf", "fd"]
    assert cells[2]["mean_rate_opt"] > cells[0]["mean_rate_opt"]

    cfg = dict(SMALL, convergence={"seeds": 2}, adam={"max_iterations": 15})
    trace = nfbeam.converge(cfg, variants=["adam-ao"])
    assert set(trace["variant"]) == {"adam-ao"}
    starts = trace["k"] == 0
    assert starts.sum() == 2
    assert np.allclose(trace["rse"][starts], math.hypot(8, 7))


def test_moving_average_and_checks():
    assert nfbeam.moving_average([1, 2, 3, 4], 2) == [1.5, 2.5, 3.5]
    results = nfbeam.checks(SMALL)
    assert results and all(r["passed"] for r in results)
