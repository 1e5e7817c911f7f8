import json
import math

import numpy as np
import pytest

import polarpic


def test_presets():
    names = polarpic.presets()
    assert {"diocotron-uncontrolled", "diocotron-s1", "diocotron-s2", "validate"} <= set(names)
    cfg = polarpic.config("diocotron-s1")
    assert cfg["mode"] == "strategy_one"
    assert cfg["alpha_r"] == 100.0
    assert polarpic.config("validate")["N"] == 10000


def test_bad_config():
    with pytest.raises(ValueError):
        polarpic.config(N=-1)
    with pytest.raises(polarpic.ConfigError):
        polarpic.config(bogus=1)


def test_deposit_mass_and_mode():
    s = polarpic.sample_diocotron(50000, seed=3)
    assert s["r"].min() >= 5.0 and s["r"].max() <= 8.0
    rho = polarpic.deposit_density(s["r"], s["theta"])
    assert rho.shape == (64, 64)
    dr, dt = 3.0 / 64, 2 * math.pi / 64
    rc = 5.0 + (np.arange(64) + 0.5) * dr
    mass = (rho * (rc * dr * dt)[:, None]).sum()
    assert abs(mass - 1.0) < 1e-12
    assert abs(polarpic.mode_amplitude(rho, 3) - 0.15) < 4 / math.sqrt(50000)


def test_poisson_manufactured():
    def err(m):
        r = 5.0 + (np.arange(m) + 0.5) * 3.0 / m
        t = (np.arange(m) + 0.5) * 2 * math.pi / m
        k = math.pi / 3
        R, T = np.meshgrid(r, t, indexing="ij")
        s, c = np.sin(k * (R - 5)), np.cos(k * (R - 5))
        exact = s * np.cos(3 * T)
        rho = -(-k * k * s + k * c / R - 9 * s / R**2) * np.cos(3 * T)
        return np.abs(polarpic.solve_poisson(rho) - exact).max()

    assert 3.6 < err(32) / err(64) < 4.4
    er, et = polarpic.efield(np.zeros((8, 8)))
    assert not er.any() and not et.any()


def test_control_law_singleton():
    s = {"r": np.array([6.0]), "theta": np.array([0.0]),
         "v_r": np.array([2.0]), "v_theta": np.array([1.0])}
    b = polarpic.strategy_two_pointwise(s, np.array([0.0]), {"alpha_v": 1.0, "gamma": 1.0}, 0.5)
    assert b[0] == pytest.approx((2.0 + 0.5 / 6.0) / 1.5)
    zero = dict(s, v_theta=np.array([0.0]))
    assert polarpic.strategy_two_pointwise(zero, np.array([0.3]), {"alpha_v": 1.0}, 0.5)[0] == 0.0


def test_short_run(tmp_path):
    cfg = polarpic.config("diocotron-s2", N=5000, t_f=2.0, snapshot_times=[1.0])
    res = polarpic.run(cfg, out_dir=tmp_path)
    assert len(res["t"]) == 4
    assert res["B"].shape == (4, 4)
    assert np.abs(res["B"]).max() <= 100.0
    assert [s["tag"] for s in res["snapshots"]] == ["0", "1"]
    assert (tmp_path / "diagnostics.csv").exists()
    assert json.loads((tmp_path / "config.json").read_text())["N"] == 5000

    sim = polarpic.Simulation(cfg)
    rec = sim.step()
    assert rec["t"] == 0.5 and sim.step_index == 1
    assert rec["E_b"] == res["E_b"][0]
    assert sim.state["r"].size == 5000
    assert np.array_equal(rec["B"], res["B"][0])


def test_numerical_failure():
    cfg = polarpic.config("diocotron-uncontrolled", N=500, B_const=0.0, h=50.0, t_f=100.0)
    with pytest.raises(polarpic.NumericalFailure):
        polarpic.run(cfg)


def test_convergence_small():
    cfg = polarpic.config("validate", N=500, t_f=0.05)
    t = polarpic.convergence_study(cfg, [16, 32], 256)
    assert len(t["error"]) == 2 and t["reference_steps"] == 256
