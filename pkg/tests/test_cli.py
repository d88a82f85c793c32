import json
import math

import numpy as np
import pytest

from switchkit import IntegratorConfig, simulate
from switchkit.cli import main, _lorenz_checks
from switchkit.fileio import read_trajectory_csv, write_trajectory_csv
from util_scalar import random_scalar_setup


def test_trajectory_csv_round_trips_exactly(tmp_path):
    rng = np.random.default_rng(42)
    family, config, _, x0 = random_scalar_setup(rng, kind="dwell")
    traj, _ = simulate(family, config, x0,
                       cfg=IntegratorConfig(step_size=0.01, event_tolerance=1e-4,
                                            t_end=3.0))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj)
    back = read_trajectory_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.states, traj.states)
    assert np.array_equal(back.outputs, traj.outputs)
    assert np.array_equal(back.output_norms, traj.output_norms)
    assert np.array_equal(back.intervals, traj.intervals)
    assert back.modes == [str(m) for m in traj.modes]


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["pendulum", "--no-such-flag"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["bogus-subcommand"])
    assert err.value.code == 2


def test_cmd_pendulum_writes_outputs(tmp_path, monkeypatch):
    monkeypatch.delenv("SWITCHKIT_OUT", raising=False)
    out = tmp_path / "p"
    code = main(["pendulum", "--step", "0.005", "--tend", "6.0",
                 "--out", str(out)])
    assert code == 0
    summary = json.loads((out / "pendulum_summary.json").read_text())
    runs = summary["runs"]
    assert set(runs) == {"slow", "median", "fast", "hybrid"}
    assert runs["hybrid"]["switches"] >= 1
    for name in runs:
        traj = read_trajectory_csv(out / f"pendulum_{name}.csv")
        assert len(traj) > 0


def test_cmd_pendulum_omega_zero_degenerate_runs(tmp_path):
    out = tmp_path / "w0"
    assert main(["pendulum", "--omega", "0", "--step", "0.01",
                 "--tend", "2.0", "--out", str(out)]) == 0
    assert (out / "pendulum_summary.json").exists()


def test_cmd_pendulum_dwell_override_slows_convergence(tmp_path):
    fast = json.loads(_run_pendulum_summary(tmp_path / "a", "0.01"))
    slow = json.loads(_run_pendulum_summary(tmp_path / "b", "0.5"))
    t_fast = fast["runs"]["hybrid"]["time_to_e_le_0.1"]
    t_slow = slow["runs"]["hybrid"]["time_to_e_le_0.1"]
    assert t_slow >= t_fast


def _run_pendulum_summary(out, dwell):
    assert main(["pendulum", "--step", "0.005", "--tend", "8.0",
                 "--dwell", dwell, "--out", str(out)]) == 0
    return (out / "pendulum_summary.json").read_text()


def test_switchkit_out_env_overrides_flag(tmp_path, monkeypatch):
    env_dir = tmp_path / "from-env"
    monkeypatch.setenv("SWITCHKIT_OUT", str(env_dir))
    code = main(["sweep-threshold", "--s", "4", "--eps", "0.1",
                 "--rates", "2.0", "0.5", "--out", str(tmp_path / "ignored")])
    assert code == 0
    assert (env_dir / "threshold_argmin.json").exists()
    assert not (tmp_path / "ignored").exists()


def test_sweep_threshold_directions(tmp_path):
    def argmin(rates):
        out = tmp_path / f"r{rates[0]}-{rates[1]}"
        assert main(["sweep-threshold", "--s", "10", "--eps", "0.01",
                     "--rates", str(rates[0]), str(rates[1]),
                     "--out", str(out)]) == 0
        return json.loads((out / "threshold_argmin.json").read_text())

    grid = np.linspace(0.01, 10.0, 1001)[1:]
    fast_first = argmin((2.0, 1.0))
    assert fast_first["threshold"] == pytest.approx(grid[0])
    slow_first = argmin((1.0, 2.0))
    assert slow_first["threshold"] == pytest.approx(10.0)
    equal = argmin((1.0, 1.0))
    assert equal["total_time"] == pytest.approx(math.log(10.0 / 0.01))


def test_sweep_threshold_bad_range_exits_1(tmp_path, capsys):
    code = main(["sweep-threshold", "--s", "1", "--eps", "2",
                 "--rates", "1", "1", "--out", str(tmp_path)])
    assert code == 1


def test_cmd_simulate_custom_scenario(tmp_path):
    config = {
        "scenario": "custom",
        "supervisor": "dwell",
        "modes": {"slow": 0.5, "fast": 3.0},
        "partition": [0.0, 1.0],
        "mode_assignment": ["fast", "slow"],
        "dwell": 0.05,
        "x0": [4.0],
        "integrator": {"step": 0.002, "t_end": 4.0},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    summary = json.loads((out / "run_summary.json").read_text())
    assert summary["switches"] >= 1
    assert summary["final_interval"] == 0
    traj = read_trajectory_csv(out / "trajectory.csv")
    assert traj.times[-1] == pytest.approx(4.0)


def test_cmd_simulate_pendulum_scenario(tmp_path):
    config = {"scenario": "pendulum", "disturbed": True,
              "integrator": {"step": 0.005, "t_end": 5.0}}
    cfg_path = tmp_path / "p.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    summary = json.loads((out / "run_summary.json").read_text())
    assert summary["scenario"] == "pendulum" and summary["switches"] >= 1


def test_cmd_simulate_rejects_invalid_config(tmp_path, capsys):
    config = {
        "scenario": "custom",
        "supervisor": "dwell",
        "modes": {"only": 1.0},
        "partition": [0.0, 1.0],
        "mode_assignment": ["only", "missing"],
        "dwell": 0.05,
        "x0": [2.0],
    }
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["simulate", "--config", str(cfg_path),
                 "--out", str(tmp_path / "o")]) == 1
    assert "invalid configuration" in capsys.readouterr().err


def test_lorenz_checks_logic():
    def row(control, ic, j_e, j_a, j_u):
        return {"control": control, "ic": ic, "J_e": j_e, "J_a": j_a, "J_u": j_u}

    rows = [row("none", "small", 500.0, 400.0, 0.0),
            row("none", "large", 400.0, 450.0, 0.0),
            row("cancel", "small", 0.02, 0.0, 5.0),
            row("cancel", "large", 1.8, 0.0, 640.0),
            row("linear", "small", 0.03, 0.0, 5.6),
            row("linear", "large", 2.6, 0.0, 342.0),
            row("supervisor", "small", 0.03, 0.007, 5.1),
            row("supervisor", "large", 140.0, 0.007, 2.8)]
    checks = _lorenz_checks(rows, disturbed=False)
    assert all(checks.values())
    rows[7]["J_u"] = 100.0  # supervisor now spends too much energy
    checks = _lorenz_checks(rows, disturbed=False)
    assert not checks["supervisor_effort_ratio_le_0.05"]
