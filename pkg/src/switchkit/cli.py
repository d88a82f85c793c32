"""Command-line front end: case-study runs, table reproduction, threshold
sweeps and custom simulations, all emitted as flat CSV/JSON files."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import lorenz as lz
from . import pendulum as pd
from .bounds import InfeasibleError, KLExp, optimal_threshold
from .fileio import write_json, write_rows_csv, write_trajectory_csv
from .integrate import IntegrationError, IntegratorConfig
from .simulate import simulate
from .supervisors import DWELL, HYSTERESIS
from .system import (Mode, ModeFamily, Partition, SupervisorConfig,
                     constant_dwell, default_chi, validate_config)


def _resolve_out(out: str) -> Path:
    path = Path(os.environ.get("SWITCHKIT_OUT", out))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--step", type=float, default=1e-3,
                        help="integrator step size in seconds")
    parser.add_argument("--tend", type=float, default=None,
                        help="simulation horizon in seconds")
    parser.add_argument("--out", default="results",
                        help="output directory (SWITCHKIT_OUT overrides)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed recorded in metadata for randomized harnesses")


def _integrator(step: float, t_end: float) -> IntegratorConfig:
    return IntegratorConfig(step_size=step,
                            event_tolerance=min(1e-6, step / 10.0),
                            t_end=t_end)


def cmd_pendulum(args) -> int:
    out = _resolve_out(args.out)
    setup = pd.PendulumObserverSetup(omega=args.omega)
    t_end = args.tend if args.tend is not None else 10.0
    cfg = _integrator(args.step, t_end)
    summary = {}
    for observer in (pd.SLOW, pd.MEDIAN, pd.FAST, "hybrid"):
        try:
            traj, log = pd.run_pendulum(setup, observer, cfg=cfg,
                                        dwell=args.dwell)
        except IntegrationError as exc:
            print(f"error: simulation diverged for {observer}: {exc}",
                  file=sys.stderr)
            return 1
        write_trajectory_csv(out / f"pendulum_{observer}.csv", traj)
        summary[observer] = {
            "peak_e2": float(np.abs(traj.outputs[:, 1]).max()),
            "time_to_e_le_0.1": pd.time_to_error_level(traj, 0.1),
            "switches": len(log.events),
        }
    meta = {"omega": args.omega, "step": args.step, "t_end": t_end,
            "dwell": args.dwell if args.dwell is not None else setup.t_min,
            "partition": list(setup.partition), "chi": list(setup.chi),
            "seed": args.seed}
    write_json(out / "pendulum_summary.json", {"runs": summary, "meta": meta})
    print(f"wrote 4 trajectories and pendulum_summary.json to {out}")
    return 0


def _lorenz_cell_job(job):
    control, ic, disturbed, setup, step = job
    return lz.run_lorenz_cell(control, ic, disturbed, setup=setup, step=step)


def _lorenz_checks(rows: list, disturbed: bool) -> dict:
    cell = {(r["control"], r["ic"]): r for r in rows}
    checks = {}
    checks["no_control_zero_effort"] = all(
        cell[("none", ic)]["J_u"] == 0.0 for ic in ("small", "large"))
    checks["no_control_large_error"] = all(
        cell[("none", ic)]["J_e"] >= 100.0 for ic in ("small", "large"))
    if not disturbed:
        checks["cancel_linear_asymptotic_zero"] = all(
            cell[(c, ic)]["J_a"] <= 1e-6
            for c in ("cancel", "linear") for ic in ("small", "large"))
        ratio = cell[("supervisor", "large")]["J_u"] / cell[("cancel", "large")]["J_u"]
        checks["supervisor_effort_ratio_le_0.05"] = ratio <= 0.05
    else:
        floor = min(cell[("cancel", "large")]["J_u"],
                    cell[("linear", "large")]["J_u"])
        checks["supervisor_effort_le_quarter_best"] = (
            cell[("supervisor", "large")]["J_u"] <= 0.25 * floor)
        ja_sup = cell[("supervisor", "large")]["J_a"]
        ja_lin = cell[("linear", "large")]["J_a"]
        checks["supervisor_asymptotic_within_3x_linear"] = (
            ja_sup <= 3.0 * ja_lin and ja_lin <= 3.0 * ja_sup)
    return checks


def cmd_lorenz_table(args) -> int:
    out = _resolve_out(args.out)
    disturbed = args.disturbed == "on"
    setup = lz.LorenzSetup(chi_factor=args.chi_factor,
                           horizon=args.tend if args.tend is not None else 30.0)
    jobs = [(control, ic, disturbed, setup, args.step)
            for control in ("cancel", "linear", "none", "supervisor")
            for ic in ("small", "large")]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_lorenz_cell_job, jobs))
        else:
            rows = [_lorenz_cell_job(job) for job in jobs]
    except IntegrationError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return 1
    header = ["control", "ic", "J_e", "J_a", "J_u", "switches"]
    write_rows_csv(out / "lorenz_table.csv", header,
                   [[r[k] for k in header] for r in rows])
    checks = _lorenz_checks(rows, disturbed)
    report = {
        "disturbed": disturbed,
        "checks": checks,
        "meta": {"step": args.step, "chi_factor": args.chi_factor,
                 "horizon": setup.horizon, "seed": args.seed,
                 "partition": list(setup.partition)},
    }
    write_json(out / "lorenz_report.json", report)
    ok = all(checks.values())
    for name, passed in checks.items():
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
    print(f"wrote lorenz_table.csv and lorenz_report.json to {out}")
    return 0 if ok else 1


def cmd_sweep_threshold(args) -> int:
    out = _resolve_out(args.out)
    if not 0 < args.eps < args.s:
        print("error: need 0 < eps < s", file=sys.stderr)
        return 1
    b1, b0 = args.rates
    a1, a0 = args.overshoots
    try:
        beta1, beta0 = KLExp(a=a1, b=b1), KLExp(a=a0, b=b0)
        from .bounds import time_to_level
        grid = np.linspace(args.eps, args.s, args.grid + 1)[1:]
        totals = [time_to_level(beta1, args.s, dl) + time_to_level(beta0, dl, args.eps)
                  for dl in grid]
        best, total = optimal_threshold(beta1, beta0, args.s, args.eps,
                                        n_grid=args.grid)
    except (ValueError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_rows_csv(out / "threshold_sweep.csv", ["threshold", "total_time"],
                   list(zip(map(float, grid), map(float, totals))))
    write_json(out / "threshold_argmin.json",
               {"threshold": best, "total_time": total,
                "s": args.s, "eps": args.eps,
                "rates": [b1, b0], "overshoots": [a1, a0]})
    print(f"optimal threshold {best:.6g} with total time {total:.6g}")
    return 0


def _custom_family(spec: dict) -> ModeFamily:
    rates = spec["modes"]

    def make_rhs(rate):
        return lambda x, d: -rate * x + d

    modes = {name: Mode(rhs=make_rhs(float(rate)))
             for name, rate in rates.items()}
    return ModeFamily(modes=modes, state_dim=1, disturbance_dim=1,
                      output_map=lambda x: x)


def cmd_simulate(args) -> int:
    out = _resolve_out(args.out)
    spec = json.loads(Path(args.config).read_text())
    scenario = spec.get("scenario", "custom")
    kind = spec.get("supervisor", "dwell")
    integ = spec.get("integrator", {})
    step = float(integ.get("step", 1e-3))
    cfg = IntegratorConfig(step_size=step,
                           event_tolerance=float(integ.get("event_tolerance",
                                                           min(1e-6, step / 10))),
                           t_end=float(integ.get("t_end", 10.0)))

    if scenario == "pendulum":
        setup = pd.PendulumObserverSetup(omega=float(spec.get("omega", 1.0)))
        family = pd.pendulum_family(setup)
        config = pd.pendulum_config(setup, dwell=spec.get("dwell"))
        # structural validation only: the bundled gain bank has no KL
        # certificates tight enough for the overshoot inequality
        betas = None
        x0 = spec.get("x0", list(setup.initial_state()))
        d = setup.disturbance() if spec.get("disturbed", True) else None
    elif scenario == "lorenz":
        setup = lz.LorenzSetup(chi_factor=float(spec.get("chi_factor", 0.8)))
        family = lz.lorenz_family(setup)
        config = lz.lorenz_config(setup)
        betas = None
        x0 = spec.get("x0", list(lz.IC_SMALL))
        d = lz.standard_disturbance if spec.get("disturbed", False) else None
        kind = "hysteresis"
    elif scenario == "custom":
        family = _custom_family(spec)
        part = Partition(tuple(spec["partition"]))
        chi_values = (tuple(spec["chi"]) if "chi" in spec
                      else default_chi(part))
        dwell = (constant_dwell(float(spec["dwell"]), part)
                 if kind == "dwell" else None)
        config = SupervisorConfig(partition=part,
                                  mode_assignment=tuple(spec["mode_assignment"]),
                                  chi=chi_values, dwell=dwell,
                                  t_min=float(spec.get("dwell", 0.01)))
        overshoots = spec.get("overshoots", {})
        betas = {name: KLExp(a=float(overshoots.get(name, 1.0)),
                             b=float(rate))
                 for name, rate in spec["modes"].items()}
        x0 = spec["x0"]
        dist = spec.get("disturbance")
        d = ((lambda t, _a=float(dist["amplitude"]), _f=float(dist["frequency"]):
              np.array([_a * math.sin(_f * t)])) if dist else None)
    else:
        print(f"error: unknown scenario {scenario!r}", file=sys.stderr)
        return 1

    violations = validate_config(family, config, betas)
    if violations:
        for v in violations:
            print(f"invalid configuration: {v}", file=sys.stderr)
        return 1
    try:
        traj, log = simulate(family, config, x0, d=d, cfg=cfg, kind=kind)
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_trajectory_csv(out / "trajectory.csv", traj)
    write_json(out / "run_summary.json", {
        "scenario": scenario, "supervisor": kind,
        "switches": len(log.events),
        "switch_times": [e.t for e in log.events],
        "final_interval": int(traj.intervals[-1]),
        "meta": {"step": cfg.step_size, "t_end": cfg.t_end,
                 "event_tolerance": cfg.event_tolerance},
    })
    print(f"wrote trajectory.csv and run_summary.json to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchkit",
        description="supervisory switched-control simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pendulum", help="run the hybrid-observer case study")
    _add_common(p)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--dwell", type=float, default=None,
                   help="constant dwell time override in seconds")
    p.set_defaults(func=cmd_pendulum)

    p = sub.add_parser("lorenz-table",
                       help="reproduce the synchronization performance table")
    _add_common(p)
    p.add_argument("--disturbed", choices=("on", "off"), default="off")
    p.add_argument("--chi-factor", type=float, default=0.8)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_lorenz_table)

    p = sub.add_parser("sweep-threshold",
                       help="sweep the two-mode switching threshold")
    _add_common(p)
    p.add_argument("--s", type=float, required=True, help="initial output norm")
    p.add_argument("--eps", type=float, required=True, help="tolerance level")
    p.add_argument("--rates", type=float, nargs=2, required=True,
                   metavar=("B1", "B0"), help="decay rates of the two modes")
    p.add_argument("--overshoots", type=float, nargs=2, default=(1.0, 1.0),
                   metavar=("A1", "A0"))
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_sweep_threshold)

    p = sub.add_parser("simulate", help="run a JSON-configured simulation")
    _add_common(p)
    p.add_argument("--config", required=True, help="path to the JSON config")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
