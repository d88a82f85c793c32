"""Flat-file emission: trajectory CSVs (round-trippable at full precision)
and JSON summaries."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .simulate import Trajectory

_FMT = "%.17g"


def trajectory_header(traj: Trajectory) -> list:
    n = traj.states.shape[1]
    p = traj.outputs.shape[1]
    m = traj.controls.shape[1] if traj.controls.ndim == 2 else 0
    cols = ["t"]
    cols += [f"x{i + 1}" for i in range(n)]
    cols += [f"y{i + 1}" for i in range(p)]
    cols += ["y_norm", "interval", "mode"]
    cols += [f"u{i + 1}" for i in range(m)]
    return cols


def write_trajectory_csv(path, traj: Trajectory) -> None:
    path = Path(path)
    m = traj.controls.shape[1] if traj.controls.ndim == 2 else 0
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_header(traj))
        for i in range(len(traj)):
            row = [_FMT % traj.times[i]]
            row += [_FMT % v for v in traj.states[i]]
            row += [_FMT % v for v in traj.outputs[i]]
            row += [_FMT % traj.output_norms[i], str(int(traj.intervals[i])),
                    str(traj.modes[i])]
            if m:
                row += [_FMT % v for v in traj.controls[i]]
            writer.writerow(row)


def read_trajectory_csv(path) -> Trajectory:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    n = sum(1 for c in header if c.startswith("x"))
    p = sum(1 for c in header if c.startswith("y") and c != "y_norm")
    m = sum(1 for c in header if c.startswith("u"))
    times, states, outputs, norms, intervals, modes, controls = \
        [], [], [], [], [], [], []
    for row in rows:
        it = iter(row)
        times.append(float(next(it)))
        states.append([float(next(it)) for _ in range(n)])
        outputs.append([float(next(it)) for _ in range(p)])
        norms.append(float(next(it)))
        intervals.append(int(next(it)))
        modes.append(next(it))
        controls.append([float(next(it)) for _ in range(m)])
    return Trajectory(times=np.array(times), states=np.array(states),
                      outputs=np.array(outputs),
                      controls=np.array(controls).reshape(len(rows), m),
                      output_norms=np.array(norms),
                      intervals=np.array(intervals, dtype=int), modes=modes)


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_rows_csv(path, header: list, rows: list) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_FMT % v if isinstance(v, float) else str(v)
                             for v in row])
