"""Switching-signal generators: output-dependent dwell-time supervision and
adjacent-interval hysteresis supervision."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system import SupervisorConfig, in_switch_band

DWELL = "dwell"
HYSTERESIS = "hysteresis"


@dataclass(frozen=True)
class SupervisorState:
    """Active interval index plus the switching bookkeeping.

    The active dynamics is the mode assigned to interval q.  dwell_deadline
    is t_last_switch + T_q evaluated at the output norm at the last switch;
    it is unused (zero) for the hysteresis kind.
    """

    q: int
    t_last_switch: float
    kind: str
    dwell_deadline: float = 0.0


def init_supervisor(kind: str, v0: float,
                    config: SupervisorConfig) -> SupervisorState:
    """Initial supervisor state: interval containing |y(0)|, no switch yet."""
    if kind not in (DWELL, HYSTERESIS):
        raise ValueError(f"unknown supervisor kind {kind!r}")
    if not np.isfinite(v0) or v0 < 0:
        raise ValueError("initial output norm must be finite and non-negative")
    q = config.partition.index(v0)
    deadline = config.dwell_time_at(q, v0) if kind == DWELL else 0.0
    return SupervisorState(q=q, t_last_switch=0.0, kind=kind,
                           dwell_deadline=deadline)


def candidate_intervals(state: SupervisorState,
                        config: SupervisorConfig) -> tuple:
    """Intervals the supervisor may switch into, in tie-break order.

    Dwell-time switching may jump to any other interval; hysteresis only to
    the adjacent ones.
    """
    M = config.partition.M
    if state.kind == DWELL:
        return tuple(k for k in range(M + 1) if k != state.q)
    return tuple(k for k in (state.q - 1, state.q + 1) if 0 <= k <= M)


def _switch(state: SupervisorState, t: float, v: float, k: int,
            config: SupervisorConfig) -> SupervisorState:
    deadline = t + config.dwell_time_at(k, v) if state.kind == DWELL else 0.0
    return SupervisorState(q=k, t_last_switch=t, kind=state.kind,
                           dwell_deadline=deadline)


def dwell_step(state: SupervisorState, t: float, v: float,
               config: SupervisorConfig):
    """One dwell-supervisor decision at (t, |y(t)|).

    No switch before the dwell deadline; afterwards the first (smallest-k)
    switch band containing v wins.  Values inside the hysteresis set
    union_[chi_k, D_{k+1}) leave the signal unchanged.
    """
    if state.kind != DWELL:
        raise ValueError("state is not a dwell-supervisor state")
    if t < state.dwell_deadline:
        return state, False
    for k in candidate_intervals(state, config):
        if in_switch_band(v, k, config):
            return _switch(state, t, v, k, config), True
    return state, False


def hysteresis_step(state: SupervisorState, t: float, v: float,
                    config: SupervisorConfig):
    """One hysteresis-supervisor decision: adjacent bands only, no dwell gate."""
    if state.kind != HYSTERESIS:
        raise ValueError("state is not a hysteresis-supervisor state")
    for k in candidate_intervals(state, config):
        if in_switch_band(v, k, config):
            return _switch(state, t, v, k, config), True
    return state, False


def supervisor_step(state: SupervisorState, t: float, v: float,
                    config: SupervisorConfig):
    if state.kind == DWELL:
        return dwell_step(state, t, v, config)
    return hysteresis_step(state, t, v, config)
