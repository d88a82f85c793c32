"""Closed-loop simulation of the supervised switched system.

The state is integrated with fixed-step RK4; supervisor conditions are
re-evaluated after every accepted step and a switch inside a step is refined
by bisection on re-integrated sub-steps, so the new mode starts at the
located crossing time.  The state is never reset across switches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .integrate import IntegratorConfig, rk4_step
from .supervisors import DWELL, SupervisorState, candidate_intervals, init_supervisor
from .system import (ModeFamily, SupervisorConfig, SwitchEvent, SwitchLog,
                     in_switch_band)

_MAX_SWITCHES = 1_000_000


@dataclass
class Trajectory:
    """Sampled closed-loop run; all arrays share the time axis.

    controls has zero columns when the active modes declare no control.
    intervals/modes record the supervisor signal, continuous from the right.
    """

    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    controls: np.ndarray
    output_norms: np.ndarray
    intervals: np.ndarray
    modes: list

    def __len__(self) -> int:
        return len(self.times)


def _mode_field(family: ModeFamily, mode_key, d: Callable) -> Callable:
    rhs = family.modes[mode_key].rhs
    return lambda t, x: rhs(x, d(t))


def _find_switch_event(state: SupervisorState, config: SupervisorConfig,
                       flow_v: Callable[[float], float], t0: float, t1: float,
                       tol: float):
    """Earliest (t, k) in [t0, t1] at which the supervisor switches, or None.

    flow_v(tau) is |h(x(tau))| along the current-mode flow.  Membership of
    each candidate band is probed at the eligible-window endpoints and
    midpoint, then the entry instant is bisected to within tol.
    """
    if state.kind == DWELL:
        if state.dwell_deadline > t1:
            return None
        t_lo = max(t0, state.dwell_deadline)
    else:
        t_lo = t0
    candidates = candidate_intervals(state, config)
    if not candidates:
        return None

    cache: dict = {}

    def member(tau: float, k: int) -> bool:
        if tau not in cache:
            cache[tau] = flow_v(tau)
        return in_switch_band(cache[tau], k, config)

    t_mid = 0.5 * (t_lo + t1)
    best = None
    for k in candidates:
        if member(t_lo, k):
            tk = t_lo
        elif member(t_mid, k):
            tk = _bisect_entry(lambda tau: member(tau, k), t_lo, t_mid, tol)
        elif member(t1, k):
            tk = _bisect_entry(lambda tau: member(tau, k), t_mid, t1, tol)
        else:
            continue
        if best is None or tk < best[0] or (tk == best[0] and k < best[1]):
            best = (tk, k)
    return best


def _bisect_entry(member: Callable[[float], bool], a: float, b: float,
                  tol: float) -> float:
    """First time in (a, b] at which member turns true (member(a) is false)."""
    while (b - a) > tol:
        m = 0.5 * (a + b)
        if member(m):
            b = m
        else:
            a = m
    return b


def simulate(family: ModeFamily, config: SupervisorConfig, x0,
             d: Callable | None = None,
             cfg: IntegratorConfig = IntegratorConfig(),
             kind: str = DWELL,
             state0: SupervisorState | None = None):
    """Integrate the supervised switched closed loop from x0 over [0, t_end].

    Returns (Trajectory, SwitchLog).  d is a pointwise disturbance signal
    t -> R^m; None means no disturbance.
    """
    x = np.asarray(x0, dtype=float).ravel().copy()
    if x.size != family.state_dim:
        raise ValueError(f"x0 must have dimension {family.state_dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    if d is None:
        d = family.zero_disturbance()

    state = state0 if state0 is not None else init_supervisor(
        kind, family.output_norm(x), config)
    log = SwitchLog()

    times: list = []
    states: list = []
    outputs: list = []
    controls: list = []
    norms: list = []
    intervals: list = []
    modes: list = []

    def record(t, xv, st):
        mode_key = config.mode_assignment[st.q]
        ctrl = family.modes[mode_key].control
        times.append(t)
        states.append(xv)
        y = np.atleast_1d(family.output_map(xv)).astype(float)
        outputs.append(y)
        controls.append(np.atleast_1d(ctrl(xv)).astype(float)
                        if ctrl is not None else np.zeros(0))
        norms.append(float(np.linalg.norm(y)))
        intervals.append(st.q)
        modes.append(mode_key)

    def amend_last(st):
        mode_key = config.mode_assignment[st.q]
        ctrl = family.modes[mode_key].control
        controls[-1] = (np.atleast_1d(ctrl(states[-1])).astype(float)
                        if ctrl is not None else np.zeros(0))
        intervals[-1] = st.q
        modes[-1] = mode_key

    t = 0.0
    record(t, x, state)
    tol = cfg.event_tolerance
    while t < cfg.t_end - 1e-12:
        h = min(cfg.step_size, cfg.t_end - t)
        f = _mode_field(family, config.mode_assignment[state.q], d)
        x_next = rk4_step(f, t, x, h)

        def flow_v(tau, _t=t, _x=x, _f=f, _x_next=x_next, _h=h):
            if tau <= _t + 1e-15:
                return family.output_norm(_x)
            if tau >= _t + _h - 1e-15:
                return family.output_norm(_x_next)
            return family.output_norm(rk4_step(_f, _t, _x, tau - _t))

        event = _find_switch_event(state, config, flow_v, t, t + h, tol)
        if event is None:
            t = t + h
            x = x_next
            record(t, x, state)
            continue

        t_star, k = event
        if t_star > t + 1e-12:
            x = rk4_step(f, t, x, t_star - t)
            t = t_star
            new_sample = True
        else:
            new_sample = False
        v_star = family.output_norm(x)
        log.append(SwitchEvent(t=t, from_interval=state.q, to_interval=k))
        if len(log.events) > _MAX_SWITCHES:
            raise RuntimeError("switch count exceeded safety cap; "
                               "configuration is likely chattering")
        state = SupervisorState(
            q=k, t_last_switch=t, kind=state.kind,
            dwell_deadline=(t + config.dwell_time_at(k, v_star)
                            if state.kind == DWELL else 0.0))
        if new_sample:
            record(t, x, state)
        else:
            amend_last(state)

    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        outputs=np.asarray(outputs),
        controls=np.asarray(controls),
        output_norms=np.asarray(norms),
        intervals=np.asarray(intervals, dtype=int),
        modes=modes,
    ), log
