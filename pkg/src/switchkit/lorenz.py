"""Master-slave synchronization of two Lorenz oscillators under three
controls (cancellation, local linear feedback, no control), supervised by the
hysteresis rule on the synchronization-error norm, plus the performance
functionals used to compare them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate import IntegratorConfig
from .simulate import Trajectory, simulate
from .supervisors import HYSTERESIS
from .system import (Mode, ModeFamily, Partition, SupervisorConfig,
                     default_chi)

CANCEL, LINEAR, NO_CONTROL = 1, 2, 3

CONTROL_NAMES = {CANCEL: "cancel", LINEAR: "linear", NO_CONTROL: "none"}

#: Small and large initial deviations: master (x1, y1, z1), slave (x2, y2, z2).
IC_SMALL = (0.1, 0.0, 0.0, -1.0, 1.0, -1.0)
IC_LARGE = (0.1, 0.0, 0.0, -10.0, 10.0, -10.0)


@dataclass(frozen=True)
class LorenzSetup:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    lam: float = 0.1
    alpha: float = 28.0
    partition: tuple = (0.0, 0.1, 1.0, 5.0)
    mode_assignment: tuple = (NO_CONTROL, LINEAR, CANCEL, NO_CONTROL)
    chi_factor: float = 0.8
    horizon: float = 30.0

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError("lam must lie in (0, 1)")
        if min(self.sigma, self.rho, self.beta) <= 0:
            raise ValueError("Lorenz parameters must be positive")


def standard_disturbance(t: float) -> np.ndarray:
    return np.array([5.0 * math.sin(0.5 * t),
                     -5.0 * math.cos(0.1 * t),
                     2.5 * math.sin(t)])


def sync_error(x) -> np.ndarray:
    return x[:3] - x[3:]


def control_input(setup: LorenzSetup, control: int, x) -> np.ndarray:
    """Slave control (u1, u2) for one of the three laws."""
    if control == NO_CONTROL:
        return np.zeros(2)
    e1 = x[0] - x[3]
    if control == LINEAR:
        return np.array([setup.alpha * e1, 0.0])
    y2, z2 = x[4], x[5]
    gain = setup.rho + setup.sigma - 2.0 * math.sqrt((1.0 - setup.lam) * setup.sigma) - z2
    return np.array([gain * e1, y2 * e1])


def _coupled_rhs(setup: LorenzSetup, control: int):
    sigma, rho, beta = setup.sigma, setup.rho, setup.beta

    def rhs(x, d):
        x1, y1, z1, x2, y2, z2 = x
        u1, u2 = control_input(setup, control, x)
        return np.array([
            sigma * (y1 - x1) + d[0],
            x1 * (rho - z1) - y1 + d[1],
            x1 * y1 - beta * z1 + d[2],
            sigma * (y2 - x2),
            x2 * (rho - z2) - y2 + u1,
            x2 * y2 - beta * z2 + u2,
        ])

    return rhs


def lorenz_family(setup: LorenzSetup) -> ModeFamily:
    modes = {c: Mode(rhs=_coupled_rhs(setup, c),
                     control=lambda x, _c=c, _s=setup: control_input(_s, _c, x))
             for c in (CANCEL, LINEAR, NO_CONTROL)}
    return ModeFamily(modes=modes, state_dim=6, disturbance_dim=3,
                      output_map=sync_error)


def lorenz_config(setup: LorenzSetup) -> SupervisorConfig:
    part = Partition(setup.partition)
    return SupervisorConfig(partition=part,
                            mode_assignment=setup.mode_assignment,
                            chi=default_chi(part, factor=setup.chi_factor),
                            dwell=None)


def single_control_config(control: int) -> SupervisorConfig:
    part = Partition((0.0,))
    return SupervisorConfig(partition=part, mode_assignment=(control,),
                            chi=(1.0,), dwell=None)


def linear_error_matrix(setup: LorenzSetup,
                        alpha: float | None = None) -> np.ndarray:
    """Error-dynamics matrix under the local linear control."""
    if alpha is None:
        alpha = setup.alpha
    return np.array([[-setup.sigma, setup.sigma, 0.0],
                     [setup.rho - alpha, -1.0, 0.0],
                     [0.0, 0.0, -setup.beta]])


def lyapunov_rate_deficit(setup: LorenzSetup, traj: Trajectory,
                          fd_step: float = 1e-6) -> np.ndarray:
    """Slack of the cancellation-control Lyapunov decrease at every sample.

    Returns dV/dt + lam*sigma*e1^2 + (sqrt((1-lam)*sigma)*e1 - e2)^2
    + beta*e3^2 per sample (non-positive up to numerical error when the
    inequality holds); dV/dt is a central difference of V = 0.5*e'e along
    the undisturbed cancellation-control flow through each sample.
    """
    from .integrate import rk4_step

    rhs = _coupled_rhs(setup, CANCEL)
    d0 = np.zeros(3)
    f = lambda t, x: rhs(x, d0)
    s_bar = math.sqrt((1.0 - setup.lam) * setup.sigma)
    out = np.empty(len(traj))
    for i, x in enumerate(traj.states):
        x_fwd = rk4_step(f, 0.0, x, fd_step)
        x_bwd = rk4_step(lambda t, xv: -rhs(xv, d0), 0.0, x, fd_step)
        v_fwd = 0.5 * float(sync_error(x_fwd) @ sync_error(x_fwd))
        v_bwd = 0.5 * float(sync_error(x_bwd) @ sync_error(x_bwd))
        vdot = (v_fwd - v_bwd) / (2.0 * fd_step)
        e1, e2, e3 = sync_error(x)
        out[i] = (vdot + setup.lam * setup.sigma * e1 * e1
                  + (s_bar * e1 - e2) ** 2 + setup.beta * e3 * e3)
    return out


def performance(traj: Trajectory, horizon: float) -> tuple:
    """(J_e, J_a, J_u): mean squared error, its terminal-window variant
    scaled by 10, and mean squared control effort, by trapezoid quadrature."""
    t = traj.times
    if t[-1] < horizon - 1e-9:
        raise ValueError("trajectory does not span the horizon")
    e2 = traj.output_norms ** 2
    u2 = (np.einsum("ij,ij->i", traj.controls, traj.controls)
          if traj.controls.size else np.zeros(len(traj)))
    j_e = float(np.trapezoid(e2, t)) / horizon
    j_u = float(np.trapezoid(u2, t)) / horizon

    t_tail = 0.9 * horizon
    mask = t > t_tail
    tt = np.concatenate(([t_tail], t[mask]))
    ee = np.concatenate(([np.interp(t_tail, t, e2)], e2[mask]))
    j_a = 10.0 * float(np.trapezoid(ee, tt)) / horizon
    return j_e, j_a, j_u


def run_lorenz_cell(control: str, ic: str, disturbed: bool,
                    setup: LorenzSetup = LorenzSetup(),
                    step: float = 1e-3) -> dict:
    """One table cell: control in {cancel, linear, none, supervisor},
    ic in {small, large}.  Returns the performance row plus switch count."""
    x0 = {"small": IC_SMALL, "large": IC_LARGE}[ic]
    family = lorenz_family(setup)
    d = standard_disturbance if disturbed else None
    cfg = IntegratorConfig(step_size=step, event_tolerance=min(1e-6, step / 10),
                           t_end=setup.horizon)
    if control == "supervisor":
        config = lorenz_config(setup)
    else:
        by_name = {v: k for k, v in CONTROL_NAMES.items()}
        config = single_control_config(by_name[control])
    traj, log = simulate(family, config, x0, d=d, cfg=cfg, kind=HYSTERESIS)
    j_e, j_a, j_u = performance(traj, setup.horizon)
    return {"control": control, "ic": ic, "disturbed": disturbed,
            "J_e": j_e, "J_a": j_a, "J_u": j_u,
            "switches": len(log.events)}
