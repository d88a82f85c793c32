"""Hybrid pendulum observer: a lossless pendulum with a bank of Luenberger
observers (slow / median / fast gains) orchestrated by the dwell-time
supervisor on the observation-error norm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .bounds import GainFn, KLExp, lure_siios_estimate, solve_lyapunov_small
from .integrate import IntegratorConfig
from .simulate import Trajectory, simulate
from .supervisors import DWELL, HYSTERESIS
from .system import (Mode, ModeFamily, Partition, SupervisorConfig,
                     constant_dwell)

SLOW, MEDIAN, FAST = "slow", "median", "fast"


def gain_from_eigs(l1: float, l2: float) -> np.ndarray:
    """Observer gain [k1, k2] placing the error poles at -l1 and -l2."""
    return np.array([l1 + l2, l1 * l2])


def observer_error_matrix(gain) -> np.ndarray:
    """Error dynamics matrix G = A - K C of the position-measured observer."""
    k1, k2 = gain
    return np.array([[-k1, 1.0], [-k2, 0.0]])


@dataclass(frozen=True)
class PendulumObserverSetup:
    """Scenario of the hybrid-observer case study.

    Gains are keyed by mode name; alphas are the Lyapunov decay rates used to
    certify each observer (each must stay below twice the slowest pole).
    """

    omega: float = 1.0
    gains: Mapping[str, tuple] = field(default_factory=lambda: {
        SLOW: (2.0, 1.0), MEDIAN: (6.0, 9.0), FAST: (10.0, 25.0)})
    alphas: Mapping[str, float] = field(default_factory=lambda: {
        SLOW: 1.0, MEDIAN: 3.0, FAST: 5.0})
    partition: tuple = (0.0, 0.1, 2.0, 5.0)
    mode_assignment: tuple = (MEDIAN, FAST, MEDIAN, SLOW)
    chi: tuple = (0.05, 1.0, 3.0, 8.0)
    t_min: float = 0.01
    disturbance_amplitude: float = 0.05
    disturbance_frequency: float = 0.3
    x0: tuple = (0.1, 0.0)
    e0: tuple = (3.0, -4.0)

    def initial_state(self) -> np.ndarray:
        """Plant at x0, observer offset by the initial error e0."""
        x1, x2 = self.x0
        e1, e2 = self.e0
        return np.array([x1, x2, x1 - e1, x2 - e2])

    def disturbance(self):
        amp, freq = self.disturbance_amplitude, self.disturbance_frequency
        return lambda t: np.array([amp * math.sin(freq * t)])


def _coupled_rhs(gain, omega: float):
    k1, k2 = gain
    w2 = omega * omega

    def rhs(x, d):
        x1, x2, z1, z2 = x
        acc = -w2 * math.sin(x1)
        innov = x1 - z1
        return np.array([x2, acc + d[0], z2 + k1 * innov, acc + k2 * innov])

    return rhs


def _error_output(x):
    return np.array([x[0] - x[2], x[1] - x[3]])


def pendulum_family(setup: PendulumObserverSetup) -> ModeFamily:
    """Plant-plus-observer modes, one per gain, with output e = x - z."""
    modes = {name: Mode(rhs=_coupled_rhs(gain, setup.omega))
             for name, gain in setup.gains.items()}
    return ModeFamily(modes=modes, state_dim=4, disturbance_dim=1,
                      output_map=_error_output)


def pendulum_config(setup: PendulumObserverSetup,
                    dwell: float | None = None) -> SupervisorConfig:
    part = Partition(setup.partition)
    tau = setup.t_min if dwell is None else dwell
    return SupervisorConfig(partition=part,
                            mode_assignment=setup.mode_assignment,
                            chi=setup.chi,
                            dwell=constant_dwell(tau, part),
                            t_min=tau)


def single_observer_config(setup: PendulumObserverSetup,
                           name: str) -> SupervisorConfig:
    """Degenerate one-interval config pinning a single observer gain."""
    part = Partition((0.0,))
    return SupervisorConfig(partition=part, mode_assignment=(name,),
                            chi=(1.0,), dwell=None)


def pendulum_siios(setup: PendulumObserverSetup):
    """Per-mode exponential transient bounds and the common disturbance gain.

    Each observer's certificate P is solved from its error matrix and decay
    rate; the gain takes the worst constant over the bank, as the shared
    class-K gain requires.
    """
    b_mat = np.array([[0.0], [1.0]])
    betas: dict = {}
    worst_c = 0.0
    for name, gain in setup.gains.items():
        alpha = setup.alphas[name]
        P = solve_lyapunov_small(observer_error_matrix(gain), alpha)
        beta, g = lure_siios_estimate(P, alpha, b_mat)
        betas[name] = beta
        worst_c = max(worst_c, g.c)
    return betas, GainFn(c=worst_c)


def run_pendulum(setup: PendulumObserverSetup, observer: str = "hybrid",
                 cfg: IntegratorConfig = IntegratorConfig(t_end=10.0),
                 dwell: float | None = None, disturbed: bool = True):
    """Simulate one observer choice; 'hybrid' engages the dwell supervisor."""
    family = pendulum_family(setup)
    d = setup.disturbance() if disturbed else None
    if observer == "hybrid":
        config = pendulum_config(setup, dwell=dwell)
        return simulate(family, config, setup.initial_state(), d=d, cfg=cfg,
                        kind=DWELL)
    if observer not in setup.gains:
        raise ValueError(f"unknown observer {observer!r}")
    config = single_observer_config(setup, observer)
    return simulate(family, config, setup.initial_state(), d=d, cfg=cfg,
                    kind=HYSTERESIS)


def time_to_error_level(traj: Trajectory, level: float) -> float:
    """First sampled time with |e| <= level (inf if never reached)."""
    hits = np.flatnonzero(traj.output_norms <= level)
    return float(traj.times[hits[0]]) if hits.size else math.inf
