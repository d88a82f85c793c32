"""Fixed-step RK4 integration and bisection-based event location."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class IntegrationError(RuntimeError):
    """State became non-finite during integration.

    Carries ``t_last``, the last time at which the state was still valid.
    """

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last valid time t = {t_last:.6g})")
        self.t_last = t_last


class NoCrossingError(ValueError):
    """The bracket handed to locate_crossing contains no sign change."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    step_size and event_tolerance are in seconds; the event tolerance must be
    strictly smaller than the step so a crossing can be refined inside a step.
    """

    step_size: float = 1e-3
    event_tolerance: float = 1e-6
    t_end: float = 10.0

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if not 0 < self.event_tolerance < self.step_size:
            raise ValueError("event_tolerance must lie in (0, step_size)")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")


def rk4_step(f: Callable, t: float, x, h: float):
    """One classical 4-stage Runge-Kutta step for dx/dt = f(t, x).

    Raises IntegrationError if the update is not finite.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = f(t + h, x + h * k3)
    x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise IntegrationError("non-finite state produced by RK4 step", t)
    return x_new


def locate_crossing(g: Callable[[float], float], t_lo: float, t_hi: float,
                    tol: float) -> float:
    """Bisect for a root of the scalar function g on [t_lo, t_hi].

    Requires g(t_lo) and g(t_hi) to have opposite signs (or one of them to be
    zero); returns a time within tol of the crossing.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g_lo = g(t_lo)
    g_hi = g(t_hi)
    if g_lo == 0.0:
        return t_lo
    if g_hi == 0.0:
        return t_hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise NoCrossingError("no crossing in bracket")
    while (t_hi - t_lo) > tol:
        t_mid = 0.5 * (t_lo + t_hi)
        g_mid = g(t_mid)
        if g_mid == 0.0:
            return t_mid
        if np.sign(g_mid) == np.sign(g_lo):
            t_lo = t_mid
        else:
            t_hi = t_mid
    return 0.5 * (t_lo + t_hi)
