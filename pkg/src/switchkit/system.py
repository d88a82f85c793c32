"""Mode families, output-norm partitions, the generalized disturbance norm,
and switch-log accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np


def identity(s: float) -> float:
    return s


@dataclass(frozen=True)
class Mode:
    """One member of the switched family.

    rhs(x, d) returns dx/dt; control(x), when present, returns the control
    vector the mode applies at state x (used for effort accounting only).
    """

    rhs: Callable
    control: Callable | None = None


@dataclass(frozen=True)
class ModeFamily:
    """Indexed family of vector fields sharing one output map h(x)."""

    modes: Mapping[Hashable, Mode]
    state_dim: int
    disturbance_dim: int
    output_map: Callable

    def __post_init__(self):
        if not self.modes:
            raise ValueError("family needs at least one mode")

    def output_norm(self, x) -> float:
        return float(np.linalg.norm(np.atleast_1d(self.output_map(x))))

    def zero_disturbance(self) -> Callable:
        d0 = np.zeros(self.disturbance_dim)
        return lambda t: d0


@dataclass(frozen=True)
class GeneralizedNormParams:
    """Weights of the disturbance norm a*int(omega(|d|)) + b*sup|d|."""

    a: float = 0.0
    b: float = 1.0
    omega: Callable[[float], float] = identity

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.a + self.b <= 0:
            raise ValueError("need a >= 0, b >= 0 and a + b > 0")


#: Essential-supremum norm, the default disturbance measure.
SUP_NORM = GeneralizedNormParams()


def s_norm(d: Callable, t0: float, t: float,
           params: GeneralizedNormParams = SUP_NORM,
           grid: float = 1e-3) -> float:
    """Generalized disturbance norm of d over [t0, t] on a sample grid."""
    if t < t0:
        raise ValueError("t must be >= t0")
    if grid <= 0:
        raise ValueError("grid must be positive")
    # Anchor samples at t0 so enlarging the window only adds samples; this
    # keeps the computed norm non-decreasing in t.
    n = int(math.floor((t - t0) / grid + 1e-12))
    ts = t0 + grid * np.arange(n + 1)
    if ts[-1] < t - 1e-12 * max(1.0, abs(t)):
        ts = np.append(ts, t)
    mags = np.array([np.linalg.norm(np.atleast_1d(d(tau))) for tau in ts])
    sup = float(mags.max())
    if params.a > 0:
        w = np.array([params.omega(m) for m in mags])
        integral = float(np.trapezoid(w, ts))
    else:
        integral = 0.0
    value = params.a * integral + params.b * sup
    if not np.isfinite(value):
        raise ValueError("disturbance norm is not finite on the window")
    return value


@dataclass(frozen=True)
class Partition:
    """Strictly increasing output-norm thresholds 0 = D_0 < D_1 < ... < D_M.

    The implicit top threshold D_{M+1} is +inf.
    """

    thresholds: tuple

    def __post_init__(self):
        th = tuple(float(v) for v in self.thresholds)
        object.__setattr__(self, "thresholds", th)
        if not th or th[0] != 0.0:
            raise ValueError("partition must start at 0")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("partition thresholds must be strictly increasing")

    @property
    def M(self) -> int:
        return len(self.thresholds) - 1

    def upper(self, q: int) -> float:
        """D_{q+1}, +inf for the top interval."""
        return self.thresholds[q + 1] if q < self.M else math.inf

    def index(self, v: float) -> int:
        """The unique q with v in [D_q, D_{q+1})."""
        if not np.isfinite(v) or v < 0:
            raise ValueError("output norm must be finite and non-negative")
        return int(np.searchsorted(self.thresholds, v, side="right")) - 1


def interval_index(v: float, partition: Partition) -> int:
    return partition.index(v)


@dataclass(frozen=True)
class SupervisorConfig:
    """Partition, mode assignment, hysteresis bands and dwell-time functions.

    chi[q] is the switch-band cap for interval q (the value chi_{theta_q}
    evaluated at D_{q+1}); the top entry is a finite re-entry cap above D_M.
    dwell[q] maps an output norm in [D_q, D_{q+1}) to a dwell time; it is
    unused by the hysteresis supervisor and may be None in that case.
    """

    partition: Partition
    mode_assignment: tuple
    chi: tuple
    dwell: tuple | None = None
    t_min: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "mode_assignment", tuple(self.mode_assignment))
        object.__setattr__(self, "chi", tuple(float(c) for c in self.chi))
        if self.dwell is not None:
            object.__setattr__(self, "dwell", tuple(self.dwell))
        n = self.partition.M + 1
        if len(self.mode_assignment) != n:
            raise ValueError("mode_assignment must give one mode per interval")
        if len(self.chi) != n:
            raise ValueError("chi must give one value per interval")
        if self.dwell is not None and len(self.dwell) != n:
            raise ValueError("dwell must give one function per interval")

    def dwell_time_at(self, k: int, v: float) -> float:
        """T_k evaluated at v, clamped into the interval's domain.

        The top interval's unbounded domain is capped at 10*D_M so the
        dwell stays bounded.
        """
        if self.dwell is None:
            raise ValueError("config carries no dwell-time functions")
        th = self.partition.thresholds
        lo = th[k]
        if k < self.partition.M:
            hi = th[k + 1]
        else:
            hi = 10.0 * th[-1] if th[-1] > 0 else max(v, lo)
        return float(self.dwell[k](min(max(v, lo), hi)))


def default_chi(partition: Partition, factor: float = 0.8,
                top: float | None = None) -> tuple:
    """Hysteresis band caps at a fixed fraction of each interval's span.

    Used when no KL data is available to invert; top defaults to 2*D_M.
    """
    if not 0 < factor < 1:
        raise ValueError("factor must lie in (0, 1)")
    th = partition.thresholds
    chi = [th[q] + factor * (th[q + 1] - th[q]) for q in range(partition.M)]
    if top is None:
        top = 2.0 * th[-1] if th[-1] > 0 else 1.0
    chi.append(float(top))
    return tuple(chi)


def constant_dwell(tau: float, partition: Partition) -> tuple:
    """Constant dwell-time functions T_q(s) = tau for every interval."""
    if tau <= 0:
        raise ValueError("dwell time must be positive")
    return tuple((lambda s, _tau=tau: _tau) for _ in range(partition.M + 1))


def in_switch_band(v: float, k: int, config: SupervisorConfig) -> bool:
    """True iff v lies in the switch band [D_k, chi_k) of interval k."""
    return config.partition.thresholds[k] <= v < config.chi[k]


@dataclass(frozen=True)
class SwitchEvent:
    t: float
    from_interval: int
    to_interval: int


@dataclass
class SwitchLog:
    """Time-ordered switching events plus the average-dwell offset."""

    events: list = field(default_factory=list)
    n0: int = 1

    def append(self, event: SwitchEvent) -> None:
        if self.events and event.t <= self.events[-1].t:
            raise ValueError("switch times must be strictly increasing")
        self.events.append(event)

    def times(self) -> np.ndarray:
        return np.array([e.t for e in self.events])


def count_switches(log: SwitchLog, t1: float, t2: float) -> int:
    """Number of switches in the half-open window [t1, t2)."""
    if t1 < 0 or t2 < t1:
        raise ValueError("need 0 <= t1 <= t2")
    return sum(1 for e in log.events if t1 <= e.t < t2)


def average_dwell(log: SwitchLog, tau_d: float, n0: int) -> bool:
    """Check N_[t1,t2) <= n0 + (t2 - t1)/tau_d over every window.

    The binding windows start and end at event times, so checking all event
    pairs (with the right endpoint just past the later event) is sufficient.
    """
    if tau_d <= 0:
        raise ValueError("tau_d must be positive")
    ts = [e.t for e in log.events]
    for i in range(len(ts)):
        for j in range(i, len(ts)):
            n = j - i + 1
            if n > n0 + (ts[j] - ts[i]) / tau_d:
                return False
    return True


def validate_config(family: ModeFamily, config: SupervisorConfig,
                    betas: Mapping[Hashable, "KLExp"] | None = None,
                    n_samples: int = 64) -> list:
    """Check the standing configuration conditions; violations are data.

    betas maps each assigned mode to its exponential KL transient bound; when
    None the overshoot inequality is skipped (no KL data available).
    """
    violations = []
    part = config.partition
    th = part.thresholds
    M = part.M
    for q, mode in enumerate(config.mode_assignment):
        if mode not in family.modes:
            violations.append(f"interval {q}: assigned mode {mode!r} not in family")
    if betas is not None:
        for q in range(M):
            mode = config.mode_assignment[q]
            if mode not in betas:
                violations.append(f"interval {q}: no KL bound for mode {mode!r}")
                continue
            overshoot = betas[mode](th[q + 1], 0.0)
            cap = part.upper(q + 1)
            if overshoot > cap:
                violations.append(
                    f"interval {q}: overshoot {overshoot:.6g} from D_{q+1} "
                    f"exceeds D_{q+2} = {cap:.6g}")
    for q in range(M + 1):
        lo, hi = th[q], part.upper(q)
        if not (lo < config.chi[q]):
            violations.append(f"interval {q}: chi must exceed D_{q}")
        if q < M and not (config.chi[q] < hi):
            violations.append(f"interval {q}: chi must stay below D_{q+1}")
    if config.dwell is not None:
        if config.t_min <= 0:
            violations.append("t_min must be positive")
        for q in range(M + 1):
            hi = th[q + 1] if q < M else (10.0 * th[-1] if th[-1] > 0 else th[q] + 1.0)
            samples = np.linspace(th[q], hi, n_samples, endpoint=False)
            vals = np.array([config.dwell_time_at(q, s) for s in samples])
            if not np.all(np.isfinite(vals)):
                violations.append(f"interval {q}: dwell time is unbounded")
            elif vals.min() < config.t_min:
                violations.append(
                    f"interval {q}: dwell time falls below t_min "
                    f"({vals.min():.6g} < {config.t_min:.6g})")
    return violations
