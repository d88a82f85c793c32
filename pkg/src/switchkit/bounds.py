"""Exponential class-KL/K algebra, dwell-time constructions, trajectory bound
monitors, convergence-time estimates and the switching-threshold optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping

import numpy as np

from .simulate import Trajectory
from .system import GeneralizedNormParams, SUP_NORM, SupervisorConfig


class InfeasibleError(ValueError):
    """A closed-form construction has no solution for the given data."""


@dataclass(frozen=True)
class KLExp:
    """Exponential class-KL bound beta(s, r) = a * s * exp(-b * r)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 1.0:
            raise ValueError("overshoot coefficient a must be >= 1")
        if self.b <= 0.0:
            raise ValueError("decay rate b must be positive")

    def __call__(self, s: float, r: float) -> float:
        return self.a * s * math.exp(-self.b * r)


@dataclass(frozen=True)
class GainFn:
    """Linear class-K disturbance gain gamma(s) = c * s."""

    c: float

    def __post_init__(self):
        if self.c < 0.0:
            raise ValueError("gain must be non-negative")

    def __call__(self, s):
        return self.c * s


def chi(beta: KLExp) -> Callable[[float], float]:
    """Inverse of the zero-time overshoot: the map s -> s / a."""
    return lambda s: s / beta.a


def time_to_level(beta: KLExp, s: float, level: float) -> float:
    """Time for the bound a*s*exp(-b*t) to reach the given level (0 if already below)."""
    if level <= 0:
        raise ValueError("level must be positive")
    if s <= 0 or beta.a * s <= level:
        return 0.0
    return math.log(beta.a * s / level) / beta.b


def dwell_from_beta(beta: KLExp, s: float, target: float,
                    margin: float = 0.0) -> float:
    """Smallest T >= 0 with a*s*exp(-b*T) + margin = target.

    margin is a disturbance allowance gamma(D_q); it must leave the target
    reachable.
    """
    if target - margin <= 0:
        raise InfeasibleError("target must exceed the disturbance margin")
    if s <= 0 or beta.a * s <= target - margin:
        return 0.0
    return math.log(beta.a * s / (target - margin)) / beta.b


def corollary_dwell_functions(betas: Mapping[Hashable, KLExp],
                              config: SupervisorConfig) -> tuple:
    """Dwell-time functions realizing the convergence-time construction.

    T_0 is the constant artificial dwell (half the zero-time overshoot of
    D_1 as target); for q >= 1, T_q(s) is the time for mode theta_q's bound
    to decay from s to the switch-band cap D_q / a_{theta_{q-1}}.
    """
    part = config.partition
    th = part.thresholds
    if part.M < 1:
        raise ValueError("need at least two intervals")
    beta0 = betas[config.mode_assignment[0]]
    t0_const = dwell_from_beta(beta0, th[1], 0.5 * beta0.a * th[1])
    funcs = [lambda s, _c=t0_const: _c]
    for q in range(1, part.M + 1):
        bq = betas[config.mode_assignment[q]]
        bprev = betas[config.mode_assignment[q - 1]]
        target = th[q] / bprev.a
        funcs.append(lambda s, _b=bq, _t=target: dwell_from_beta(_b, s, _t))
    return tuple(funcs)


def convergence_time_bound(config: SupervisorConfig, r: int,
                           variant: str = "corollary1") -> float:
    """Upper bound on the time for |y| to reach 0.5*D_1 from interval r, d = 0.

    The dwell functions of the config must be the convergence-time
    construction (see corollary_dwell_functions).  The hysteresis variant
    adds the two extra interval traversals its weaker estimate allows.
    """
    if variant not in ("corollary1", "corollary3"):
        raise ValueError(f"unknown variant {variant!r}")
    part = config.partition

    def T(k: int) -> float:
        k = min(k, part.M)
        # D_{k+1}; the infinite top threshold is clamped inside dwell_time_at
        return config.dwell_time_at(k, part.upper(k))

    total = sum(T(k) for k in range(r + 1))
    if variant == "corollary3":
        total += T(r) + T(r + 1)
    return total


def optimal_threshold(beta1: KLExp, beta0: KLExp, s: float, eps: float,
                      n_grid: int = 1000):
    """Grid argmin of the two-mode convergence time over thresholds in (eps, s].

    Mode 1 runs from s down to the threshold, mode 0 from the threshold down
    to eps; ties break toward the smaller threshold.  Returns (threshold,
    total time).
    """
    if not 0 < eps < s:
        raise ValueError("need 0 < eps < s")
    if n_grid < 1:
        raise InfeasibleError("empty threshold grid")
    grid = np.linspace(eps, s, n_grid + 1)[1:]
    totals = np.array([time_to_level(beta1, s, dl) + time_to_level(beta0, dl, eps)
                       for dl in grid])
    tol = 1e-12 * max(1.0, float(np.abs(totals).max()))
    best = int(np.flatnonzero(totals <= totals.min() + tol)[0])
    return float(grid[best]), float(totals[best])


def solve_lyapunov_small(G, alpha: float):
    """Solve (G + a/2 I)^T P + P (G + a/2 I) = -I for small n.

    The solution certifies G^T P + P G <= -alpha P; requires every eigenvalue
    of G to have real part below -alpha/2.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    if G.shape != (n, n) or n > 4:
        raise ValueError("G must be square with n <= 4")
    H = G + 0.5 * alpha * np.eye(n)
    if np.max(np.linalg.eigvals(H).real) >= 0:
        raise InfeasibleError("eigenvalues of G must have real part < -alpha/2")
    A = np.kron(np.eye(n), H.T) + np.kron(H.T, np.eye(n))
    p = np.linalg.solve(A, -np.eye(n).ravel())
    P = p.reshape(n, n)
    P = 0.5 * (P + P.T)
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise InfeasibleError("solved P is not positive definite")
    return P


def lure_siios_estimate(P, alpha: float, B):
    """Exponential transient bound and linear gain from a Lyapunov certificate.

    For error dynamics with certificate matrix P and decay alpha driven
    through input matrix B, the transient overshoot is sqrt(2*cond(P)) with
    rate alpha/4, and the disturbance gain is 2*rho*sigma_max(B) with
    rho = sigma_max(P) / (sqrt(alpha) * lambda_min(P)).
    """
    P = np.asarray(P, dtype=float)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    eigs = np.linalg.eigvalsh(P)
    if eigs[0] <= 0:
        raise ValueError("P must be positive definite")
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    sig_p = float(np.linalg.svd(P, compute_uv=False)[0])
    sig_b = float(np.linalg.svd(np.atleast_2d(np.asarray(B, dtype=float)),
                                compute_uv=False)[0])
    a = math.sqrt(2.0 * lam_max / lam_min)
    b = 0.25 * alpha
    rho = sig_p / (math.sqrt(alpha) * lam_min)
    return KLExp(a=a, b=b), GainFn(c=2.0 * rho * sig_b)


def _cumulative_s_norm(times: np.ndarray, d: Callable,
                       params: GeneralizedNormParams) -> np.ndarray:
    mags = np.array([np.linalg.norm(np.atleast_1d(d(t))) for t in times])
    sup = np.maximum.accumulate(mags)
    if params.a > 0:
        w = np.array([params.omega(m) for m in mags])
        integral = np.concatenate(
            ([0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(times))))
    else:
        integral = 0.0
    return params.a * integral + params.b * sup


def _monitor_margins(traj: Trajectory, d, betas, gamma, config,
                     norm_params, v0, double_top: bool) -> np.ndarray:
    if d is None:
        d = lambda t: 0.0
    if v0 is None:
        v0 = float(traj.output_norms[0])
    a_bar = max(beta.a for beta in betas.values())
    delta_m = config.partition.thresholds[-1]
    scale = 2.0 if double_top else 1.0
    transient = a_bar * max(scale * delta_m, v0)
    s = _cumulative_s_norm(traj.times, d, norm_params)
    g = gamma(s)
    if double_top:
        a_top = betas[config.mode_assignment[-1]].a
        g = g + a_top * (2.0 * g)
    return transient + g - traj.output_norms


def theorem1_margins(traj: Trajectory, d, betas: Mapping[Hashable, KLExp],
                     gamma: GainFn, config: SupervisorConfig,
                     norm_params: GeneralizedNormParams = SUP_NORM,
                     v0: float | None = None) -> np.ndarray:
    """Per-sample slack of the dwell-supervised output bound (>= 0 certifies it)."""
    return _monitor_margins(traj, d, betas, gamma, config, norm_params, v0,
                            double_top=True)


def theorem2_margins(traj: Trajectory, d, betas: Mapping[Hashable, KLExp],
                     gamma: GainFn, config: SupervisorConfig,
                     norm_params: GeneralizedNormParams = SUP_NORM,
                     v0: float | None = None) -> np.ndarray:
    """Per-sample slack of the tighter hysteresis-supervised output bound."""
    return _monitor_margins(traj, d, betas, gamma, config, norm_params, v0,
                            double_top=False)


def theorem1_monitor(traj, d, betas, gamma, config,
                     norm_params=SUP_NORM, v0=None) -> float:
    """Worst-case (minimum) margin of the dwell-supervised bound."""
    return float(theorem1_margins(traj, d, betas, gamma, config,
                                  norm_params, v0).min())


def theorem2_monitor(traj, d, betas, gamma, config,
                     norm_params=SUP_NORM, v0=None) -> float:
    """Worst-case (minimum) margin of the hysteresis-supervised bound."""
    return float(theorem2_margins(traj, d, betas, gamma, config,
                                  norm_params, v0).min())
