import math

import numpy as np
import pytest

from switchkit import (GainFn, InfeasibleError, KLExp, Partition,
                       SupervisorConfig, chi, convergence_time_bound,
                       dwell_from_beta, lure_siios_estimate, optimal_threshold,
                       solve_lyapunov_small, time_to_level)
from switchkit.bounds import corollary_dwell_functions
from switchkit.pendulum import gain_from_eigs, observer_error_matrix


def test_klexp_validation_and_shape():
    beta = KLExp(a=2.0, b=1.0)
    assert beta(3.0, 0.0) == pytest.approx(6.0)
    assert beta(3.0, math.log(2.0)) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        KLExp(a=0.5, b=1.0)
    with pytest.raises(ValueError):
        KLExp(a=2.0, b=0.0)


def test_gainfn():
    g = GainFn(c=3.0)
    assert g(0.0) == 0.0 and g(2.0) == 6.0
    with pytest.raises(ValueError):
        GainFn(c=-1.0)


def test_chi_examples():
    assert chi(KLExp(a=2.0, b=1.0))(1.0) == pytest.approx(0.5)
    assert chi(KLExp(a=1.0, b=1.0))(0.7) == pytest.approx(0.7)


def test_chi_is_inverse_of_zero_time_overshoot():
    rng = np.random.default_rng(11)
    for _ in range(100):
        beta = KLExp(a=float(rng.uniform(1.0, 10.0)), b=1.0)
        s = float(rng.uniform(0.01, 100.0))
        assert beta(chi(beta)(s), 0.0) == pytest.approx(s, rel=1e-14)


def test_time_to_level_examples():
    assert time_to_level(KLExp(a=1.0, b=1.0), math.e, 1.0) == pytest.approx(1.0)
    assert time_to_level(KLExp(a=1.0, b=1.0), 0.5, 1.0) == 0.0
    assert time_to_level(KLExp(a=2.0, b=0.25), 4.0, 0.1) == pytest.approx(4.0 * math.log(80.0))
    with pytest.raises(ValueError):
        time_to_level(KLExp(a=1.0, b=1.0), 1.0, 0.0)


def test_dwell_from_beta_examples():
    beta = KLExp(a=2.0, b=1.0)
    assert dwell_from_beta(beta, 1.0, 0.5) == pytest.approx(math.log(4.0))
    assert dwell_from_beta(beta, 1.0, 0.5, margin=0.25) == pytest.approx(math.log(8.0))
    assert dwell_from_beta(beta, 0.1, 0.5) == 0.0  # already below target
    with pytest.raises(InfeasibleError):
        dwell_from_beta(beta, 1.0, 0.5, margin=0.5)


def test_dwell_from_beta_solves_the_equation():
    rng = np.random.default_rng(5)
    for _ in range(50):
        beta = KLExp(a=float(rng.uniform(1.0, 5.0)), b=float(rng.uniform(0.2, 3.0)))
        s = float(rng.uniform(0.5, 10.0))
        margin = float(rng.uniform(0.0, 0.2))
        target = float(rng.uniform(margin + 0.05, margin + 0.5))
        T = dwell_from_beta(beta, s, target, margin)
        if T > 0:
            assert beta(s, T) + margin == pytest.approx(target, abs=1e-12)


def _corollary_config(a_vals=(1.5, 1.3, 1.2), b_vals=(1.0, 0.8, 0.6),
                      thresholds=(0.0, 1.0, 3.0)):
    from switchkit import default_chi

    part = Partition(thresholds)
    names = tuple(f"m{q}" for q in range(part.M + 1))
    betas = {n: KLExp(a=a, b=b) for n, a, b in zip(names, a_vals, b_vals)}
    probe = SupervisorConfig(partition=part, mode_assignment=names,
                             chi=default_chi(part), dwell=None)
    dwell = corollary_dwell_functions(betas, probe)
    config = SupervisorConfig(partition=part, mode_assignment=names,
                              chi=probe.chi, dwell=dwell, t_min=1e-6)
    return config, betas


def test_corollary_dwell_functions_closed_form():
    config, betas = _corollary_config()
    part = config.partition
    # T_0 is constant: decay from D_1 to half the zero-time overshoot.
    assert config.dwell_time_at(0, 0.3) == pytest.approx(math.log(2.0) / betas["m0"].b)
    # T_1(s): decay of mode m1's bound from s to D_1 / a_0.
    s = 2.0
    expect = math.log(betas["m1"].a * s * betas["m0"].a / part.thresholds[1]) / betas["m1"].b
    assert config.dwell_time_at(1, s) == pytest.approx(expect)


def test_convergence_time_bound_variants():
    part = Partition((0.0, 1.0, 2.0))
    dwell = (lambda s: 1.0, lambda s: 2.0, lambda s: 3.0)
    config = SupervisorConfig(partition=part, mode_assignment=("a", "b", "c"),
                              chi=(0.5, 1.5, 4.0), dwell=dwell, t_min=1.0)
    assert convergence_time_bound(config, 0) == pytest.approx(1.0)
    assert convergence_time_bound(config, 2) == pytest.approx(6.0)
    # corollary3 adds T_r and T_{r+1} with the index clamped at M.
    assert convergence_time_bound(config, 2, "corollary3") == pytest.approx(12.0)
    assert convergence_time_bound(config, 1, "corollary3") == pytest.approx(8.0)
    with pytest.raises(ValueError):
        convergence_time_bound(config, 1, "corollary9")


def test_optimal_threshold_flat_for_identical_rates():
    beta = KLExp(a=1.0, b=1.0)
    delta, total = optimal_threshold(beta, beta, 10.0, 0.01, n_grid=100)
    grid = np.linspace(0.01, 10.0, 101)[1:]
    assert delta == pytest.approx(grid[0])
    assert total == pytest.approx(math.log(10.0 / 0.01))


def test_optimal_threshold_prefers_faster_mode():
    fast, slow = KLExp(a=1.0, b=2.0), KLExp(a=1.0, b=1.0)
    grid = np.linspace(0.01, 10.0, 1001)[1:]
    # mode-1 faster: run it as long as possible, threshold near eps
    delta, total = optimal_threshold(fast, slow, 10.0, 0.01)
    assert delta == pytest.approx(grid[0])
    assert total == pytest.approx(math.log(10.0 / grid[0]) / 2.0 + math.log(grid[0] / 0.01))
    # mode-0 faster: switch immediately, threshold near s
    delta, total = optimal_threshold(slow, fast, 10.0, 0.01)
    assert delta == pytest.approx(10.0)
    with pytest.raises(ValueError):
        optimal_threshold(fast, slow, 1.0, 2.0)


def test_optimal_threshold_dominates_random_feasible_points():
    rng = np.random.default_rng(23)
    beta1 = KLExp(a=1.4, b=1.7)
    beta0 = KLExp(a=1.1, b=0.9)
    s, eps = 8.0, 0.05
    _, total = optimal_threshold(beta1, beta0, s, eps)
    grid = np.linspace(eps, s, 1001)[1:]
    for delta in rng.choice(grid, size=20, replace=False):
        other = time_to_level(beta1, s, delta) + time_to_level(beta0, delta, eps)
        assert total <= other + 1e-12


def test_solve_lyapunov_identity_cases():
    P = solve_lyapunov_small(-np.eye(2), 1.0)
    assert np.allclose(P, np.eye(2), atol=1e-12)
    P = solve_lyapunov_small(np.diag([-1.0, -2.0]), 1.0)
    assert np.allclose(P, np.diag([1.0, 1.0 / 3.0]), atol=1e-12)


def test_solve_lyapunov_infeasible_spectrum():
    with pytest.raises(InfeasibleError):
        solve_lyapunov_small(np.diag([-0.4, -2.0]), 1.0)


def test_solve_lyapunov_certificate_residual():
    rng = np.random.default_rng(17)
    for _ in range(20):
        l1, l2 = rng.uniform(1.0, 8.0, size=2)
        G = observer_error_matrix(gain_from_eigs(l1, l2))
        alpha = float(rng.uniform(0.1, 1.6 * min(l1, l2)))
        P = solve_lyapunov_small(G, alpha)
        residual = np.max(np.linalg.eigvalsh(G.T @ P + P @ G + alpha * P))
        assert residual <= 1e-9


def test_lure_siios_estimate_examples():
    beta, gamma = lure_siios_estimate(np.eye(2), 1.0, np.eye(2))
    assert beta.a == pytest.approx(math.sqrt(2.0))
    assert beta.b == pytest.approx(0.25)
    assert gamma.c == pytest.approx(2.0)
    beta, gamma = lure_siios_estimate(np.diag([1.0, 4.0]), 1.0, np.array([[0.0], [1.0]]))
    assert beta.a == pytest.approx(math.sqrt(8.0))
    assert gamma.c == pytest.approx(8.0)
    with pytest.raises(ValueError):
        lure_siios_estimate(np.diag([1.0, -1.0]), 1.0, np.eye(2))
