import numpy as np
import pytest

from aircomp.power_control import (apply_policy, csi_error_trial, misalignment_bias,
                                   objective, solve_optimal_policy, truncated_inversion,
                                   PowerPolicy)
from aircomp.rng import substream


def _random_instance(rng, kmax=50):
    K = int(rng.integers(1, kmax + 1))
    h = np.abs(rng.standard_normal(K) + 1j * rng.standard_normal(K)) / np.sqrt(2)
    h = np.maximum(h, 1e-3)
    P = rng.uniform(0.1, 2.0, K)
    sigma2 = rng.uniform(1e-3, 2.0)
    return h, P, sigma2


def test_truncated_inversion_alignment():
    rng = substream(5)
    h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    b = truncated_inversion(h, 0.7, 0.0 + 1e-6)
    active = np.abs(h) ** 2 >= 1e-6
    prod = h[active] * b[active]
    assert np.allclose(prod.imag, 0.0, atol=1e-12)
    assert np.allclose(prod.real, 0.7, atol=1e-12)


def test_truncated_inversion_cutoff():
    b = truncated_inversion(np.array([0.1 + 0j]), 1.0, 0.5)
    assert b[0] == 0.0
    with pytest.raises(ValueError):
        truncated_inversion(np.array([0.0 + 0j]), 1.0, 0.0)


def test_objective_hand_values():
    # K=1, P=|h|=sigma2=1, eta=4: (1/2 - 1)^2 + 1/4 = 0.5
    assert objective(4.0, [1.0], 1.0) == pytest.approx(0.5)
    # large eta -> K (all misalignment)
    assert objective(1e12, np.ones(7), 0.0) == pytest.approx(7.0, rel=1e-5)
    # perfect inversion region
    assert objective(0.5, [1.0, 2.0], 0.0) == 0.0


def test_policy_single_node_closed_form():
    policy = solve_optimal_policy([1.0], [1.0], 1.0)
    assert policy.eta == pytest.approx(4.0)
    assert policy.powers[0] == pytest.approx(1.0)
    assert policy.objective_value == pytest.approx(0.5)


def test_policy_noiseless_limit():
    rng = substream(8)
    h = np.abs(rng.standard_normal(6)) + 0.1
    P = rng.uniform(0.5, 2.0, 6)
    policy = solve_optimal_policy(h, P, 0.0)
    q = P * h**2
    assert policy.eta == pytest.approx(q.min())
    assert policy.objective_value == 0.0
    assert np.all(policy.powers <= P + 1e-12)
    # every node inverts exactly
    assert np.allclose(np.sqrt(policy.powers) * h, np.sqrt(policy.eta), atol=1e-12)


def test_policy_matches_grid_oracle():
    rng = substream(21)
    for _ in range(300):
        h, P, sigma2 = _random_instance(rng)
        policy = solve_optimal_policy(h, P, sigma2)
        q = P * h**2
        grid = np.geomspace(q.min() * 1e-3, q.max() * 1e3, 10_000)
        best = min(objective(g, q, sigma2) for g in grid)
        assert policy.objective_value <= best * (1 + 1e-6)


def test_policy_structure_conditions():
    rng = substream(22)
    for _ in range(200):
        h, P, sigma2 = _random_instance(rng, kmax=20)
        policy = solve_optimal_policy(h, P, sigma2)
        q = P * h**2
        full = np.isclose(policy.powers, P)
        invert = ~full
        assert np.all(q[full] <= policy.eta * (1 + 1e-9))
        assert np.all(q[invert] >= policy.eta * (1 - 1e-9))
        # Eq-38 style cross-check: p* = min(P, eta / h^2)
        assert np.allclose(policy.powers, np.minimum(P, policy.eta / h**2), atol=1e-9)


def test_objective_monotone_in_noise():
    rng = substream(23)
    h, P, _ = _random_instance(rng, kmax=10)
    values = [solve_optimal_policy(h, P, s2).objective_value
              for s2 in (0.0, 0.01, 0.1, 1.0, 10.0)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))


def test_apply_policy_exact_mean_at_zero_noise():
    rng = substream(24)
    h = np.abs(rng.standard_normal(5)) + 0.1
    policy = solve_optimal_policy(h, np.ones(5), 0.0)
    s = rng.uniform(0.0, 1.0, 5)
    est = apply_policy(s, policy, h, 0.0, rng)
    assert est == pytest.approx(s.mean(), rel=1e-12)


def test_apply_policy_bias_matches_misalignment():
    rng = substream(25)
    h = np.abs(rng.standard_normal(8)) + 0.05
    policy = solve_optimal_policy(h, np.ones(8), 0.5)
    s = rng.uniform(0.0, 1.0, 8)
    est = apply_policy(s, policy, h, 0.0, rng)
    assert est - s.mean() == pytest.approx(misalignment_bias(s, policy, h), abs=1e-12)


def test_apply_policy_mc_mse_matches_objective():
    rng = substream(26)
    K = 6
    h = np.abs(rng.standard_normal(K)) + 0.2
    sigma2 = 0.3
    policy = solve_optimal_policy(h, np.ones(K), sigma2)
    n = 20_000
    errs = np.empty(n)
    for t in range(n):
        s = rng.uniform(-np.sqrt(3), np.sqrt(3), K)  # unit variance
        est = apply_policy(s, policy, h, sigma2, rng)
        errs[t] = (est - s.mean()) ** 2
    expected = policy.objective_value / K**2
    std = errs.std(ddof=1) / np.sqrt(n)
    assert abs(errs.mean() - expected) < 3 * std + 1e-12


def test_csi_error_trial_zero_deviation_unbiased():
    rng = substream(27)
    h = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2)
    s = rng.uniform(-1, 1, 4)
    est = csi_error_trial(s, h, 0.0, np.zeros(4), rng)
    assert est.real == pytest.approx(s.sum(), rel=1e-9)
    assert abs(est.imag) < 1e-12


def test_policy_json_round_trip():
    policy = solve_optimal_policy([0.5, 1.5], [1.0, 1.0], 0.7)
    again = PowerPolicy.from_json(policy.to_json())
    assert np.allclose(again.powers, policy.powers)
    assert again.eta == policy.eta
    assert again.k_star == policy.k_star


def test_validation():
    with pytest.raises(ValueError):
        solve_optimal_policy([0.0], [1.0], 1.0)
    with pytest.raises(ValueError):
        solve_optimal_policy([1.0], [-1.0], 1.0)
    with pytest.raises(ValueError):
        objective(0.0, [1.0], 1.0)
