# SPDX-License-Identifier: Apache-2.0
import math

import numpy as np
import pytest

import covert_mimo as cm


def siso(gain_b=1.0, gain_w=1.0, power=1.0):
    return cm.MimoScenario(
        np.array([[math.sqrt(gain_b)]], dtype=complex),
        np.array([[math.sqrt(gain_w)]], dtype=complex),
        power=power,
    )


def test_scaling_constant():
    eig = cm.rotated_eigen(siso())
    shares = cm.uniform_shares(eig)
    assert cm.scaling_L(eig, shares, 1.0, 1.0).total == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert cm.scaling_L(eig, shares, 1.0, 1.0, real_input=True).total == pytest.approx(1.0, abs=1e-12)


def test_optimizer_meets_the_kl_budget():
    rng = np.random.default_rng(3)
    h_b = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    h_w = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    scenario = cm.MimoScenario(h_b, h_w, 1.0, 1.0, 2.0)
    budget = cm.CovertBudget(1000, 0.1)
    res = cm.optimize_covariance(scenario, budget)
    eig = cm.rotated_eigen(scenario)
    assert cm.kl_single_letter(res.allocation, eig, 1.0) <= budget.kl_threshold * (1 + 1e-9)
    assert res.kkt_residual <= 1e-8
    assert res.allocation.covariance.shape == (3, 3)
    assert cm.rate_cc(scenario, res.allocation) == pytest.approx(res.rate, rel=1e-10)


def test_lambert_and_kl_inverse():
    assert cm.lambert_w_minus1(-1.0 / math.e) == pytest.approx(-1.0, abs=1e-9)
    w = cm.lambert_w_minus1(-0.1)
    assert w * math.exp(w) == pytest.approx(-0.1, abs=1e-15)
    x = cm.kl_inverse(1e-3)
    assert cm.kl_term(x) == pytest.approx(1e-3, rel=1e-12)


def test_detector_exact_and_monte_carlo_agree():
    scenario = siso()
    eig = cm.rotated_eigen(scenario)
    alloc = cm.PowerAllocation.from_directions(eig, np.array([0.05]))
    exact = cm.exact_error_sum(scenario, alloc, 1000)
    mc = cm.monte_carlo_detection(scenario, alloc, 1000, 20000, seed=5)
    assert exact.trials == 0
    assert abs(mc.error_sum - exact.error_sum) <= mc.confidence_halfwidth
    again = cm.monte_carlo_detection(scenario, alloc, 1000, 20000, seed=5, threads=2)
    assert again.error_sum == mc.error_sum


def test_beam_null_and_null_steering():
    geom = cm.ArrayGeometry.with_length(4, 2.0)
    assert cm.beam_gain(geom, 0.5) == 0.0
    null = cm.null_steer_index(geom, 0.0, 0.3, 1.0, 1.0, 1.0)
    assert cm.beam_gain(geom, null.omega - 0.3) < 1e-12
    assert null.rate > 0.0


def test_errors_carry_a_code():
    with pytest.raises(cm.CovertError) as info:
        cm.kl_term(-1.0)
    assert info.value.code == "invalid_input"
    with pytest.raises(cm.CovertError) as info:
        cm.monte_carlo_detection(siso(), cm.PowerAllocation.zero(cm.rotated_eigen(siso())), 10, 5)
    assert info.value.code == "insufficient_trials"
