"""Cross-checks between independent derivations of the lattice oracles."""

import numpy as np

import oracles


def test_one_sided_images_match_dp():
    for N in (50, 200):
        a = oracles.srw_max_mean(N)
        b = oracles.srw_max_mean_dp(N, m_cap=N)
        assert abs(a - b) < 1e-12 * max(1.0, a)


def test_two_sided_images_match_dp():
    for N, cap in ((50, 30), (200, 60)):
        a = oracles.srw_abs_max_mean_images_capped(N, cap)
        b = oracles.srw_abs_max_mean_dp(N, cap)
        assert abs(a - b) < 1e-12 * max(1.0, a)


def test_two_sided_cap_is_immaterial():
    # beyond ~6 sqrt(N) the surviving mass is below 1e-8
    N = 400
    loose = oracles.srw_abs_max_mean(N)
    tight = oracles.srw_abs_max_mean_dp(N, m_cap=6 * int(np.sqrt(N)))
    assert abs(loose - tight) < 1e-8


def test_drawdown_formulas_match_linear_solve():
    for J in (4, 10, 25):
        steps, pushes = oracles.drawdown_linear_solve(J)
        assert abs(steps - oracles.drawdown_expected_steps(J)) < 1e-9
        assert abs(pushes - oracles.drawdown_expected_pushes(J)) < 1e-9


def test_exact_lattice_theta0_values():
    # (1-h)^2/4 when (1-h)/2 is on the lattice, else shaved by delta^2
    assert abs(oracles.exact_lattice_theta0(0.04) - 0.2304) < 1e-14
    assert abs(oracles.exact_lattice_theta0(0.02) - 0.2400) < 1e-14
    assert abs(oracles.exact_lattice_theta0(0.01) - 0.2450) < 1e-14


def test_scaled_means_near_gaussian_limits():
    N = 40_000
    h = 1.0 / np.sqrt(N)
    assert abs(oracles.srw_max_mean(N) * h - oracles.GAUSS_MAX_MEAN) < 5e-3
    assert abs(oracles.srw_abs_max_mean(N) * h
               - oracles.REFLECTED_MAX_MEAN) < 5e-3
