import numpy as np
import pytest

from asl.line1d import (
    LineConfig,
    build_line_law,
    build_line_policy,
    exact_success_by_distance,
    line_info_report,
    line_mixed_policy_eval,
    phi_dist,
    phi_sign,
    v_star_line,
)
from asl.info import chain_rule_residual


def test_v_star_examples():
    assert v_star_line(3, 3, 0.9) == 0.0
    assert v_star_line(3, 4, 0.9) == -1.0
    assert abs(v_star_line(0, 2, 0.9) - (-1.9)) < 1e-12


def test_v_star_limit_and_symmetry():
    gamma = 1 - 1e-6
    for s, g in ((0, 5), (-3, 4), (2, -6)):
        assert abs(v_star_line(s, g, gamma) - (-(abs(s - g)))) < 1e-3
        assert v_star_line(s, g, 0.7) == v_star_line(g, s, 0.7)


def test_phi_formulas():
    assert phi_sign(3, 4) == -1
    assert phi_sign(3, 2) == 1
    assert phi_dist(3, 4) == phi_dist(3, 2) == 1
    assert phi_dist(5, 5) == 0


def test_collision_theorem_whole_window():
    N = 8
    for s in range(-N, N + 1):
        assert phi_dist(s, s + 1) == phi_dist(s, s - 1)
        assert np.sign((s + 1) - s) != np.sign((s - 1) - s)  # optimal actions differ


def test_config_validation():
    with pytest.raises(ValueError):
        LineConfig(radius=0)
    with pytest.raises(ValueError):
        LineConfig(gamma=1.0)
    with pytest.raises(ValueError):
        LineConfig(radius=5, horizon=3)


def test_line_info_identities():
    cfg = LineConfig(radius=6)
    sign_report = line_info_report(cfg, "sign")
    dist_report = line_info_report(cfg, "dist")
    assert sign_report.delta_a == 0.0
    assert dist_report.delta_v == 0.0
    assert dist_report.i_az_sv == 0.0
    assert abs(dist_report.delta_a - dist_report.i_ag_sv) < 1e-15
    assert dist_report.delta_a > 0
    assert chain_rule_residual(sign_report) < 1e-12
    assert chain_rule_residual(dist_report) < 1e-12


def test_sign_preserves_optimal_action_deterministically():
    cfg = LineConfig(radius=5)
    policy = build_line_policy(cfg, "sign")
    s = np.array([0, 2, -4])
    g = np.array([3, -1, -5])
    p_up = policy.step_up_prob(s, s - g)
    assert np.array_equal(p_up, (g > s).astype(float))


def test_dist_interior_is_fair_coin():
    cfg = LineConfig(radius=4)
    policy = build_line_policy(cfg, "dist")
    assert policy.step_up_prob(np.array([0]), np.array([1]))[0] == 0.5
    # near the boundary only one goal candidate exists
    assert policy.step_up_prob(np.array([4]), np.array([1]))[0] == 0.0


def test_sign_rollouts_always_succeed():
    cfg = LineConfig(radius=5, n_rollouts_per_pair=20, seed=3)
    out = line_mixed_policy_eval(cfg, "sign")
    assert np.all(out.success_rates == 1.0)


def test_dist_rollouts_match_exact_dp():
    cfg = LineConfig(radius=6, n_rollouts_per_pair=200, seed=3)
    mc = line_mixed_policy_eval(cfg, "dist")
    dp = exact_success_by_distance(cfg, "dist")
    assert np.array_equal(mc.distances, dp.distances)
    assert mc.success_rates[0] == dp.success_rates[0] == 1.0  # distance 0
    assert abs(mc.success_rates[1] - dp.success_rates[1]) < 0.03
    assert np.max(np.abs(mc.success_rates - dp.success_rates)) < 0.05


def test_rollouts_reproducible():
    cfg = LineConfig(radius=4, n_rollouts_per_pair=50, seed=9)
    a = line_mixed_policy_eval(cfg, "dist")
    b = line_mixed_policy_eval(cfg, "dist")
    assert np.array_equal(a.success_rates, b.success_rates)


def test_law_excludes_diagonal():
    cfg = LineConfig(radius=3)
    law = build_line_law(cfg)
    assert law.n_pairs == 7 * 7 - 7
    assert law.h_a_sg == 0.0  # expert action is deterministic on the line


def test_custom_phi_callable():
    cfg = LineConfig(radius=3)
    report = line_info_report(cfg, lambda s, g: np.zeros_like(np.asarray(s)))
    # constant encoding: no action information beyond the state
    assert report.delta_a > 0
    assert report.i_az_sv == 0.0
