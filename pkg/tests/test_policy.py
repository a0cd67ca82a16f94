import numpy as np
import pytest
from numpy.testing import assert_allclose

from clickfraud import oracle
from clickfraud.equilibrium import SolverError, solve, solve_closed_form
from clickfraud.model import ReducedGame, utilities
from clickfraud.policy import (H, ThresholdClass, analyze, classify_threshold,
                               d_hat_from_streams, deviation_gains, just_qualify,
                               qualified_utilities, theta_range)


def test_h_on_scenario_a_is_linear(game_a):
    # with n d* = 1 + T* the fraction is constant: H = 1.9 - theta
    eq = solve_closed_form(game_a)
    for theta in (0.0, 0.5, 1.0, 1.9, 3.0):
        assert H(game_a, eq, theta) == pytest.approx(1.9 - theta, abs=1e-12)


def test_theta_range_scenario_a(game_a):
    eq = solve_closed_form(game_a)
    theta_star, theta_2 = theta_range(game_a, eq)
    assert theta_star == 0.0
    assert theta_2 == pytest.approx(1.9, abs=1e-9)


def test_theta_range_interior_peak():
    # (1 + T*) / (n d*) large enough that H first rises
    g = ReducedGame.from_parameters([0.05, 0.15, 0.8], 0.5, 8.0)
    eq = solve_closed_form(g)
    r, n = 1 + eq.T_star, g.n
    theta_star, theta_2 = theta_range(g, eq)
    if r / (n * eq.d_star) >= g.V / (g.V - 1):
        assert theta_star > 0
        eps = 1e-6
        assert H(g, eq, theta_star) >= H(g, eq, theta_star + eps)
        assert H(g, eq, theta_star) >= H(g, eq, max(theta_star - eps, 0))
    assert abs(H(g, eq, theta_2)) < 1e-9
    assert theta_2 > theta_star


def test_theta_root_on_random_games(rng):
    for _ in range(200):
        g = oracle.random_fraud_game(rng, int(rng.integers(2, 7)))
        eq = solve_closed_form(g)
        theta_star, theta_2 = theta_range(g, eq)
        assert theta_2 > theta_star >= 0
        assert abs(H(g, eq, theta_2)) < 1e-8 * max(1.0, g.V)


def test_threshold_classes():
    assert classify_threshold(0.8, 1.0, 1.9) is ThresholdClass.NO_EFFECT
    assert classify_threshold(1.0, 1.0, 1.9) is ThresholdClass.NO_EFFECT
    assert classify_threshold(1.5, 1.0, 1.9) is ThresholdClass.SLIGHTLY_HIGH
    assert classify_threshold(2.9, 1.0, 1.9) is ThresholdClass.SLIGHTLY_HIGH
    assert classify_threshold(3.0, 1.0, 1.9) is ThresholdClass.UNCHARACTERIZED


def test_no_effect_keeps_equilibrium(game_a):
    a = analyze(game_a, solve_closed_form(game_a), 0.8)
    assert a.classification is ThresholdClass.NO_EFFECT
    assert_allclose(a.t_hat, [0.7, 0.3], atol=1e-9)
    assert_allclose(a.welfare_delta, 0, atol=1e-12)
    assert a.is_equilibrium


def test_slightly_high_scenario_a(game_a):
    a = analyze(game_a, solve_closed_form(game_a), 1.5)
    assert a.classification is ThresholdClass.SLIGHTLY_HIGH
    assert_allclose(a.t_hat, [1.2, 0.8], atol=1e-12)
    assert a.T_hat == pytest.approx(2.0)
    assert_allclose(a.u_hat, [1.4, 2.6], atol=1e-12)
    assert np.all(a.u_hat < a.u_star)
    assert a.u_hat.sum() < a.u_star.sum() and a.u_hat.min() < a.u_star.min()
    assert a.is_equilibrium
    assert [r[0] for r in a.rows()] == [0, 1]


def test_uncharacterized_has_no_profile(game_a):
    a = analyze(game_a, solve_closed_form(game_a), 3.0)
    assert a.classification is ThresholdClass.UNCHARACTERIZED
    assert a.t_hat is None and a.rows() == []
    assert a.to_dict()["t_hat"] is None


def test_just_qualify_profile(game_b):
    assert_allclose(just_qualify(game_b, 0.5), [0.45, 0.35, 0.0])
    with pytest.raises(ValueError):
        just_qualify(game_b, -0.1)


def test_d_hat_from_streams(game_a):
    assert d_hat_from_streams(300.0, game_a.m, game_a.lambda_bar) == pytest.approx(1.5)


def test_qualified_utilities_reduce_to_ordinary(game_c):
    t = [0.2, 0.1, 0.0]
    assert_allclose(qualified_utilities(game_c, 0.0, t), utilities(game_c, t))


def test_non_qualifier_pays_full_cost(game_a):
    u = qualified_utilities(game_a, 1.5, [0.5, 0.8])
    assert u[0] == pytest.approx(-(1 + 1 / game_a.xi) * 0.5)
    # artist 1 qualifies alone and takes the whole pool
    assert u[1] == pytest.approx(game_a.V + 2.3 / game_a.xi - 3 * 0.8)


def test_deviation_gain_detects_bad_profile(game_a):
    gains, _ = deviation_gains(game_a, 1.5, [1.5, 0.8])
    assert gains[0] > 0.1


def test_slightly_high_profiles_are_equilibria(rng):
    for _ in range(300):
        g = oracle.random_fraud_game(rng, int(rng.integers(2, 7)))
        eq = solve_closed_form(g)
        _, theta_2 = theta_range(g, eq)
        d_hat = eq.d_star + rng.uniform(0, 1) * theta_2
        a = analyze(g, eq, d_hat)
        assert a.classification is not ThresholdClass.UNCHARACTERIZED
        assert a.is_equilibrium
        if a.classification is ThresholdClass.SLIGHTLY_HIGH:
            assert a.T_hat >= eq.T_star - 1e-12
            assert np.all(a.u_hat <= a.u_star + 1e-12)


def test_policy_refuses_fraud_free():
    g = ReducedGame.from_parameters([0.4, 0.6], 0.5, 1.2)
    with pytest.raises(ValueError):
        analyze(g, solve(g), 0.5)
    with pytest.raises(ValueError):
        analyze(g, solve(g), -1.0)


def test_theta_range_reports_missing_sign_change(game_a, monkeypatch):
    import clickfraud.policy as pol
    eq = solve_closed_form(game_a)
    monkeypatch.setattr(pol, "H", lambda g, eq, th: 1.0)
    with pytest.raises(SolverError):
        pol.theta_range(game_a, eq)
