"""Weighted revenue sharing: ``alpha * pro-rata + (1 - alpha) * user-centric``.

Only the pro-rata part carries strategic incentives, so the weighted game is
the original one with ``V`` scaled by ``alpha`` plus an artist-specific
constant.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import (EquilibriumResult, Regime, classify, fraud_free_result,
                          solve_closed_form)
from .model import ReducedGame


@dataclass(frozen=True)
class WeightedRuleParams:
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


def _params(alpha) -> WeightedRuleParams:
    return alpha if isinstance(alpha, WeightedRuleParams) else WeightedRuleParams(float(alpha))


def _constant_terms(g: ReducedGame, alpha: float) -> np.ndarray:
    if alpha == 1.0:
        return g.d / g.xi
    if g.uc_shares is None:
        raise ValueError("weighted rule needs per-artist user-centric shares (uc_shares)")
    ratio = g.lambda0 / (g.m * g.lambda_bar)
    return (g.d * alpha + ratio * g.uc_shares * (1.0 - alpha)) / g.xi


def weighted_utilities(g: ReducedGame, params, t) -> np.ndarray:
    alpha = _params(params).alpha
    t = np.asarray(t, dtype=float)
    return (g.d + t) / (1.0 + t.sum()) * g.V * alpha - t + _constant_terms(g, alpha)


def weighted_utility(g: ReducedGame, params, t, i: int) -> float:
    if not 0 <= i < g.n:
        raise IndexError(f"artist index {i} out of range for {g.n} artists")
    return float(weighted_utilities(g, params, t)[i])


@dataclass(frozen=True)
class AlphaBound:
    value: float
    already_fraud_free: bool


def max_alpha(g: ReducedGame) -> AlphaBound:
    """Largest blend weight that still makes honesty dominant for every artist.

    Under weak technology pure pro-rata already deters fraud and ``1`` is
    returned with ``already_fraud_free`` set.
    """
    if classify(g) is Regime.FRAUD_FREE:
        return AlphaBound(1.0, True)
    bound = 1.0 / ((1.0 - g.d_min) * g.V)
    # strong technology: alpha = 1 is excluded by definition
    return AlphaBound(min(bound, math.nextafter(1.0, 0.0)), False)


def weighted_dominance_threshold(g: ReducedGame, alpha) -> bool:
    """Whether honesty is dominant for all artists under weight ``alpha``."""
    alpha = _params(alpha).alpha
    if g.V <= 0:
        return True
    return bool(alpha <= max_alpha(g).value)


def weighted_game(g: ReducedGame, alpha) -> ReducedGame:
    """The strategically equivalent pro-rata game with ``V`` replaced by ``alpha V``."""
    alpha = _params(alpha).alpha
    if alpha == 1.0:
        return g
    return g.with_value(g.V * alpha)


def solve_weighted(g: ReducedGame, alpha) -> EquilibriumResult:
    params = _params(alpha)
    if weighted_dominance_threshold(g, params):
        eq = fraud_free_result(g)
    else:
        eq = solve_closed_form(weighted_game(g, params), check_regime=False)
    u = weighted_utilities(g, params, eq.t_star)
    u.setflags(write=False)
    return dataclasses.replace(eq, utilities=u)
