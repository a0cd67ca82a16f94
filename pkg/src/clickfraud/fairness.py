"""Egalitarian comparison of the fraud equilibrium with the fraud-free profile."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumResult, Regime
from .model import ReducedGame

KNIFE_EDGE_TOL = 1e-9


class FairnessError(ValueError):
    pass


@dataclass(frozen=True)
class FairnessReport:
    u_star: np.ndarray
    u_zero: np.ndarray
    min_star: float
    min_zero: float
    fairer: bool
    condition_rhs: float
    condition_holds: bool
    knife_edge: bool

    def to_dict(self) -> dict:
        return {
            "u_star": self.u_star.tolist(),
            "u_zero": self.u_zero.tolist(),
            "min_star": self.min_star,
            "min_zero": self.min_zero,
            "fairer": self.fairer,
            "condition_rhs": self.condition_rhs,
            "condition_holds": self.condition_holds,
            "knife_edge": self.knife_edge,
        }

    def rows(self) -> list[tuple]:
        """``(artist, u_zero, u_star, delta)`` rows."""
        return [(i, float(z), float(s), float(s - z))
                for i, (z, s) in enumerate(zip(self.u_zero, self.u_star))]


def fraud_free_profile(g: ReducedGame) -> np.ndarray:
    return g.d * (1.0 / g.xi + g.V)


def fairness_rhs(g: ReducedGame) -> float:
    """``V - sqrt(d_min V (V - 1))``; the fraud profile is fairer iff ``1 + T*`` lies below it."""
    if g.V < 1:
        raise FairnessError(f"fairness condition needs V >= 1, got V={g.V}")
    return g.V - math.sqrt(g.d_min * g.V * (g.V - 1.0))


def compare(g: ReducedGame, eq: EquilibriumResult) -> FairnessReport:
    if eq.regime is not Regime.FRAUD:
        raise FairnessError("fairness comparison needs a fraud-regime equilibrium")
    rhs = fairness_rhs(g)
    u_zero = fraud_free_profile(g)
    u_star = np.asarray(eq.utilities, dtype=float)
    min_star, min_zero = float(u_star.min()), float(u_zero.min())
    return FairnessReport(
        u_star=u_star,
        u_zero=u_zero,
        min_star=min_star,
        min_zero=min_zero,
        fairer=min_star > min_zero,
        condition_rhs=rhs,
        condition_holds=1.0 + eq.T_star < rhs,
        knife_edge=abs(min_star - min_zero) < KNIFE_EDGE_TOL,
    )


def worst_case_fairer(n: int, d_min: float, V: float) -> bool:
    """Whether an equilibrium in which every artist cheats beats the fraud-free minimum."""
    if V <= 1:
        raise FairnessError(f"need V > 1, got V={V}")
    return bool(d_min < V / (n * n * (V - 1.0)))
