"""Qualification thresholds: a track earns royalties only if its total
streamshare ``d_i + t_i`` reaches ``d_hat``.

Thresholds at or below the equilibrium cutoff change nothing.  Slightly
higher thresholds push every cheater to the just-qualify level
``d_hat - d_i``, which raises aggregate fraud and lowers every artist's
utility.  Thresholds beyond ``d* + theta**`` are not characterized and no
profile is produced for them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibrium import EquilibriumResult, Regime, SolverError, _br
from .model import ReducedGame, utilities

ROOT_TOL = 1e-12
INDIFFERENCE_TOL = 1e-9
# deviation gains below this are rounding noise
DEVIATION_TOL = 1e-12
# d_i + (d_hat - d_i) can round one ulp below d_hat
QUALIFY_TOL = 1e-12


class ThresholdClass(str, enum.Enum):
    NO_EFFECT = "NoEffect"
    SLIGHTLY_HIGH = "SlightlyHigh"
    UNCHARACTERIZED = "Uncharacterized"


@dataclass(frozen=True)
class PolicyAnalysis:
    d_hat: float
    classification: ThresholdClass
    theta_star: float
    theta_double_star: float
    t_hat: Optional[np.ndarray] = None
    T_hat: Optional[float] = None
    u_star: Optional[np.ndarray] = None
    u_hat: Optional[np.ndarray] = None
    welfare_delta: Optional[np.ndarray] = None
    deviation_gain: Optional[np.ndarray] = None
    is_equilibrium: Optional[bool] = None
    indifferent: tuple = ()

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "d_hat": self.d_hat,
            "classification": self.classification.value,
            "theta_star": self.theta_star,
            "theta_double_star": self.theta_double_star,
            "t_hat": arr(self.t_hat),
            "T_hat": self.T_hat,
            "u_star": arr(self.u_star),
            "u_hat": arr(self.u_hat),
            "welfare_delta": arr(self.welfare_delta),
            "deviation_gain": arr(self.deviation_gain),
            "is_equilibrium": self.is_equilibrium,
            "indifferent": list(self.indifferent),
        }

    def rows(self) -> list[tuple]:
        """``(artist, u_star, u_hat, delta)`` rows; empty when uncharacterized."""
        if self.u_hat is None:
            return []
        return [(i, float(s), float(h), float(h - s))
                for i, (s, h) in enumerate(zip(self.u_star, self.u_hat))]


def d_hat_from_streams(lambda_hat: float, m: float, lambda_bar: float) -> float:
    """Convert a raw stream threshold to a streamshare threshold."""
    return lambda_hat / (m * lambda_bar)


def just_qualify(g: ReducedGame, d_hat: float) -> np.ndarray:
    if d_hat < 0:
        raise ValueError("qualification threshold must be non-negative")
    return np.maximum(d_hat - g.d, 0.0)


def qualified_utilities(g: ReducedGame, d_hat: float, t) -> np.ndarray:
    """Utilities when only tracks with ``d_i + t_i >= d_hat`` share the pool.

    A non-qualifying artist still pays for its fake users and receives
    nothing.  With every track qualifying this is the ordinary utility.
    """
    t = np.asarray(t, dtype=float)
    total = g.d + t
    ok = total >= d_hat - QUALIFY_TOL * max(1.0, d_hat)
    pool = g.V + (1.0 + t.sum()) / g.xi
    eligible = total[ok].sum()
    u = -(1.0 + 1.0 / g.xi) * t
    if eligible > 0:
        u[ok] += total[ok] / eligible * pool
    return u


def H(g: ReducedGame, eq: EquilibriumResult, theta: float) -> float:
    """Lower bound on the pivotal artist's just-qualify utility at ``d_hat = d* + theta``."""
    r = 1.0 + eq.T_star
    return ((eq.d_star + theta) / (r + g.n * theta) * g.V - eq.d_star - theta
            + (1.0 + 1.0 / g.xi) * g.d_min)


def _require_fraud(eq: EquilibriumResult) -> None:
    if eq.regime is not Regime.FRAUD:
        raise ValueError("policy analysis needs a fraud-regime equilibrium")


def theta_range(g: ReducedGame, eq: EquilibriumResult) -> tuple[float, float]:
    """``(theta*, theta**)``: peak of ``H`` and its zero beyond the peak."""
    _require_fraud(eq)
    n, V, r, d_star = g.n, g.V, 1.0 + eq.T_star, eq.d_star
    if r / (n * d_star) < V / (V - 1.0):
        theta_star = 0.0
    else:
        theta_star = max((math.sqrt((r - n * d_star) * V) - r) / n, 0.0)
    lo, hi = theta_star, V + (1.0 + 1.0 / g.xi) * g.d_min
    if not (H(g, eq, lo) > 0 > H(g, eq, hi)):
        raise SolverError("H does not change sign on (theta*, V + (1 + 1/xi) d_min)")
    for _ in range(200):
        if hi - lo <= ROOT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if H(g, eq, mid) > 0:
            lo = mid
        else:
            hi = mid
    else:
        raise SolverError("bisection on H did not converge")
    return theta_star, 0.5 * (lo + hi)


def classify_threshold(d_hat: float, d_star: float, theta_double_star: float) -> ThresholdClass:
    if d_hat <= d_star:
        return ThresholdClass.NO_EFFECT
    if d_hat <= d_star + theta_double_star:
        return ThresholdClass.SLIGHTLY_HIGH
    return ThresholdClass.UNCHARACTERIZED


def deviation_gains(g: ReducedGame, d_hat: float, t) -> tuple[np.ndarray, tuple]:
    """Best unilateral improvement for each artist under the threshold rule.

    Artists below ``d_hat`` may either stay at zero or buy at least
    ``d_hat - d_i``; on the latter range utility is concave, so the
    constrained optimum is the unconstrained best response clipped from
    below.  Also returns the artists within ``INDIFFERENCE_TOL`` of
    preferring honesty.
    """
    t = np.asarray(t, dtype=float)
    base = qualified_utilities(g, d_hat, t)
    gains = np.zeros(g.n)
    indifferent = []
    for i in range(g.n):
        tau = t.sum() - t[i]
        floor = max(d_hat - g.d[i], 0.0)
        options = [max(floor, _br(float(g.d[i]), g.V, tau))]
        if floor > 0:
            options.append(0.0)
        best = -math.inf
        for option in options:
            trial = t.copy()
            trial[i] = option
            value = qualified_utilities(g, d_hat, trial)[i]
            best = max(best, value)
            if option == 0.0 and floor > 0 and abs(value - base[i]) < INDIFFERENCE_TOL:
                indifferent.append(i)
        gains[i] = best - base[i]
    return gains, tuple(indifferent)


def analyze(g: ReducedGame, eq: EquilibriumResult, d_hat: float) -> PolicyAnalysis:
    if d_hat < 0:
        raise ValueError("qualification threshold must be non-negative")
    _require_fraud(eq)
    theta_star, theta_2 = theta_range(g, eq)
    cls = classify_threshold(d_hat, eq.d_star, theta_2)
    if cls is ThresholdClass.UNCHARACTERIZED:
        return PolicyAnalysis(d_hat, cls, theta_star, theta_2)
    u_star = np.asarray(eq.utilities, dtype=float)
    if cls is ThresholdClass.NO_EFFECT:
        profile = np.asarray(eq.t_star, dtype=float)
    else:
        profile = just_qualify(g, d_hat)
    u_hat = utilities(g, profile)
    gains, indifferent = deviation_gains(g, d_hat, profile)
    return PolicyAnalysis(
        d_hat=d_hat,
        classification=cls,
        theta_star=theta_star,
        theta_double_star=theta_2,
        t_hat=profile,
        T_hat=float(profile.sum()),
        u_star=u_star,
        u_hat=u_hat,
        welfare_delta=u_hat - u_star,
        deviation_gain=gains,
        is_equilibrium=bool(np.all(gains <= DEVIATION_TOL * max(1.0, g.V))),
        indifferent=indifferent,
    )
