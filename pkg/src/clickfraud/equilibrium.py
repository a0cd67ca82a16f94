"""Regime classification and the pure-strategy equilibrium of the fraud game.

Two independent solvers are provided:

* :func:`solve_closed_form` enumerates candidate dishonest sets (prefixes of
  the artists sorted by streamshare) and evaluates the aggregate fraud in
  closed form;
* :func:`solve_fixed_point` bisects the aggregate share map
  ``F(T) = sum_i max(d_i, c(T)) / (1 + T) - 1`` with
  ``c(T) = (1 + T) - (1 + T)**2 / V``.

Both must agree; tests hold them to 1e-9.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import ReducedGame, utilities

BOUNDARY_FLAG_TOL = 1e-9
IDENTITY_TOL = 1e-9
BISECT_REL_WIDTH = 1e-12
BISECT_MAX_ITER = 200
# fallback acceptance band for candidate sets when d_i == d* up to rounding
_TIE_TOL = 1e-11


class Regime(str, enum.Enum):
    FRAUD_FREE = "FraudFree"
    FRAUD = "Fraud"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class EquilibriumResult:
    regime: Regime
    T_star: float
    d_star: Optional[float]
    dishonest: tuple
    t_star: np.ndarray
    utilities: np.ndarray
    worst_case: bool
    bounds: Optional[tuple]
    near_boundary: bool = False
    d: np.ndarray = field(default=None, repr=False)

    @property
    def n_d(self) -> int:
        return len(self.dishonest)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "T_star": self.T_star,
            "d_star": self.d_star,
            "dishonest": list(self.dishonest),
            "n_d": self.n_d,
            "t_star": self.t_star.tolist(),
            "utilities": self.utilities.tolist(),
            "worst_case": self.worst_case,
            "bounds": None if self.bounds is None else list(self.bounds),
            "near_boundary": self.near_boundary,
        }

    def artist_rows(self) -> list[tuple]:
        """One ``(index, d, t_star, utility)`` row per artist."""
        return [(i, float(self.d[i]), float(self.t_star[i]), float(self.utilities[i]))
                for i in range(len(self.t_star))]


def h(d_i: float) -> float:
    """Honesty threshold on V for an artist with streamshare ``d_i``."""
    if not 0 <= d_i < 1:
        raise ValueError(f"streamshare must lie in [0, 1), got {d_i}")
    if d_i <= 0.5:
        return 1.0 / (1.0 - d_i)
    return 4.0 * d_i


def honesty_dominant(g: ReducedGame, i: int) -> bool:
    """Whether ``t_i = 0`` strictly dominates every positive fraud level."""
    if g.V <= 0:
        return True
    return bool(g.V <= h(float(g.d[i])))


def fraud_threshold(g: ReducedGame) -> float:
    """Largest lambda0 for which honesty is dominant for every artist."""
    return g.lambda_bar * (1.0 + g.xi / (1.0 - g.d_min))


def near_boundary(g: ReducedGame) -> bool:
    return abs(g.V - 1.0 / (1.0 - g.d_min)) < BOUNDARY_FLAG_TOL


def classify(g: ReducedGame) -> Regime:
    # compared on the lambda0 scale so that a lambda0 placed exactly on the
    # threshold is not pushed over it by the rounding in V
    if g.V <= 0 or g.lambda0 <= fraud_threshold(g):
        return Regime.FRAUD_FREE
    return Regime.FRAUD


def _br(d_i: float, V: float, tau: float) -> float:
    if V <= 0:
        return 0.0
    return max(0.0, math.sqrt((1.0 - d_i + tau) * V) - (1.0 + tau))


def best_response(g: ReducedGame, i: int, tau_i: float) -> float:
    """Utility-maximizing ``t_i`` against aggregate opponent fraud ``tau_i``."""
    if tau_i < 0:
        raise ValueError("opponent aggregate must be non-negative")
    return _br(float(g.d[i]), g.V, tau_i)


def foc_residual(g: ReducedGame, t, i: int) -> float:
    """Marginal utility of artist ``i`` at profile ``t``."""
    t = np.asarray(t, dtype=float)
    total = 1.0 + t.sum()
    tau = t.sum() - t[i]
    return float((1.0 - g.d[i] + tau) * g.V / total**2 - 1.0)


def bounds_envelope(n_d: int, V: float) -> tuple[float, float]:
    """Lower and upper envelopes of ``1 + T*`` given ``n_d`` cheaters."""
    if n_d < 1:
        raise ValueError("n_d must be at least 1")
    if V <= 0:
        raise ValueError("V must be positive")
    a = (n_d - 1) * V / (2 * n_d)
    return (n_d - 1) * V / n_d, math.sqrt(a * a + V / n_d) + a


def is_worst_case(g: ReducedGame) -> bool:
    n = g.n
    return bool(g.d_max < (n - 1) * g.V / n**2)


def aggregate_map(g: ReducedGame, T: float) -> float:
    """``F(T)``; its unique zero on ``[0, V-1]`` is the equilibrium aggregate."""
    r = 1.0 + T
    cut = r - r * r / g.V
    return float(np.maximum(g.d, cut).sum() / r - 1.0)


def _require_fraud(g: ReducedGame, check_regime: bool) -> None:
    if check_regime and classify(g) is not Regime.FRAUD:
        raise SolverError("game is in the fraud-free regime; no fraud equilibrium")
    if g.V < 1:
        # uniqueness is only established for V >= 1
        raise SolverError(f"fraud branch needs V >= 1, got V={g.V}")


def _result(g: ReducedGame, T: float, d_star: float, dishonest) -> EquilibriumResult:
    dishonest = tuple(sorted(int(i) for i in dishonest))
    t = np.zeros(g.n)
    for i in dishonest:
        t[i] = max(d_star - g.d[i], 0.0)
    t.setflags(write=False)
    u = utilities(g, t)
    u.setflags(write=False)
    n_d = len(dishonest)
    return EquilibriumResult(
        regime=Regime.FRAUD,
        T_star=float(T),
        d_star=float(d_star),
        dishonest=dishonest,
        t_star=t,
        utilities=u,
        worst_case=n_d == g.n,
        bounds=bounds_envelope(n_d, g.V),
        near_boundary=near_boundary(g),
        d=g.d,
    )


def fraud_free_result(g: ReducedGame) -> EquilibriumResult:
    t = np.zeros(g.n)
    t.setflags(write=False)
    u = utilities(g, t)
    u.setflags(write=False)
    return EquilibriumResult(Regime.FRAUD_FREE, 0.0, None, (), t, u, False, None,
                             near_boundary(g), g.d)


def _candidates(g: ReducedGame):
    order = np.argsort(g.d, kind="stable")
    ds = g.d[order]
    csum = np.cumsum(ds)
    V = g.V
    for k in range(1, g.n + 1):
        a = (k - 1) * V / (2 * k)
        r = math.sqrt(a * a + (1.0 - csum[k - 1]) * V / k) + a
        T = r - 1.0
        d_star = (csum[k - 1] + T) / k
        # cheaters strictly below the cutoff, everyone else at or above it
        low = ds[k - 1] - d_star
        high = d_star - ds[k] if k < g.n else -math.inf
        yield k, order[:k], T, d_star, low < 0 and high <= 0, max(low, high)


def solve_closed_form(g: ReducedGame, check_regime: bool = True) -> EquilibriumResult:
    _require_fraud(g, check_regime)
    candidates = list(_candidates(g))
    chosen = next((c for c in candidates if c[4]), None)
    if chosen is None:
        chosen = next((c for c in candidates if c[5] <= _TIE_TOL * max(1.0, g.V)), None)
    if chosen is None:
        raise SolverError("no consistent dishonest set; closed form failed")
    k, members, T, d_star, _, _ = chosen
    r = 1.0 + T
    if abs(d_star - (r - r * r / g.V)) > IDENTITY_TOL:
        raise SolverError(f"cutoff identity violated: d*={d_star}, "
                          f"(1+T)-(1+T)^2/V={r - r * r / g.V}")
    return _result(g, T, d_star, members)


def solve_fixed_point(g: ReducedGame, check_regime: bool = True) -> EquilibriumResult:
    _require_fraud(g, check_regime)
    lo, hi = 0.0, g.V - 1.0
    if aggregate_map(g, lo) < 0 or aggregate_map(g, hi) > 0:
        raise SolverError("aggregate map does not bracket a root on [0, V-1]")
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_REL_WIDTH * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if aggregate_map(g, mid) > 0:
            lo = mid
        else:
            hi = mid
    else:
        raise SolverError("bisection did not converge")
    T = 0.5 * (lo + hi)
    r = 1.0 + T
    d_star = r - r * r / g.V
    members = np.flatnonzero(g.d < d_star)
    if len(members) == 0:
        raise SolverError("fixed point yields an empty dishonest set")
    return _result(g, T, d_star, members)


def solve(g: ReducedGame) -> EquilibriumResult:
    """Equilibrium of ``g`` in whichever regime applies."""
    if classify(g) is Regime.FRAUD_FREE:
        return fraud_free_result(g)
    return solve_closed_form(g)
