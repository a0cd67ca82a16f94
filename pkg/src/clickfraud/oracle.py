"""Brute-force checks that share no code with the equilibrium solvers.

Everything here works from the utility function alone: best responses are
found either by root-finding on the marginal utility or by a refined grid
search, and equilibria are checked by searching for profitable deviations.
Strategies above ``V/2`` are never best responses, so searches are confined
to ``[0, V/2]``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import ReducedGame

SEED_ENV = "CLICKFRAUD_SEED"
VIOLATION_TOL = 1e-8


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 20001
    max_iterations: int = 10000
    convergence_tol: float = 1e-10
    refinement_rounds: int = 3

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if self.max_iterations < 1 or self.refinement_rounds < 0:
            raise ValueError("iteration counts must be non-negative")


DEFAULT = OracleConfig()


def payoff(d_i: float, V: float, xi: float, t_i, tau: float):
    """Artist payoff against opponents' aggregate ``tau``; vectorized in ``t_i``."""
    return (d_i + t_i) / (1.0 + t_i + tau) * V - t_i + d_i / xi


def _marginal(d_i, V, t_i, tau):
    return (1.0 - d_i + tau) * V / (1.0 + t_i + tau) ** 2 - 1.0


def root_best_response(g: ReducedGame, i: int, tau: float) -> float:
    d_i = float(g.d[i])
    if g.V <= 0 or _marginal(d_i, g.V, 0.0, tau) <= 0:
        return 0.0
    return float(brentq(lambda x: _marginal(d_i, g.V, x, tau), 0.0, g.V / 2,
                        xtol=1e-15, rtol=4 * np.finfo(float).eps))


def _grid_max(f, lo: float, hi: float, cfg: OracleConfig) -> tuple[float, float]:
    xs = np.linspace(lo, hi, cfg.grid_points)
    vals = f(xs)
    k = int(np.argmax(vals))
    best_x, best_v = xs[k], vals[k]
    step = xs[1] - xs[0]
    for _ in range(cfg.refinement_rounds):
        a, b = max(lo, best_x - 2 * step), min(hi, best_x + 2 * step)
        xs = np.linspace(a, b, cfg.grid_points)
        vals = f(xs)
        k = int(np.argmax(vals))
        if vals[k] >= best_v:
            best_x, best_v = xs[k], vals[k]
        step = xs[1] - xs[0]
    return float(best_x), float(best_v)


def grid_best_response(g: ReducedGame, i: int, tau_i: float,
                       cfg: OracleConfig = DEFAULT) -> float:
    """Grid argmax of the payoff.

    The payoff is flat at its peak, so locating the maximizer from payoff
    values alone is accurate only to about ``sqrt(eps) ~ 1e-8``; iterate
    with a ``convergence_tol`` of that order when using this responder.
    """
    if g.V <= 0:
        return 0.0
    d_i = float(g.d[i])
    x, _ = _grid_max(lambda t: payoff(d_i, g.V, g.xi, t, tau_i), 0.0, g.V / 2, cfg)
    return x


def br_iterate(g: ReducedGame, start, cfg: OracleConfig = DEFAULT,
               responder: str = "root") -> np.ndarray:
    """Cyclic best-response dynamics in ascending artist order."""
    respond = {"root": root_best_response,
               "grid": lambda g, i, tau: grid_best_response(g, i, tau, cfg)}[responder]
    t = np.array(start, dtype=float)
    if t.shape != (g.n,) or np.any(t < 0):
        raise ValueError("start profile must be a non-negative vector of length n")
    for _ in range(cfg.max_iterations):
        change = 0.0
        for i in range(g.n):
            tau = t.sum() - t[i]
            new = respond(g, i, max(tau, 0.0))
            change = max(change, abs(new - t[i]))
            t[i] = new
        if change < cfg.convergence_tol:
            return t
    raise OracleError(f"best-response iteration did not converge in "
                      f"{cfg.max_iterations} sweeps")


@dataclass(frozen=True)
class VerificationReport:
    violations: np.ndarray
    best_deviation: np.ndarray

    @property
    def max_violation(self) -> float:
        return float(self.violations.max())

    @property
    def ok(self) -> bool:
        return self.max_violation <= VIOLATION_TOL

    def to_dict(self) -> dict:
        return {"violations": self.violations.tolist(),
                "best_deviation": self.best_deviation.tolist(),
                "max_violation": self.max_violation,
                "ok": self.ok}


def verify_equilibrium(g: ReducedGame, t, cfg: OracleConfig = DEFAULT) -> VerificationReport:
    """Largest utility gain any artist can get by a unilateral grid deviation."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("profile must be non-negative")
    violations = np.zeros(g.n)
    deviations = np.zeros(g.n)
    for i in range(g.n):
        d_i = float(g.d[i])
        tau = float(t.sum() - t[i])
        hi = max(g.V / 2, t[i], 1e-12)
        x, best = _grid_max(lambda s: payoff(d_i, g.V, g.xi, s, tau), 0.0, hi, cfg)
        current = float(payoff(d_i, g.V, g.xi, t[i], tau))
        violations[i] = max(0.0, best - current)
        deviations[i] = x
    return VerificationReport(violations, deviations)


def best_dominance_gain(g: ReducedGame, i: int, t_points: int = 400,
                        tau_points: int = 400) -> float:
    """Largest gain of any ``t_i`` in ``(0, V/2]`` over honesty, across ``tau`` in ``[0, 3V]``."""
    d_i = float(g.d[i])
    t_hi = g.V / 2 if g.V > 0 else 1.0
    tau_hi = 3 * g.V if g.V > 0 else 3.0
    ts = np.linspace(0.0, t_hi, t_points + 1)[1:]
    taus = np.linspace(0.0, tau_hi, tau_points)
    T, TAU = np.meshgrid(ts, taus)
    gain = payoff(d_i, g.V, g.xi, T, TAU) - payoff(d_i, g.V, g.xi, 0.0, TAU)
    return float(gain.max())


def seed_from_env(default: int = 0) -> int:
    return int(os.environ.get(SEED_ENV, default))


def random_fraud_game(rng: np.random.Generator, n: int, v_max: float = 20.0,
                      xi: float = 0.5) -> ReducedGame:
    """Random strong-technology game: ``d`` uniform on the simplex, ``V`` above the threshold."""
    while True:
        d = rng.dirichlet(np.ones(n))
        V = float(rng.uniform(1.0 / (1.0 - d.min()), v_max))
        g = ReducedGame.from_parameters(d, xi, V)
        # redraw the measure-zero draws that land on the threshold itself
        if g.lambda0 > g.lambda_bar * (1.0 + xi / (1.0 - g.d_min)):
            return g


def random_fraud_free_game(rng: np.random.Generator, n: int, xi: float = 0.5) -> ReducedGame:
    d = rng.dirichlet(np.ones(n))
    hi = 1.0 / (1.0 - d.min())
    V = float(rng.uniform(-1.0, hi))
    return ReducedGame.from_parameters(d, xi, V)
