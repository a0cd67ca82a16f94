"""Platform scenarios, the normalized fraud game, and monetary net gains.

A :class:`Scenario` holds raw platform data (per-user streams, per-user
stream shares, fee split, fraud cost and fraud technology).  :func:`reduce`
maps it to a :class:`ReducedGame`, in which artist ``i`` picks a fake-stream
ratio ``t_i >= 0`` and earns

    u_i(t) = (d_i + t_i) / (1 + sum(t)) * V - t_i + d_i / xi.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

COLUMN_TOL = 1e-9
REL_TOL = 1e-9


class ScenarioError(ValueError):
    """Raised when a scenario or game fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    field: str
    index: Optional[int]
    value: object
    message: str

    def __str__(self):
        where = self.field if self.index is None else f"{self.field}[{self.index}]"
        return f"{where}={self.value!r}: {self.message}"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    """Raw platform data.

    ``stream_shares`` is an ``n x m`` matrix whose column ``j`` is user
    ``j``'s split of streams across artists.
    """

    n: int
    m: int
    user_streams: np.ndarray
    stream_shares: np.ndarray
    beta: float
    delta: float
    lambda0: float

    def __post_init__(self):
        object.__setattr__(self, "user_streams", _frozen(self.user_streams))
        object.__setattr__(self, "stream_shares", _frozen(self.stream_shares))

    @property
    def lambda_bar(self) -> float:
        return float(np.mean(self.user_streams))

    def with_lambda0(self, lambda0: float) -> "Scenario":
        return Scenario(self.n, self.m, self.user_streams, self.stream_shares,
                        self.beta, self.delta, float(lambda0))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "user_streams": self.user_streams.tolist(),
            "stream_shares": self.stream_shares.tolist(),
            "beta": self.beta,
            "delta": self.delta,
            "lambda0": self.lambda0,
        }

    @classmethod
    def from_dict(cls, data: dict, renormalize: bool = False) -> "Scenario":
        missing = [k for k in ("n", "m", "user_streams", "stream_shares",
                               "beta", "delta", "lambda0") if k not in data]
        if missing:
            raise ScenarioError(Violation(k, None, None, "missing field")
                                for k in missing)
        shares = np.array(data["stream_shares"], dtype=float)
        if renormalize and shares.ndim == 2:
            shares = shares / shares.sum(axis=0, keepdims=True)
        return cls(int(data["n"]), int(data["m"]), data["user_streams"], shares,
                   float(data["beta"]), float(data["delta"]),
                   float(data["lambda0"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str, renormalize: bool = False) -> "Scenario":
        return cls.from_dict(json.loads(text), renormalize=renormalize)


@dataclass(frozen=True)
class ReducedGame:
    """Normalized game.

    ``lambda0``, ``lambda_bar`` and ``m`` are kept so that utilities can be
    mapped back to money and so the weighted rule can evaluate its
    user-centric constant.  ``beta``/``delta`` are ``None`` for games that
    were supplied already reduced.
    """

    d: np.ndarray
    xi: float
    V: float
    lambda_bar: float
    m: float
    lambda0: float
    uc_shares: Optional[np.ndarray] = None
    beta: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "d", _frozen(self.d))
        if self.uc_shares is not None:
            object.__setattr__(self, "uc_shares", _frozen(self.uc_shares))

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def d_min(self) -> float:
        return float(self.d.min())

    @property
    def d_max(self) -> float:
        return float(self.d.max())

    @property
    def money_scale(self) -> float:
        """Monetary value of one unit of utility, m*lambda_bar*(delta-beta)/lambda0."""
        if self.beta is None or self.delta is None:
            raise ValueError("game has no monetary primitives (beta, delta)")
        return self.m * self.lambda_bar * (self.delta - self.beta) / self.lambda0

    def with_value(self, V: float) -> "ReducedGame":
        """Same game with the fraud value replaced; lambda0 follows V."""
        return ReducedGame(self.d, self.xi, V, self.lambda_bar, self.m,
                           self.lambda_bar * (1.0 + self.xi * V),
                           self.uc_shares, self.beta, self.delta)

    def with_lambda0(self, lambda0: float) -> "ReducedGame":
        """Same game under a different fraud technology; V is re-derived."""
        V = (lambda0 - self.lambda_bar) / (self.xi * self.lambda_bar)
        return ReducedGame(self.d, self.xi, V, self.lambda_bar, self.m, float(lambda0),
                           self.uc_shares, self.beta, self.delta)

    def t_from_x(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.lambda0 / (self.m * self.lambda_bar)

    def x_from_t(self, t) -> np.ndarray:
        return np.asarray(t, dtype=float) * self.m * self.lambda_bar / self.lambda0

    @classmethod
    def from_parameters(cls, d: Sequence[float], xi: float, V: float,
                        lambda_bar: float = 1.0, m: float = 1.0,
                        uc_shares=None) -> "ReducedGame":
        """Build a game directly from ``(d, xi, V)``.

        lambda0 is backed out from ``lambda_bar * (1 + xi*V)``.
        """
        game = cls(d, float(xi), float(V), float(lambda_bar), float(m),
                   float(lambda_bar) * (1.0 + float(xi) * float(V)), uc_shares)
        problems = validate_game(game)
        if problems:
            raise ScenarioError(problems)
        return game


def validate(scenario: Scenario) -> list[Violation]:
    out: list[Violation] = []
    if scenario.n < 2:
        out.append(Violation("n", None, scenario.n, "need at least 2 artists"))
    if scenario.m < 1:
        out.append(Violation("m", None, scenario.m, "need at least 1 user"))
    lam = scenario.user_streams
    if lam.shape != (scenario.m,):
        out.append(Violation("user_streams", None, lam.shape,
                             f"expected length {scenario.m}"))
    else:
        for j, v in enumerate(lam):
            if not v > 0:
                out.append(Violation("user_streams", j, float(v), "must be positive"))
    pi = scenario.stream_shares
    if pi.shape != (scenario.n, scenario.m):
        out.append(Violation("stream_shares", None, pi.shape,
                             f"expected shape ({scenario.n}, {scenario.m})"))
    else:
        bad = np.argwhere((pi < 0) | (pi > 1) | ~np.isfinite(pi))
        for i, j in bad:
            out.append(Violation("stream_shares", int(i) * scenario.m + int(j),
                                 float(pi[i, j]), "share outside [0, 1]"))
        for j, s in enumerate(pi.sum(axis=0)):
            if abs(s - 1.0) > COLUMN_TOL:
                out.append(Violation("stream_shares column", j, float(s),
                                     "column must sum to 1"))
    if not 0 < scenario.beta < 1:
        out.append(Violation("beta", None, scenario.beta, "beta must lie in (0, 1)"))
    if not scenario.delta > 1:
        out.append(Violation("delta", None, scenario.delta, "delta must exceed 1"))
    if not scenario.lambda0 > 0:
        out.append(Violation("lambda0", None, scenario.lambda0, "lambda0 must be positive"))
    if not out:
        d = streamshares(scenario)
        for i, di in enumerate(d):
            if not di < 1:
                out.append(Violation("d", i, float(di), "monopolist artist excluded"))
    return out


def validate_game(g: ReducedGame) -> list[Violation]:
    out: list[Violation] = []
    if g.n < 2:
        out.append(Violation("d", None, g.n, "need at least 2 artists"))
    for i, di in enumerate(g.d):
        if not 0 <= di < 1:
            out.append(Violation("d", i, float(di), "streamshare must lie in [0, 1)"))
    if abs(float(g.d.sum()) - 1.0) > COLUMN_TOL:
        out.append(Violation("d", None, float(g.d.sum()), "streamshares must sum to 1"))
    if not g.xi > 0:
        out.append(Violation("xi", None, g.xi, "fraud premium must be positive"))
    if not np.isfinite(g.V):
        out.append(Violation("V", None, g.V, "fraud value must be finite"))
    if not g.lambda_bar > 0:
        out.append(Violation("lambda_bar", None, g.lambda_bar, "must be positive"))
    return out


def streamshares(scenario: Scenario) -> np.ndarray:
    lam = scenario.user_streams
    return scenario.stream_shares @ lam / lam.sum()


def reduce(scenario: Scenario) -> ReducedGame:
    problems = validate(scenario)
    if problems:
        raise ScenarioError(problems)
    lam_bar = scenario.lambda_bar
    xi = (scenario.delta - scenario.beta) / scenario.beta
    V = (scenario.lambda0 - lam_bar) / (xi * lam_bar)
    return ReducedGame(
        d=streamshares(scenario),
        xi=xi,
        V=V,
        lambda_bar=lam_bar,
        m=float(scenario.m),
        lambda0=scenario.lambda0,
        uc_shares=scenario.stream_shares.sum(axis=1),
        beta=scenario.beta,
        delta=scenario.delta,
    )


def _check_index(g: ReducedGame, i: int) -> None:
    if not 0 <= i < g.n:
        raise IndexError(f"artist index {i} out of range for {g.n} artists")


def utility(g: ReducedGame, t, i: int) -> float:
    _check_index(g, i)
    t = np.asarray(t, dtype=float)
    return float((g.d[i] + t[i]) / (1.0 + t.sum()) * g.V - t[i] + g.d[i] / g.xi)


def utilities(g: ReducedGame, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return (g.d + t) / (1.0 + t.sum()) * g.V - t + g.d / g.xi


def _raw_fraud(scenario: Scenario, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (scenario.n,):
        raise ValueError(f"fraud vector must have length {scenario.n}")
    if np.any(x < 0):
        raise ValueError("fraud activity must be non-negative")
    return x


def net_gain_prorata(scenario: Scenario, x, i: int) -> float:
    """Monetary net gain of artist ``i`` under pro-rata with fraud levels ``x``."""
    x = _raw_fraud(scenario, x)
    real = scenario.stream_shares @ scenario.user_streams
    total_real = scenario.user_streams.sum()
    share = (real[i] + scenario.lambda0 * x[i]) / (total_real + scenario.lambda0 * x.sum())
    pool = (scenario.m + x.sum()) * scenario.beta
    return float(share * pool - scenario.delta * x[i])


def net_gain_usercentric(scenario: Scenario, x, i: int) -> float:
    x = _raw_fraud(scenario, x)
    paid = scenario.stream_shares[i].sum()
    return float((paid + x[i]) * scenario.beta - scenario.delta * x[i])
