"""Command line front end.

Exit codes: 0 success, 2 unreadable or invalid input, 3 solver or
verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import equilibrium as eqm
from . import fairness, oracle, policy, report, rules
from .model import ReducedGame, Scenario, ScenarioError, reduce

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3

SWEEP_PARAMS = ("lambda0", "alpha", "d_hat")
SWEEP_HEADER = ["value", "regime", "T_star", "n_d", "d_star", "min_utility", "fairer"]


class InputError(Exception):
    pass


def load_input(path):
    """Parse a scenario file, or a pre-reduced game with explicit ``d``, ``xi``, ``V``.

    Returns ``(scenario_or_None, game, extras)`` where ``extras`` carries any
    ``alpha``/``d_hat``/``lambda_hat`` keys present in the file.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    extras = {k: data[k] for k in ("alpha", "d_hat", "lambda_hat") if k in data}
    try:
        if "d" in data:
            for key in ("xi", "V"):
                if key not in data:
                    raise InputError(f"pre-reduced game is missing field '{key}'")
            game = ReducedGame.from_parameters(
                data["d"], data["xi"], data["V"],
                lambda_bar=data.get("lambda_bar", 1.0), m=data.get("m", 1.0),
                uc_shares=data.get("uc_shares"))
            return None, game, extras
        scenario = Scenario.from_dict(data, renormalize=bool(data.get("renormalize", False)))
        return scenario, reduce(scenario), extras
    except ScenarioError as exc:
        raise InputError(f"invalid scenario: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid field value: {exc}") from exc


def _emit(args, name, payload, header=None, rows=None):
    formats = {"json", "csv"} if args.format == "both" else {args.format}
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    if "json" in formats and payload is not None:
        text = report.to_json(payload)
        if out:
            (out / f"{name}.json").write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)
    if "csv" in formats and header is not None:
        text = report.to_csv(header, rows)
        if out:
            (out / f"{name}.csv").write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)


def _verify(args, game, t, payload) -> bool:
    if not args.verify:
        return True
    rep = oracle.verify_equilibrium(game, t)
    payload["verification"] = rep.to_dict()
    return rep.ok


def _d_hat(args, game, extras):
    if args.d_hat is not None:
        return args.d_hat
    if args.lambda_hat is not None:
        return policy.d_hat_from_streams(args.lambda_hat, game.m, game.lambda_bar)
    if "d_hat" in extras:
        return float(extras["d_hat"])
    if "lambda_hat" in extras:
        return policy.d_hat_from_streams(float(extras["lambda_hat"]), game.m, game.lambda_bar)
    raise InputError("policy needs --d-hat, --lambda-hat, or d_hat/lambda_hat in the input")


def cmd_solve(args, scenario, game, extras) -> int:
    result = eqm.solve(game)
    payload = {"equilibrium": result.to_dict()}
    if result.regime is eqm.Regime.FRAUD:
        payload["fairness"] = fairness.compare(game, result).to_dict()
    ok = _verify(args, game, result.t_star, payload)
    _emit(args, "solve", payload, ["index", "d", "t_star", "utility"], result.artist_rows())
    return EXIT_OK if ok else EXIT_SOLVER


def cmd_fairness(args, scenario, game, extras) -> int:
    result = eqm.solve(game)
    if result.regime is not eqm.Regime.FRAUD:
        payload = {"regime": result.regime.value, "fairness": None,
                   "u_zero": fairness.fraud_free_profile(game).tolist()}
        _emit(args, "fairness", payload, ["artist", "u_zero", "u_star", "delta"],
              [(i, u, u, 0.0) for i, u in enumerate(result.utilities)])
        return EXIT_OK
    rep = fairness.compare(game, result)
    payload = {"regime": result.regime.value, "fairness": rep.to_dict()}
    if result.worst_case:
        payload["worst_case_fairer"] = fairness.worst_case_fairer(game.n, game.d_min, game.V)
    ok = _verify(args, game, result.t_star, payload)
    _emit(args, "fairness", payload, ["artist", "u_zero", "u_star", "delta"], rep.rows())
    return EXIT_OK if ok else EXIT_SOLVER


def cmd_weighted(args, scenario, game, extras) -> int:
    alpha = args.alpha if args.alpha is not None else extras.get("alpha")
    if alpha is None:
        raise InputError("weighted needs --alpha or an alpha field in the input")
    try:
        params = rules.WeightedRuleParams(float(alpha))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    result = rules.solve_weighted(game, params)
    bound = rules.max_alpha(game)
    payload = {
        "alpha": params.alpha,
        "max_alpha": bound.value,
        "already_fraud_free": bound.already_fraud_free,
        "fraud_free": rules.weighted_dominance_threshold(game, params),
        "equilibrium": result.to_dict(),
    }
    ok = _verify(args, rules.weighted_game(game, params), result.t_star, payload)
    _emit(args, "weighted", payload, ["index", "d", "t_star", "utility"], result.artist_rows())
    return EXIT_OK if ok else EXIT_SOLVER


def cmd_policy(args, scenario, game, extras) -> int:
    d_hat = _d_hat(args, game, extras)
    if d_hat < 0:
        raise InputError("qualification threshold must be non-negative")
    result = eqm.solve(game)
    if result.regime is not eqm.Regime.FRAUD:
        payload = {"regime": result.regime.value, "policy": None,
                   "note": "no fraud at baseline; qualification threshold not analyzed"}
        _emit(args, "policy", payload, ["artist", "u_star", "u_hat", "delta"], [])
        return EXIT_OK
    analysis = policy.analyze(game, result, d_hat)
    payload = {"regime": result.regime.value, "d_star": result.d_star,
               "policy": analysis.to_dict()}
    # a failed equilibrium check is reported in the payload, not as an error
    _emit(args, "policy", payload, ["artist", "u_star", "u_hat", "delta"], analysis.rows())
    return EXIT_OK


def sweep_points(lo: float, hi: float, steps: int) -> list[float]:
    if steps == 1:
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, steps)]


def sweep_row(param: str, value: float, scenario, game) -> list:
    if param == "lambda0":
        g = reduce(scenario.with_lambda0(value)) if scenario else game.with_lambda0(value)
        res = eqm.solve(g)
        fairer = (fairness.compare(g, res).fairer
                  if res.regime is eqm.Regime.FRAUD else None)
    elif param == "alpha":
        res = rules.solve_weighted(game, value)
        fairer = None
        if res.regime is eqm.Regime.FRAUD:
            u_zero = rules.weighted_utilities(game, value, np.zeros(game.n))
            fairer = bool(res.utilities.min() > u_zero.min())
    else:
        base = eqm.solve(game)
        if base.regime is not eqm.Regime.FRAUD:
            return [value, base.regime.value, 0.0, 0, None, float(base.utilities.min()), None]
        analysis = policy.analyze(game, base, value)
        if analysis.t_hat is None:
            return [value, analysis.classification.value, None, None, None, None, None]
        u0 = fairness.fraud_free_profile(game)
        n_d = int(np.count_nonzero(analysis.t_hat > 0))
        return [value, analysis.classification.value, analysis.T_hat, n_d,
                max(value, base.d_star), float(analysis.u_hat.min()),
                bool(analysis.u_hat.min() > u0.min())]
    return [value, res.regime.value, res.T_star, res.n_d, res.d_star,
            float(res.utilities.min()), fairer]


def cmd_sweep(args, scenario, game, extras) -> int:
    if args.param not in SWEEP_PARAMS:
        raise InputError(f"--param must be one of {SWEEP_PARAMS}")
    if args.min is None or args.max is None:
        raise InputError("sweep needs --min and --max")
    if args.steps < 1 or args.min > args.max:
        raise InputError("sweep needs steps >= 1 and min <= max")
    if args.param == "alpha" and not (0 < args.min and args.max <= 1):
        raise InputError("alpha sweep must stay inside (0, 1]")
    if args.param == "d_hat" and args.min < 0:
        raise InputError("d_hat sweep must be non-negative")
    if args.param == "lambda0" and args.min <= 0:
        raise InputError("lambda0 sweep must be positive")
    rows = [sweep_row(args.param, v, scenario, game)
            for v in sweep_points(args.min, args.max, args.steps)]
    header = [args.param] + SWEEP_HEADER[1:]
    payload = {"param": args.param, "rows": [dict(zip(header, r)) for r in rows]}
    _emit(args, "sweep", payload, header, rows)
    return EXIT_OK


def cmd_oracle_check(args, scenario, game, extras) -> int:
    rng = np.random.default_rng(args.seed)
    if game is not None:
        games = [game]
    else:
        games = [oracle.random_fraud_game(rng, int(rng.integers(2, 7)))
                 for _ in range(args.games)]
    rows, worst = [], 0.0
    ok = True
    for k, g in enumerate(games):
        if eqm.classify(g) is eqm.Regime.FRAUD_FREE:
            t = oracle.br_iterate(g, np.zeros(g.n))
            rows.append([k, g.n, g.V, "FraudFree", float(np.abs(t).max()), 0.0, 0.0])
            continue
        cf = eqm.solve_closed_form(g)
        fp = eqm.solve_fixed_point(g)
        br = oracle.br_iterate(g, rng.uniform(0, g.V / 2, g.n))
        ver = oracle.verify_equilibrium(g, cf.t_star)
        d_fp = float(np.abs(fp.t_star - cf.t_star).max())
        d_br = float(np.abs(br - cf.t_star).max())
        ok &= d_fp <= 1e-9 and d_br <= 1e-6 and ver.ok
        worst = max(worst, d_fp, d_br)
        rows.append([k, g.n, g.V, "Fraud", d_fp, d_br, ver.max_violation])
    header = ["game", "n", "V", "regime", "fixed_point_gap", "br_gap", "max_violation"]
    payload = {"seed": args.seed, "games": len(games), "max_gap": worst, "ok": ok}
    _emit(args, "oracle_check", payload, header, rows)
    return EXIT_OK if ok else EXIT_SOLVER


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "fairness": cmd_fairness,
    "weighted": cmd_weighted,
    "policy": cmd_policy,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clickfraud",
                                     description="Click-fraud equilibria under pro-rata sharing")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", help="scenario or reduced-game JSON file")
    parser.add_argument("--out", help="output directory (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv", "both"), default=None,
                        help="default: csv for sweep, json otherwise")
    parser.add_argument("--param", help="sweep parameter: lambda0, alpha or d_hat")
    parser.add_argument("--min", type=float)
    parser.add_argument("--max", type=float)
    parser.add_argument("--steps", type=int, default=1)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--d-hat", dest="d_hat", type=float)
    parser.add_argument("--lambda-hat", dest="lambda_hat", type=float,
                        help="qualification threshold in raw streams")
    parser.add_argument("--verify", action="store_true",
                        help="check every emitted equilibrium with the grid oracle")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default: ${oracle.SEED_ENV} or 0)")
    parser.add_argument("--games", type=int, default=100,
                        help="random games for oracle-check without --input")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = oracle.seed_from_env()
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "json"
    try:
        if args.input is None:
            if args.command != "oracle-check":
                raise InputError("--input is required")
            scenario = game = None
            extras = {}
        else:
            scenario, game, extras = load_input(args.input)
        return COMMANDS[args.command](args, scenario, game, extras)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (eqm.SolverError, oracle.OracleError, fairness.FairnessError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
