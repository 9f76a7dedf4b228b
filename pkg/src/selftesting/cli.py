"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numerical or precondition error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import builtins as bi
from .algebras import Representation
from .config import DEFAULT, Config
from .errors import InvalidInputError, PreconditionError, SelfTestingError
from .families import builtin_family
from .games import XorGame, as_game, see_saw_optimize, winning_probability, xor_biases
from .gowers_hatami import (EpsilonRep, RDecomposition, RTerm, check_ucp, cl2_decompositions, cl2_ideal,
                            cl2_relations, cl2_theta, cl2_theta_averaged, gh_bound_check)
from .polynomials import StarPolynomial
from .selftest import pair_robustness_residuals, robustness_sweep, spectral_gap
from .serialize import (fmt12, game_from_json, gh_report_to_json, load_json, matrix_from_json,
                        strategy_from_json, strategy_to_json, sweep_to_csv, sweep_to_json, to_jsonable)
from .strategies import flags

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInputError(f"--grid: expected lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInputError(f"--grid: cannot parse {text!r}") from None
    if n < 1:
        raise InvalidInputError("--grid: schedule is empty (n must be at least 1)")
    return np.linspace(lo, hi, n)


def parse_tols(items: list[str] | None) -> Config:
    cfg = DEFAULT
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            key, val = "rel_tol", item
        if key not in DEFAULT.__dataclass_fields__:
            raise InvalidInputError(f"--tol: unknown tolerance {key!r}")
        try:
            num = type(getattr(DEFAULT, key))(float(val))
        except ValueError:
            raise InvalidInputError(f"--tol: bad value {val!r} for {key}") from None
        if num <= 0:
            raise InvalidInputError(f"--tol: {key} must be positive")
        cfg = cfg.with_overrides(**{key: num})
    return cfg


def load_game(spec: str):
    if spec in bi.GAMES:
        return bi.builtin_game(spec)
    return game_from_json(load_json(spec), "game")


def load_strategy(spec: str | None, game_spec: str, game):
    if spec in (None, "ideal"):
        return bi.builtin_ideal(game_spec)
    return strategy_from_json(load_json(spec), "strategy", game)


def _ideal_value(game_spec: str, cfg: Config):
    if game_spec not in bi.IDEALS:
        return None
    ideal = bi.builtin_ideal(game_spec)
    return spectral_gap(bi.builtin_game(game_spec), ideal.bipartite_rep(), cfg=cfg)


def cmd_analyze(args, cfg: Config) -> dict:
    G = load_game(args.game)
    S = load_strategy(args.strategy, args.game, G)
    g = as_game(G)
    if S.shape != g.shape:
        raise InvalidInputError(f"strategy shape {S.shape} does not match game shape {g.shape}")
    p = S.correlation()
    w = winning_probability(g, p)
    f = flags(S, cfg)
    out = {"command": "analyze", "game": args.game, "value": w, "correlation": p.p,
           "flags": {"projective": f.projective, "fullRank": f.fullRank, "centrallySupported": f.centrallySupported}}
    spec = _ideal_value(args.game, cfg)
    if spec is not None:
        out["quantumValue"] = spec.topValue
        out["eps"] = spec.topValue - w
    if isinstance(G, XorGame) and f.projective:
        try:
            r, c = xor_biases(G, S, cfg)
            out["biases"] = {"rows": r, "cols": c}
        except SelfTestingError:
            pass
    return out


def cmd_value(args, cfg: Config) -> dict:
    G = load_game(args.game)
    t0 = time.perf_counter()
    res = see_saw_optimize(G, args.dA, args.dB, seed=args.seed, restarts=args.restarts, iters=args.iters, cfg=cfg)
    return {"command": "value", "game": args.game, "dA": args.dA, "dB": args.dB, "seed": args.seed,
            "restarts": args.restarts, "value": res.value, "bestRestart": res.restart,
            "restartValues": res.values, "seconds": time.perf_counter() - t0,
            "strategy": strategy_to_json(res.model, G)}


def cmd_gap(args, cfg: Config) -> dict:
    G = load_game(args.game)
    S = load_strategy(args.strategy, args.game, G)
    rep = spectral_gap(G, S.bipartite_rep(), cfg=cfg)
    out = {"command": "gap", "game": args.game, "definition": rep.as_dict()}
    if args.game == "chsh":
        out["displayed"] = spectral_gap(G, S.bipartite_rep(), bi.chsh_displayed_polynomial(), cfg).as_dict()
    return out


def cmd_pair(args, cfg: Config) -> dict:
    G = load_game(args.game)
    S = load_strategy(args.strategy, args.game, G)
    pair = bi.builtin_pair(args.pair or args.game)
    r = pair_robustness_residuals(S, pair, cfg=cfg)
    return {"command": "pair", "game": args.game, "pair": pair.name, "condI": r.condI, "condII": r.condII,
            "condIII": r.condIII, "relations": [str(p) for p in pair.relations],
            "reducedRelations": [str(p) for p in pair.reduced_relations or []]}


def cmd_sweep(args, cfg: Config):
    params = parse_grid(args.grid)
    game_spec = args.game
    if game_spec != "chsh":
        raise InvalidInputError("sweep families are defined for the built-in 'chsh' game only")
    G = bi.chsh()
    pair = bi.builtin_pair(args.pair or game_spec)
    family = builtin_family(args.family)
    report = robustness_sweep(G, pair, bi.chsh_ideal(), family, params, cfg)
    if args.format == "csv":
        text = sweep_to_csv(report)
        for k, v in report.fits.items():
            text += f"# fit {k}: " + ("none" if v is None else f"exponent={fmt12(v.exponent)} constant={fmt12(v.constant)}") + "\n"
        return text
    return sweep_to_json(report, {"command": "sweep", "game": game_spec, "grid": args.grid, "seed": args.seed})


def _decomps_from_json(obj) -> dict[str, RDecomposition]:
    if not isinstance(obj, dict):
        raise InvalidInputError("decompositions: expected an object keyed by generator")
    out = {}
    for g, d in obj.items():
        path = f"decompositions[{g!r}]"
        try:
            rels = [StarPolynomial.parse(t) for t in d["relations"]]
            norms = {int(k): float(v) for k, v in d["norms"].items()}
            terms = []
            for k, t in enumerate(d["terms"]):
                lam = t["lambda"]
                lam = complex(*lam) if isinstance(lam, list) else complex(lam)
                u = StarPolynomial.parse(t.get("u") or "1")
                v = StarPolynomial.parse(t.get("v") or "1")
                if len(u.terms) != 1 or len(v.terms) != 1:
                    raise InvalidInputError(f"{path}.terms[{k}]: u and v must be monomials")
                (uw, uc), = u.terms.items()
                (vw, vc), = v.terms.items()
                terms.append(RTerm(lam * uc * vc, uw, int(t["rel"]), vw, bool(t.get("adjoint", False))))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"{path}: malformed decomposition ({exc})") from None
        out[g] = RDecomposition(terms, rels, norms)
    return out


def _gh_family_input(name: str, t: float) -> tuple[EpsilonRep, Representation]:
    S, _, _ = builtin_family(name)(t)
    A, B = bi.chsh_observables()
    if name == "alice-rotation":
        obs, rho = S.alice[:, 0] - S.alice[:, 1], S.rho_A()
        ideal = Representation.unitary({"b0": A[0], "b1": A[1]})
    else:
        obs, rho = S.bob[:, 0] - S.bob[:, 1], S.rho_B()
        ideal = cl2_ideal()
    rep = Representation.unitary({"b0": obs[0], "b1": obs[1]})
    return EpsilonRep(rep, rho, cl2_relations()), ideal


def cmd_gh(args, cfg: Config) -> dict:
    theta = cl2_theta_averaged() if args.map == "averaged" else cl2_theta()
    decomps = (_decomps_from_json(load_json(args.decomps)) if args.decomps
               else cl2_decompositions(averaged=args.map == "averaged"))
    points = []
    if args.rep:
        obj = load_json(args.rep)
        if not isinstance(obj, dict) or "images" not in obj:
            raise InvalidInputError("rep: expected an object with 'images' (and optional 'rho')")
        imgs = {k: matrix_from_json(v, f"rep.images[{k!r}]") for k, v in obj["images"].items()}
        rep = Representation.unitary(imgs).validate(cfg)
        rho = matrix_from_json(obj["rho"], "rep.rho") if "rho" in obj else np.eye(rep.dim) / rep.dim
        points.append((None, EpsilonRep(rep, rho, cl2_relations()), cl2_ideal()))
    else:
        grid = parse_grid(args.grid) if args.grid else np.array([args.param])
        for t in grid:
            e, ideal = _gh_family_input(args.family, float(t))
            points.append((float(t), e, ideal))
    results = []
    for t, e, ideal in points:
        ok, lo = check_ucp(theta.unit_images(e.rep, ideal), cfg)
        if not ok:
            raise PreconditionError(f"lift {theta.name} is not ucp at this representation (Choi eigenvalue {lo:.3e})")
        rows = gh_bound_check(e, theta, decomps, ideal, cfg=cfg)
        results.append(gh_report_to_json(rows, {"param": t, "minChoiEig": lo}))
    return {"command": "gh", "map": theta.name, "family": None if args.rep else args.family,
            "points": results, "ok": all(r["ok"] for r in results)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selftesting", description="Self-testing numerics for nonlocal games.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a tolerance (bare number sets rel_tol); repeatable")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="value, correlation and flags of a strategy")
    a.add_argument("--game", required=True, help=f"built-in ({', '.join(bi.GAMES)}) or JSON file")
    a.add_argument("--strategy", help="strategy JSON file, or 'ideal' for the built-in one")

    v = sub.add_parser("value", parents=[common], help="see-saw lower bound on the quantum value")
    v.add_argument("--game", required=True)
    v.add_argument("--dA", type=int, default=2)
    v.add_argument("--dB", type=int, default=2)
    v.add_argument("--restarts", type=int, default=20)
    v.add_argument("--iters", type=int, default=500)

    g = sub.add_parser("gap", parents=[common], help="spectral gap of the game polynomial at the ideal strategy")
    g.add_argument("--game", required=True)
    g.add_argument("--strategy")

    r = sub.add_parser("pair", parents=[common], help="determining-pair residuals of a strategy")
    r.add_argument("--game", required=True)
    r.add_argument("--strategy")
    r.add_argument("--pair", help="built-in pair name (defaults to the game's)")

    s = sub.add_parser("sweep", parents=[common], help="robustness sweep over a perturbation family")
    s.add_argument("--game", default="chsh")
    s.add_argument("--family", default="bob-rotation")
    s.add_argument("--pair")
    s.add_argument("--grid", required=True, metavar="LO:HI:N")

    h = sub.add_parser("gh", parents=[common], help="stability bound for approximate Cl2 representations")
    h.add_argument("--family", default="bob-rotation")
    h.add_argument("--param", type=float, default=0.1)
    h.add_argument("--grid", metavar="LO:HI:N")
    h.add_argument("--rep", help="JSON with 'images' {b0, b1} and optional 'rho'")
    h.add_argument("--decomps", help="JSON with R-decompositions per generator")
    h.add_argument("--map", choices=["averaged", "verbatim"], default="averaged")
    return p


COMMANDS = {"analyze": cmd_analyze, "value": cmd_value, "gap": cmd_gap, "pair": cmd_pair,
            "sweep": cmd_sweep, "gh": cmd_gh}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = parse_tols(args.tol)
        result = COMMANDS[args.command](args, cfg)
        if isinstance(result, dict):
            result["config"] = cfg.as_dict()
            if args.format == "csv" and args.command != "sweep":
                raise InvalidInputError("--format csv is only available for sweep")
            text = json.dumps(to_jsonable(result), indent=2, sort_keys=True) + "\n"
        else:
            text = result
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SelfTestingError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
