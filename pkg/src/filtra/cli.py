"""Command-line surface.

Subcommands: enumerate, verify, measurable, policy (eval|leak|optimal),
cone, simulate. Every run echoes its fully resolved configuration (seed
included) to stderr as a ``# config`` line, so any output can be reproduced
from the echo alone. Exit codes: 0 success or verdict-ok, 1 verdict
violation, 2 usage, parse, or capacity error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

from . import _kernels
from .errors import CapacityError, FiltraError
from .filtration import natural_filtration, verify_nesting
from .interval_continuum import (ContinuousWalkModel, IntervalSet,
                                 emit_cone_figure_data, parse_interval_set)
from .lattice_mdp import (LatticeModel, Policy, TradingMDP,
                          action_indicator, evaluate_policy_exact,
                          leak_detect, monte_carlo_value,
                          optimal_adapted_value, price_variable)
from .outcome_space import (Event, ProbabilityMeasure, build_space,
                            sample_paths)
from .random_variable import RandomVariable, find_measurability_violation
from .sigma_algebra import DEFAULT_ATOM_CAP, enumerate_members, verify_axioms

DISPLAY_CAP = 64


def _echo_config(cfg: dict):
    print("# config " + json.dumps(cfg, sort_keys=True), file=sys.stderr)


def _default_format() -> str:
    return os.environ.get("FILTRA_FORMAT", "text")


def _event_text(e: Event) -> str:
    return "{" + ",".join(e.path_strings()) + "}"


def _split_symbols(text: str) -> tuple[str, ...]:
    if "," in text:
        return tuple(s for s in text.split(",") if s)
    return tuple(text)


def _parse_probs(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- enumerate ---------------------------------------------------------------

def cmd_enumerate(args) -> int:
    space = build_space(args.horizon, _split_symbols(args.alphabet))
    stage = natural_filtration(space)[args.t]
    count = stage.n_members
    cfg = {"command": "enumerate", "alphabet": "".join(space.alphabet),
           "horizon": args.horizon, "t": args.t, "force": args.force,
           "max_atoms": args.max_atoms, "format": args.format}
    _echo_config(cfg)
    if len(stage.atoms) > args.max_atoms:
        raise CapacityError(
            f"stage {args.t} has {len(stage.atoms)} atoms (cap {args.max_atoms})")
    listing = count <= DISPLAY_CAP or args.force
    members = enumerate_members(stage, cap=args.max_atoms) if listing else None
    if args.format == "json":
        out = {"config": cfg, "count": count}
        if members is not None:
            out["members"] = [m.to_jsonable() for m in members]
        print(json.dumps(out, indent=2))
    else:
        if members is None:
            print(f"{count} subsets (use --force to list)")
        else:
            for m in members:
                print(_event_text(m))
            print(f"count: {count}")
    return 0


# -- verify ------------------------------------------------------------------

def _verify_natural(args):
    space = build_space(args.horizon, _split_symbols(args.alphabet))
    filtration = natural_filtration(space)
    stage_verdicts = []
    for stage in filtration.stages:
        if len(stage.atoms) <= args.max_atoms:
            verdict = verify_axioms(space, enumerate_members(stage,
                                                             cap=args.max_atoms))
            stage_verdicts.append(verdict.to_jsonable())
        else:
            stage_verdicts.append({"kind": "skipped_over_cap",
                                   "atoms": len(stage.atoms)})
    nesting = verify_nesting(filtration)
    return stage_verdicts, nesting.to_jsonable()


def _verify_stage_file(path: str):
    data = _load_json(path)
    space = build_space(int(data["horizon"]), _split_symbols(data["alphabet"]))
    collections = [[Event.from_strings(space, paths) for paths in stage["sets"]]
                   for stage in data["stages"]]
    stage_verdicts = [verify_axioms(space, coll).to_jsonable()
                      for coll in collections]
    nesting = {"kind": "ok"}
    for t in range(len(collections) - 1):
        fine = {e.mask for e in collections[t + 1]}
        missing = [e for e in collections[t] if e.mask not in fine]
        if missing:
            nesting = {"kind": "violated", "t": t,
                       "witness": missing[0].to_jsonable()}
            break
    return stage_verdicts, nesting


def cmd_verify(args) -> int:
    cfg = {"command": "verify", "alphabet": args.alphabet,
           "horizon": args.horizon, "stages_file": args.stages_file,
           "max_atoms": args.max_atoms, "format": args.format}
    _echo_config(cfg)
    if args.stages_file:
        stage_verdicts, nesting = _verify_stage_file(args.stages_file)
    else:
        stage_verdicts, nesting = _verify_natural(args)
    all_ok = (nesting["kind"] == "ok"
              and all(v["kind"] in ("ok", "skipped_over_cap")
                      for v in stage_verdicts))
    report = {"config": cfg, "stages": stage_verdicts, "nesting": nesting,
              "ok": all_ok}
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        for t, v in enumerate(stage_verdicts):
            print(f"stage {t}: {v['kind']}")
        print(f"nesting: {nesting['kind']}")
        print("ok" if all_ok else "violations found")
    return 0 if all_ok else 1


# -- measurable ----------------------------------------------------------------

def cmd_measurable(args) -> int:
    cfg = {"command": "measurable", "stage": args.stage, "format": args.format,
           "values_file": args.values_file, "policy_file": args.policy_file,
           "price_t": args.price_t, "epoch": args.epoch,
           "s0": args.s0, "u": args.u, "d": args.d, "horizon": args.horizon}
    _echo_config(cfg)
    sources = [s for s in (args.values_file, args.policy_file, args.price_t)
               if s is not None]
    if len(sources) != 1:
        print("exactly one of --values-file, --policy-file, --price-t required",
              file=sys.stderr)
        return 2
    model = LatticeModel(args.s0, args.u, args.d, args.horizon)
    space = model.space()
    if args.values_file is not None:
        variable = RandomVariable.from_jsonable(space,
                                                _load_json(args.values_file))
    elif args.price_t is not None:
        variable = price_variable(model, args.price_t)
    else:
        policy = Policy.from_jsonable(_load_json(args.policy_file))
        epoch = args.epoch if args.epoch is not None else args.stage
        variable = action_indicator(model, policy, epoch)
    stage = natural_filtration(space)[args.stage]
    violation = find_measurability_violation(variable, stage)
    if args.format == "json":
        out = {"config": cfg, "measurable": violation is None}
        if violation is not None:
            atom, v1, v2 = violation
            out["witness"] = {"atom": atom.to_jsonable(), "values": [v1, v2]}
        print(json.dumps(out, indent=2))
    else:
        if violation is None:
            print("true")
        else:
            atom, v1, v2 = violation
            print(f"false: atom {_event_text(atom)} takes values {v1} and {v2}")
    return 0 if violation is None else 1


# -- policy ------------------------------------------------------------------

def _policy_from_args(args, mdp: TradingMDP) -> Policy:
    if args.policy_file:
        return Policy.from_jsonable(_load_json(args.policy_file))
    kind = args.kind
    if kind == "always-long":
        return Policy.always_long()
    if kind == "always-flat":
        return Policy.always_flat()
    if kind == "prescient":
        return Policy.next_step_up()
    if kind == "optimal":
        return optimal_adapted_value(mdp)[1]
    raise FiltraError(f"unknown policy kind {kind!r}")


def _model_from_args(args) -> LatticeModel:
    probs = _parse_probs(args.p)
    if len(probs) == 1:
        probs = probs * args.horizon
    return LatticeModel(args.s0, args.u, args.d, args.horizon, up_probs=probs)


def cmd_policy_eval(args) -> int:
    model = _model_from_args(args)
    mdp = TradingMDP(model, rho=args.rho)
    cfg = {"command": "policy eval", "s0": args.s0, "u": args.u, "d": args.d,
           "horizon": args.horizon, "p": args.p, "rho": args.rho,
           "kind": args.kind, "policy_file": args.policy_file,
           "mc": args.mc, "seed": args.seed}
    _echo_config(cfg)
    policy = _policy_from_args(args, mdp)
    out = {"config": cfg, "kind": policy.kind, "label": policy.label}
    if args.mc:
        value, stderr = monte_carlo_value(mdp, policy, args.mc, args.seed)
        out["value"] = value
        out["standard_error"] = stderr
    else:
        out["value"] = evaluate_policy_exact(mdp, policy)
    print(json.dumps(out, indent=2))
    return 0


def cmd_policy_leak(args) -> int:
    model = _model_from_args(args)
    mdp = TradingMDP(model, rho=args.rho)
    cfg = {"command": "policy leak", "s0": args.s0, "u": args.u, "d": args.d,
           "horizon": args.horizon, "p": args.p, "rho": args.rho,
           "kind": args.kind, "policy_file": args.policy_file}
    _echo_config(cfg)
    policy = _policy_from_args(args, mdp)
    verdict = leak_detect(model, policy)
    if args.format == "json":
        print(json.dumps({"config": cfg, "verdict": verdict.to_jsonable()},
                         indent=2))
    else:
        print(str(verdict))
    return 0 if verdict.adapted else 1


def cmd_policy_optimal(args) -> int:
    model = _model_from_args(args)
    mdp = TradingMDP(model, rho=args.rho)
    cfg = {"command": "policy optimal", "s0": args.s0, "u": args.u,
           "d": args.d, "horizon": args.horizon, "p": args.p, "rho": args.rho}
    _echo_config(cfg)
    value, policy = optimal_adapted_value(mdp)
    rows = []
    for t in range(model.horizon):
        for k in range(t + 1):
            state = model.state_price(k, t)
            rows.append({"t": t, "state": state,
                         "action": policy.rule(t, state)})
    print(json.dumps({"config": cfg, "value": value,
                      "policy": {"kind": "markov", "rows": rows}}, indent=2))
    return 0


# -- cone ----------------------------------------------------------------------

def _parse_event_spec(universe, text: str) -> tuple[int, IntervalSet]:
    head, sep, body = text.partition(":")
    if not sep or not head.startswith("t="):
        raise FiltraError(
            f"bad event spec {text!r}, expected t=<int>:<interval>")
    try:
        t = int(head[2:])
    except ValueError:
        raise FiltraError(f"bad event time in {text!r}") from None
    return t, parse_interval_set(universe, body)


def cmd_cone(args) -> int:
    model = ContinuousWalkModel(args.s0, args.d, args.u, args.horizon)
    if args.universe:
        lo, hi = (float(x) for x in args.universe.split(","))
    else:
        lo = model.s0 - model.horizon * model.d
        hi = model.s0 + model.horizon * model.u
    cfg = {"command": "cone", "s0": args.s0, "u": args.u, "d": args.d,
           "horizon": args.horizon, "seed": args.seed,
           "universe": [lo, hi], "events": args.event}
    _echo_config(cfg)
    events = [_parse_event_spec((lo, hi), spec) for spec in args.event]
    data = emit_cone_figure_data(model, args.seed, events)
    text = data.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- simulate --------------------------------------------------------------

def cmd_simulate(args) -> int:
    space = build_space(args.horizon, _split_symbols(args.alphabet))
    if args.probs:
        probs = _parse_probs(args.probs)
        measure = ProbabilityMeasure.iid(space, probs)
    else:
        measure = ProbabilityMeasure.uniform(space)
    cfg = {"command": "simulate", "alphabet": "".join(space.alphabet),
           "horizon": args.horizon, "probs": args.probs, "n": args.n,
           "seed": args.seed, "format": args.format}
    _echo_config(cfg)
    indices = sample_paths(measure, args.n, args.seed)
    strings = [space.path_string(int(i)) for i in indices]
    if args.format == "json":
        print(json.dumps({"config": cfg,
                          "counts": dict(sorted(Counter(strings).items())),
                          "samples": strings if args.n <= DISPLAY_CAP else None},
                         indent=2))
    else:
        for s in strings:
            print(s)
    return 0


# -- parser ------------------------------------------------------------------

def _add_space_flags(p):
    p.add_argument("--alphabet", default="u,d",
                   help="comma-separated symbols (default u,d)")
    p.add_argument("-T", "--horizon", type=int, default=3)


def _add_model_flags(p):
    p.add_argument("--s0", type=float, default=100.0)
    p.add_argument("--u", type=float, default=10.0)
    p.add_argument("--d", type=float, default=5.0)
    p.add_argument("-T", "--horizon", type=int, default=3)


def _add_policy_flags(p):
    p.add_argument("--p", default="0.5",
                   help="up probability, one value or comma list per step")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--kind", default="always-long",
                   choices=["always-long", "always-flat", "optimal",
                            "prescient"])
    p.add_argument("--policy-file", help="JSON decision table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filtra",
        description="Sigma-algebras, filtrations, measurability and "
                    "information-leak checks on finite stochastic models")
    parser.add_argument("--version", action="version",
                        version=f"filtra (kernels: {_kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list the members of a filtration stage")
    _add_space_flags(p)
    p.add_argument("--t", type=int, required=True, help="stage index")
    p.add_argument("--force", action="store_true",
                   help="list even very large stages")
    p.add_argument("--max-atoms", type=int, default=DEFAULT_ATOM_CAP)
    p.add_argument("--format", choices=["text", "json"],
                   default=_default_format())
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="check sigma-algebra axioms and nesting")
    _add_space_flags(p)
    p.add_argument("--stages-file", help="JSON stage collections to verify")
    p.add_argument("--max-atoms", type=int, default=DEFAULT_ATOM_CAP)
    p.add_argument("--format", choices=["text", "json"],
                   default=_default_format())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("measurable",
                       help="check a variable or policy against a stage")
    _add_model_flags(p)
    p.add_argument("--stage", type=int, required=True,
                   help="filtration stage index")
    p.add_argument("--values-file", help="JSON {\"values\": [...]}")
    p.add_argument("--price-t", type=int,
                   help="use the lattice price at this time as the variable")
    p.add_argument("--policy-file", help="JSON decision table")
    p.add_argument("--epoch", type=int,
                   help="decision epoch for --policy-file (default: --stage)")
    p.add_argument("--format", choices=["text", "json"],
                   default=_default_format())
    p.set_defaults(func=cmd_measurable)

    p = sub.add_parser("policy", help="evaluate or audit trading policies")
    psub = p.add_subparsers(dest="policy_command", required=True)

    pe = psub.add_parser("eval", help="expected discounted reward")
    _add_model_flags(pe)
    _add_policy_flags(pe)
    pe.add_argument("--mc", type=int, default=0,
                    help="Monte Carlo sample count (default: exact)")
    pe.add_argument("--seed", type=int, default=0)
    pe.set_defaults(func=cmd_policy_eval)

    pl = psub.add_parser("leak", help="flag decisions that read the future")
    _add_model_flags(pl)
    _add_policy_flags(pl)
    pl.add_argument("--format", choices=["text", "json"],
                    default=_default_format())
    pl.set_defaults(func=cmd_policy_leak)

    po = psub.add_parser("optimal", help="backward-induction optimum")
    _add_model_flags(po)
    po.add_argument("--p", default="0.5")
    po.add_argument("--rho", type=float, default=1.0)
    po.set_defaults(func=cmd_policy_optimal)

    p = sub.add_parser("cone", help="emit path-vs-cone figure data as CSV")
    p.add_argument("--s0", type=float, default=332.0)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("-T", "--horizon", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--universe",
                   help="L,U (default: the reachable band at the horizon)")
    p.add_argument("--event", action="append", default=[],
                   metavar="t=K:[a,b)",
                   help="event set at a time, repeatable")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("simulate", help="sample paths from a discrete space")
    _add_space_flags(p)
    p.add_argument("--probs", help="comma list of per-symbol probabilities")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"],
                   default=_default_format())
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FiltraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
