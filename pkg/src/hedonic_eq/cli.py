"""Command-line front end.

Instance documents are JSON objects::

    {"n": 2, "m": 2, "alpha": 1.0, "beta": [0, 1], "gamma": [2, 1.732],
     "network": [[0, 0.2], [0.2, 0]],      # optional, row-major
     "ownership": [[1, 0.5], [0.5, 1]]}    # optional, row-major

``n`` and ``m`` are optional and checked against ``gamma``/``beta``.  The
spectral subcommand takes ``{"psi": [...], "sigma": [[...], ...]}`` instead.
See ``docs/instance.schema.json``.

Exit codes: 0 success, 2 invalid input, 3 the requested object does not exist.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import figures
from .benchmarks import monopoly_optimum, planner_optimum
from .cournot import enumerate_equilibria, verify_equilibrium
from .extensions import (first_best_infeasibility_check, network_outputs, network_surplus,
                         ownership_equilibrium, ownership_sweep, ownership_welfare_slope)
from .model import MarketInstance, ValidationError
from .spectral import SpectralInstance, ranking_condition
from .welfare import (ConditionError, compare_diff_vs_sigma, compare_mono_vs_conc,
                      compare_mono_vs_diff, gamma_variance, weighted_cosine)

EXIT_OK, EXIT_INVALID, EXIT_ABSENT = 0, 2, 3


class Absent(Exception):
    """The subcommand needs an object that does not exist for this instance."""


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default) + "\n"


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_instance(args) -> MarketInstance:
    if args.inline is not None:
        return MarketInstance.from_json(args.inline)
    if args.instance is None:
        raise ValidationError("instance", "pass --instance PATH or --inline JSON")
    try:
        with open(args.instance, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError("instance", str(exc)) from exc
    return MarketInstance.from_json(text)


def _parse_vector(text: str, name: str) -> list:
    try:
        value = json.loads(text) if text.strip().startswith("[") else [float(t) for t in text.split(",")]
    except (ValueError, json.JSONDecodeError) as exc:
        raise ValidationError(name, f"cannot parse {text!r}") from exc
    return value


def _parse_sigma(text: str, n: int) -> np.ndarray:
    tokens = [t.strip() for t in text.split(",")]
    table = {"+": 1.0, "+1": 1.0, "1": 1.0, "-": -1.0, "-1": -1.0}
    if len(tokens) != n or any(t not in table for t in tokens):
        raise ValidationError("sigma", f"expected {n} comma-separated signs, got {text!r}")
    return np.array([table[t] for t in tokens])


# ----- subcommands ------------------------------------------------------------

def cmd_planner(args) -> dict:
    inst = load_instance(args)
    return {"instance": inst.to_dict(), "planner": planner_optimum(inst, mirror=args.mirror).to_dict()}


def cmd_monopoly(args) -> dict:
    inst = load_instance(args)
    mono = monopoly_optimum(inst, mirror=args.mirror)
    plan = planner_optimum(inst, mirror=args.mirror)
    out = mono.to_dict()
    out["welfare_ratio"] = mono.welfare / plan.welfare
    return {"instance": inst.to_dict(), "monopoly": out}


def cmd_equilibria(args) -> dict:
    inst = load_instance(args)
    records = enumerate_equilibria(inst, mirror=args.mirror)
    items = []
    for rec in records:
        d = rec.to_dict()
        d["verification"] = verify_equilibrium(inst, rec.allocation, seed=args.seed, tol=args.tol).to_dict()
        items.append(d)
    return {"instance": inst.to_dict(), "count": len(items), "equilibria": items}


def cmd_welfare(args) -> dict:
    inst = load_instance(args)
    which = args.compare
    out: dict = {"instance": inst.to_dict(), "variance": gamma_variance(inst.gamma)}
    comparisons = {}

    def run(name, fn):
        try:
            comparisons[name] = fn().to_dict()
        except ConditionError as exc:
            if which != "all":
                raise Absent(str(exc)) from exc
            comparisons[name] = {"skipped": str(exc)}

    if which in ("all", "mono-diff"):
        run("mono-diff", lambda: compare_mono_vs_diff(inst))
    if which in ("all", "mono-conc"):
        run("mono-conc", lambda: compare_mono_vs_conc(inst))
    if which == "diff-sigma":
        if args.sigma is None:
            raise ValidationError("sigma", "--compare diff-sigma needs --sigma")
        run("diff-sigma", lambda: compare_diff_vs_sigma(inst, _parse_sigma(args.sigma, inst.n)))
    elif which == "all":
        for rec in enumerate_equilibria(inst):
            if rec.kind == "sign_vector":
                run(f"diff-{rec.label()}", lambda r=rec: compare_diff_vs_sigma(inst, r.sigma))
    out["comparisons"] = comparisons
    if inst.n >= 2:
        out["weighted_cosine"] = {rec.label(): weighted_cosine(inst, rec.A)
                                  for rec in enumerate_equilibria(inst)}
    return out


def cmd_network(args) -> dict:
    inst = load_instance(args)
    if inst.network is None:
        raise ValidationError("network", "instance has no network matrix")
    res = network_outputs(inst, mirror=args.mirror)
    if not res.equilibrium_exists:
        raise Absent("no differentiation equilibrium under these network effects")
    out = res.to_dict()
    out["welfare"] = {name: network_surplus(inst, alloc) for name, alloc in
                      (("planner", res.planner), ("monopoly", res.monopoly),
                       ("equilibrium", res.equilibrium)) if alloc is not None}
    return {"instance": inst.to_dict(), "network": out}


def cmd_ownership(args) -> dict:
    inst = load_instance(args)
    if args.grid:
        kappas = figures.parse_grid(args.grid)
        rows = ownership_sweep(inst, kappas)
        header = ["kappa"] + [f"q{i + 1}" for i in range(inst.n)] + ["weighted_cosine", "welfare",
                                                                      "welfare_ratio", "condition"]
        body = [[r.kappa] + (list(r.q) if r.exists else [None] * inst.n)
                + [r.cosine, r.welfare, r.ratio, r.condition] for r in rows]
        if args.csv:
            _emit(figures.to_csv(header, body), args.csv)
        return {"instance": inst.to_dict(),
                "sweep": [dict(zip(header, row)) for row in body]}
    eq = ownership_equilibrium(inst, args.kappa, mirror=args.mirror)
    if eq is None:
        raise Absent("condition for a differentiation equilibrium fails at this kappa")
    out = {"instance": inst.to_dict(), "equilibrium": eq.to_dict()}
    try:
        s = ownership_welfare_slope(inst, eq.kappa)
        out["slope"] = {"condition": s.condition, "numeric": s.slope, "f": s.f}
    except ConditionError as exc:
        out["slope"] = {"skipped": str(exc)}
    out["first_best"] = first_best_infeasibility_check(inst, seed=args.seed).to_dict()
    return out


def cmd_spectral(args) -> dict:
    if args.spectral:
        try:
            with open(args.spectral, encoding="utf-8") as fh:
                si = SpectralInstance.from_json(fh.read())
        except OSError as exc:
            raise ValidationError("spectral", str(exc)) from exc
    else:
        if args.psi is None or args.sigma_matrix is None:
            raise ValidationError("spectral", "pass --spectral PATH or both --psi and --sigma")
        psi = _parse_vector(args.psi, "psi")
        try:
            sigma = json.loads(args.sigma_matrix)
        except json.JSONDecodeError as exc:
            raise ValidationError("sigma", "must be a JSON nested list") from exc
        si = SpectralInstance(psi, sigma)
    return {"spectral": si.to_dict(), "report": ranking_condition(si).to_dict()}


def cmd_figure(args) -> str:
    fn = figures.FIGURES[args.name]
    grid = figures.parse_grid(args.grid) if args.grid else None
    if args.name == "fig8":
        gammas = [float(g) for g in args.gammas.split(",")]
        header, rows = fn(args.n, args.alpha, gammas, grid)
    else:
        header, rows = fn(args.n, args.alpha, grid)
    return figures.to_csv(header, rows)


# ----- wiring -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hedonic-eq", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", help="path to an instance JSON file")
            p.add_argument("--inline", help="instance JSON given on the command line")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--tol", type=float, default=1e-6, help="acceptance tolerance")
        p.add_argument("--mirror", action="store_true", help="use the mirrored profile branch")
        return p

    common(sub.add_parser("planner", help="social planner's optimum"))
    common(sub.add_parser("monopoly", help="monopolist's optimum"))
    common(sub.add_parser("equilibria", help="all Cournot equilibria"))
    p = common(sub.add_parser("welfare", help="welfare rankings"))
    p.add_argument("--compare", choices=["all", "mono-diff", "mono-conc", "diff-sigma"], default="all")
    p.add_argument("--sigma", help="sign vector such as '+,-,+' for diff-sigma")
    common(sub.add_parser("network", help="outputs under network effects"))
    p = common(sub.add_parser("ownership", help="equilibrium under common ownership"))
    p.add_argument("--kappa", type=float, help="common ownership weight (default: from instance)")
    p.add_argument("--grid", help="kappa sweep lo:hi:steps")
    p.add_argument("--csv", help="CSV path for the kappa sweep")
    p = common(sub.add_parser("spectral", help="monopoly vs oligopoly for fixed (psi, Sigma)"),
               instance=False)
    p.add_argument("--spectral", help="JSON file with psi and sigma")
    p.add_argument("--psi", help="comma-separated or JSON list")
    p.add_argument("--sigma", dest="sigma_matrix", help="JSON nested list")
    p = common(sub.add_parser("figure", help="CSV data for the symmetric sweeps"), instance=False)
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--grid", help="lo:hi:steps (gamma, or kappa for fig8)")
    p.add_argument("--gammas", default="2,3,4", help="fig8 gamma values")
    return parser


COMMANDS = {
    "planner": cmd_planner, "monopoly": cmd_monopoly, "equilibria": cmd_equilibria,
    "welfare": cmd_welfare, "network": cmd_network, "ownership": cmd_ownership,
    "spectral": cmd_spectral, "figure": cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except Absent as exc:
        sys.stderr.write(f"not found: {exc}\n")
        return EXIT_ABSENT
    except ValidationError as exc:
        sys.stderr.write(f"invalid input ({exc.field}): {exc}\n")
        return EXIT_INVALID
    except ValueError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    _emit(result if isinstance(result, str) else dumps(result), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
