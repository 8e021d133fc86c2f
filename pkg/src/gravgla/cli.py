"""Command line front end: ``gravgla verify | ranks | gauge | evolve | mc | ricci``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import report as rep

log = logging.getLogger("gravgla")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_verify(args, cfg) -> int:
    only = args.only or None
    if only and not rep.select(only):
        raise rep.ConfigError(f"--only {only} matches no check")
    report = rep.run_suite(cfg, only=only)
    print(rep.format_table(report))
    if args.report:
        _dump(report, args.report)
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


def cmd_ranks(args, cfg) -> int:
    from .gauge import default_gauge
    from .glaoid import rank_table

    t = rank_table()
    t["E_G"] = list(default_gauge().ranks())
    _dump(t, args.report)
    return EXIT_OK


def _load_h(args):
    from .gauge import HermForm

    if args.h_file:
        try:
            with open(args.h_file) as fh:
                return HermForm.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise rep.ConfigError(f"cannot read Hermitian form: {exc}") from exc
    if args.random_seed is not None:
        return HermForm.random_positive(args.random_seed)
    if args.h not in (None, "identity"):
        raise rep.ConfigError("--h only accepts 'identity'")
    return HermForm.identity()


def cmd_gauge(args, cfg) -> int:
    from . import linalg
    from .gauge import (NotHermitian, NotPositive, build_b, build_gauge, check_condition_a,
                        check_condition_c, is_odd_form, satisfies_i, theta0_form, witnesses)

    try:
        h = _load_h(args)
    except NotHermitian as exc:
        raise rep.ConfigError(str(exc)) from exc
    B = build_b(h)
    out = {"odd": is_odd_form(B), "condition_i": satisfies_i(B)}
    if not linalg.is_positive_definite(theta0_form(B)):
        out["error"] = "b_h(-, theta_0 -) is not positive definite"
        _dump(rep._js(out), args.report)
        return EXIT_FAIL
    ws = witnesses(cfg["seed"])
    try:
        g = build_gauge(B, check_witnesses=ws)
    except NotPositive as exc:
        out["error"] = str(exc)
        out["witness"] = [str(c) for c in exc.witness]
        _dump(rep._js(out), args.report)
        return EXIT_FAIL
    out.update(ranks=list(g.ranks()), condition_a=check_condition_a(g),
               condition_c=check_condition_c(g), witnesses=[[str(c) for c in w] for w in ws])
    if args.out:
        _dump(g.to_json(), args.out)
    _dump(out, args.report)
    ok = out["odd"] and out["condition_i"] and out["condition_a"] and out["condition_c"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_evolve(args, cfg) -> int:
    from .gauge import default_gauge
    from .glaoid import x_minkowski
    from .hyperbolic import CFLViolation, assemble_symbol, evolve_linear, plane_wave, reduce_dims

    if not 0 <= args.degree <= 3 or not 1 <= args.dims <= 3 or args.grid < 4 or args.steps < 1:
        raise rep.ConfigError("need degree in 0..3, dims in 1..3, grid >= 4, steps >= 1")
    sym = assemble_symbol(default_gauge(), x_minkowski(), args.degree)
    A0, As, C = reduce_dims(sym, args.dims)
    u0 = plane_wave(args.grid, A0.shape[0], seed=cfg["seed"], dims=args.dims)
    try:
        res = evolve_linear(A0, As, u0, args.steps, cfl=args.cfl, C=C if args.lower_order else None)
    except CFLViolation as exc:
        raise rep.ConfigError(str(exc)) from exc
    out = {"degree": args.degree, "dims": args.dims, "grid": args.grid, "steps": args.steps,
           "cfl": args.cfl, "dt": res.dt, "size": int(A0.shape[0]),
           "energy_initial": res.energy[0], "energy_final": res.energy[-1],
           "relative_drift": res.relative_drift()}
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "time", "energy"])
            for n, e in enumerate(res.energy):
                w.writerow([n + 1, (n + 1) * res.dt, repr(e)])
    _dump(out, args.report)
    return EXIT_OK


def cmd_mc(args, cfg) -> int:
    from .mc_formal import EXAMPLES, Obstructed, homology, mc_recursion, mc_residual, random_xi

    if args.example not in EXAMPLES:
        raise rep.ConfigError(f"unknown example {args.example!r}; choose from {sorted(EXAMPLES)}")
    if args.order < 1:
        raise rep.ConfigError("--order must be positive")
    gla, x0 = EXAMPLES[args.example](order=max(args.order, 2))
    H = homology(gla, x0)
    xi = random_xi(H, cfg["seed"])
    try:
        sol = mc_recursion(gla, x0, xi, args.order)
    except Obstructed as exc:
        _dump({"example": args.example, "obstructed": str(exc)}, args.report)
        return EXIT_FAIL
    orders = {K: not mc_residual(gla, mc_recursion(gla, x0, xi, K), K) for K in range(1, args.order + 1)}
    out = {"example": args.example, "homology": H.dims, "xi": xi, "residual_valuations": sol.residuals,
           "mc_mod_s^K+1": orders}
    _dump(rep._js(out), args.report)
    return EXIT_OK if all(orders.values()) else EXIT_FAIL


def cmd_ricci(args, cfg) -> int:
    from .ricci import bridge, minkowski_element, ppwave_element

    if args.background == "minkowski":
        x = minkowski_element()
    else:
        try:
            x = ppwave_element(args.H)
        except (ValueError, SyntaxError, TypeError) as exc:
            raise rep.ConfigError(f"cannot parse profile {args.H!r}: {exc}") from exc
    r = bridge(x)
    out = {"background": args.background, "mc_defect_zero": r.mc_defect_zero,
           "torsion_zero": r.torsion_zero, "parallel_metric": r.parallel, "ricci_zero": r.ricci_zero,
           "metric": [[str(c) for c in row] for row in r.g] if r.g else None,
           "ricci": [[str(c) for c in row] for row in r.ricci]}
    if args.background == "ppwave":
        out["H"] = args.H
    _dump(out, args.report)
    return EXIT_OK if r.mc_defect_zero == r.ricci_zero else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS so that flags given before the subcommand survive the subparser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int)
    common.add_argument("--report", help="write JSON output to this file")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--only", action="append", help="glob or prefix of check names (verify)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gravgla", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--jobs", type=int, default=None, help="worker processes")
    v.add_argument("--tamper-ideal", action="store_true", default=None,
                   help="flip one sign in the ideal basis (the closure check must then fail)")
    sub.add_parser("ranks", parents=[common], help="rank tables of L, I, E and E_G")

    g = sub.add_parser("gauge", parents=[common], help="build a gauge from a Hermitian form")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--h", default="identity")
    src.add_argument("--h-file")
    src.add_argument("--random-seed", type=int)
    g.add_argument("--out", help="write the gauge data as JSON")

    e = sub.add_parser("evolve", parents=[common], help="leapfrog evolution of the x_mink system")
    e.add_argument("--degree", type=int, default=1)
    e.add_argument("--dims", type=int, default=1)
    e.add_argument("--grid", type=int, default=64)
    e.add_argument("--cfl", type=float, default=0.4)
    e.add_argument("--steps", type=int, default=100)
    e.add_argument("--lower-order", action="store_true", help="keep the zeroth order term C")
    e.add_argument("--csv", help="energy history as CSV")

    m = sub.add_parser("mc", parents=[common], help="formal Maurer-Cartan recursion")
    m.add_argument("--order", type=int, default=6)
    m.add_argument("--example", default="endo")

    r = sub.add_parser("ricci", parents=[common], help="MC versus Ricci flatness on a background")
    r.add_argument("--background", choices=["minkowski", "ppwave"], default="minkowski")
    r.add_argument("--H", default="x1^2 - x2^2", help="pp-wave profile H(x1, x2)")
    return p


COMMANDS = {"verify": cmd_verify, "ranks": cmd_ranks, "gauge": cmd_gauge, "evolve": cmd_evolve,
            "mc": cmd_mc, "ricci": cmd_ricci}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    for name, default in (("seed", None), ("report", None), ("config", None), ("only", None),
                          ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = rep.load_config(args.config, seed=args.seed, jobs=getattr(args, "jobs", None),
                              tamper_ideal=getattr(args, "tamper_ideal", None))
        return COMMANDS[args.command](args, cfg)
    except rep.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
