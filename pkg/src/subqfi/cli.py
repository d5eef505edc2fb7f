"""Command-line front end.

Exit codes: 0 success, 1 validation or argument error, 2 a property failed in
``verify``, 3 file I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings

import numpy as np

from . import core, fidelity, fisher, optimal, optimize, sampling, verify

log = logging.getLogger("subqfi")

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "SUBQFI_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    return [int(round(x)) for x in _floats(text)]


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="subqfi", description="Sub-quantum Fisher information toolkit")
    p.add_argument("--quiet", action="store_true", help="suppress progress logging on stderr")
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_inputs(sp):
        sp.add_argument("--state", required=True, help="state JSON file {dim, re, im}")
        sp.add_argument("--generator", required=True, help="generator JSON file {dim, re, im}")

    c = sub.add_parser("compute", help="one sub-QFI value plus the full report")
    with_inputs(c)
    c.add_argument("--method", choices=fisher.SUBQFI_METHODS, default="closed")
    c.add_argument("--delta", type=float, default=fisher.DEFAULT_DELTA)
    c.add_argument("--sld", action="store_true", help="include the SLD matrix")

    b = sub.add_parser("bounds", help="QFI >= skew information >= sub-QFI / 8 chain")
    with_inputs(b)
    b.add_argument("--delta", type=float, default=fisher.DEFAULT_DELTA)

    o = sub.add_parser("optimal", help="closed-form optimal probe state for a spectrum")
    o.add_argument("--spectrum", type=_floats, required=True, help='descending, e.g. "0.75,0.25"')
    o.add_argument("--generator", required=True)
    o.add_argument("--chi", type=float, default=0.0)

    z = sub.add_parser("optimize", help="gradient ascent of the sub-QFI over unitaries")
    with_inputs(z)
    z.add_argument("--restarts", type=int, default=8)
    z.add_argument("--max-iters", type=int, default=2000)
    z.add_argument("--tol", type=float, default=1e-6)
    z.add_argument("--step-rule", choices=("bb", "fixed"), default="bb")
    z.add_argument("--seed", type=int, default=None)
    z.add_argument("--format", choices=("json", "csv"), default="json")
    z.add_argument("--trace-out", help="also write the iteration trace CSV here")

    e = sub.add_parser("estimate", help="finite-shot sub-QFI estimate")
    with_inputs(e)
    e.add_argument("--theta", type=float, default=0.0)
    e.add_argument("--delta", type=_floats, default=[0.05], help="one value, or a list for --format csv")
    e.add_argument("--shots", type=_ints, default=[10**6], help="per trace; a list for --format csv")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--repeats", type=int, default=1, help="seeds seed..seed+repeats-1 in csv sweeps")
    e.add_argument("--format", choices=("json", "csv"), default="json")

    pl = sub.add_parser("purity-loss", help="purity loss under Gaussian phase noise")
    with_inputs(pl)
    pl.add_argument("--delta-x", type=float, required=True)
    pl.add_argument("--nodes", type=int, default=fisher.DEFAULT_NODES)
    pl.add_argument("--theta", type=float, default=0.0)

    v = sub.add_parser("verify", help="run the seeded property suite")
    v.add_argument("--dim", type=int, required=True)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=None)
    return p


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_inputs(args):
    rho = core.validate_density(core.load_matrix(args.state))
    h = core.validate_generator(core.load_matrix(args.generator))
    core.check_dims(rho, h)
    return rho, h


def cmd_compute(args) -> str:
    rho, h = _load_inputs(args)
    value = fisher.subqfi(rho, h, args.method, args.delta)
    rep = fisher.bound_report(rho, h, delta=args.delta)
    rep.method_values[args.method] = value
    out = {"method": args.method, "value": value}
    out.update(rep.to_dict(include_sld=args.sld))
    out["config"] = {"delta": args.delta, "richardson": True}
    return _dumps(out)


def cmd_bounds(args) -> str:
    rho, h = _load_inputs(args)
    rep = fisher.bound_report(rho, h, all_methods=True, delta=args.delta)
    shifted = core.PhaseEncoding(h, args.delta).apply(rho)
    f = fidelity.uhlmann_fidelity(rho, shifted)
    g = fidelity.super_fidelity(rho, shifted)
    tol = fisher.CHAIN_TOL
    out = rep.to_dict()
    out["verdicts"] = {
        "qfi_ge_sub_qfi": bool(rep.qfi + tol >= rep.sub_qfi),
        "qfi_ge_skew_info": bool(rep.qfi + tol >= rep.skew_info),
        "skew_info_ge_sub_qfi_over_8": bool(rep.skew_info + tol >= rep.sub_qfi / 8),
        "fidelity_le_sqrt_super_fidelity": bool(f <= np.sqrt(g) + tol),
    }
    out["fidelity_at_delta"] = {"delta": args.delta, "uhlmann": float(f), "sqrt_super": float(np.sqrt(g))}
    return _dumps(out)


def cmd_optimal(args) -> str:
    h = core.validate_generator(core.load_matrix(args.generator))
    res = optimal.optimal_state(args.spectrum, h, args.chi)
    return _dumps(
        {
            "spectrum": list(args.spectrum),
            "chi": args.chi,
            "max_subqfi": res.max_subqfi,
            "qfi_at_rho_star": res.max_qfi_observed,
            "rho_star": core.matrix_to_dict(res.rho_star.matrix),
        }
    )


def cmd_optimize(args) -> str:
    rho, h = _load_inputs(args)
    seed = _default_seed() if args.seed is None else args.seed
    cfg = optimize.MaximizeConfig(
        restarts=args.restarts, max_iters=args.max_iters, tol=args.tol, step_rule=args.step_rule
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        trace = optimize.maximize(rho, h, cfg, core.make_rng(seed))
    for w in caught:
        log.warning("%s", w.message)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            fh.write(trace.to_csv())
    if args.format == "csv":
        return trace.to_csv()
    u = trace.best_unitary()
    out = trace.summary()
    out["state"] = core.matrix_to_dict(u @ rho.matrix @ core.dagger(u))
    out["qfi_at_best"] = fisher.qfi(rho.conjugate(u), h)
    out["config"] = {
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "tol": cfg.tol,
        "step_rule": cfg.step_rule,
        "seed": seed,
    }
    return _dumps(out)


def cmd_estimate(args) -> str:
    rho, h = _load_inputs(args)
    seed = _default_seed() if args.seed is None else args.seed
    if args.format == "csv":
        seeds = range(seed, seed + max(args.repeats, 1))
        rows = sampling.shot_sweep(rho, h, args.delta, args.shots, seeds, args.theta)
        return sampling.rows_to_csv(rows)
    if len(args.delta) != 1 or len(args.shots) != 1:
        raise UsageError("lists of --delta/--shots need --format csv")
    est = sampling.estimate_subqfi(rho, h, args.theta, args.delta[0], args.shots[0], core.make_rng(seed))
    out = est.to_dict()
    out["exact_value"] = fisher.subqfi_closed(rho, h)
    out["config"] = {"theta": args.theta, "delta": args.delta[0], "shots": args.shots[0], "seed": seed}
    return _dumps(out)


def cmd_purity_loss(args) -> str:
    rho, h = _load_inputs(args)
    res = fisher.purity_loss(rho, h, args.delta_x, args.nodes, args.theta)
    sub = fisher.subqfi_closed(rho, h)
    return _dumps(
        {
            "delta_gamma": res.delta_gamma,
            "delta_x": res.delta_x,
            "ratio": res.ratio,
            "sub_qfi": sub,
            "rel_err": abs(sub - res.ratio) / max(sub, 1e-12),
            "nodes": res.nodes,
            "rho_ave": core.matrix_to_dict(res.rho_ave.matrix),
        }
    )


def cmd_verify(args):
    seed = _default_seed() if args.seed is None else args.seed
    t0 = time.perf_counter()
    results = verify.run_suite(args.dim, args.trials, seed)
    log.info("verify finished in %.1f s", time.perf_counter() - t0)
    ok = verify.suite_passed(results)
    lines = [r.line() for r in results]
    lines.append(f"{'ALL PASS' if ok else 'FAILURES'}  dim={args.dim} trials={args.trials} seed={seed}")
    return "\n".join(lines) + "\n", ok


COMMANDS = {
    "compute": cmd_compute,
    "bounds": cmd_bounds,
    "optimal": cmd_optimal,
    "optimize": cmd_optimize,
    "estimate": cmd_estimate,
    "purity-loss": cmd_purity_loss,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"subqfi: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    code = EXIT_OK
    try:
        if args.command == "verify":
            text, ok = cmd_verify(args)
            code = EXIT_OK if ok else EXIT_PROPERTY
        else:
            text = COMMANDS[args.command](args)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"subqfi: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (core.SubQFIError, UsageError, ValueError, json.JSONDecodeError) as exc:
        print(f"subqfi: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
