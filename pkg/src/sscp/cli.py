"""Command-line front end: ``sscp {eval,simulate,sweep,optimize,gridpos,validate}``.

Exit codes: 0 success, 2 configuration error, 3 numeric-tolerance failure,
4 I/O error.  All randomness comes from ``--seed``; ``--workers`` only
changes wall time.
"""

from __future__ import annotations

import argparse
import sys

from .analytic import InvalidLimits, sscp_analytic
from .experiments import (
    FIGURES,
    Axis,
    SweepSpec,
    figure_sweep,
    grid_from_rows,
    optimize_scalar,
    position_spec,
    run_sweep,
    triangle_check,
    write_csv,
)
from .montecarlo import McConfig, estimate_sscp
from .refintegral import ToleranceNotMet, sscp_ref
from .sysmodel import SYMBOLS, ConfigError, load_config, parse_assignment, validate_config

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_IO = 0, 2, 3, 4

METHOD_ALIASES = {"ana": "analytic", "analytic": "analytic", "ref": "reference",
                  "reference": "reference", "mc": "monte-carlo", "monte-carlo": "monte-carlo"}


def _keys_epilog() -> str:
    width = max(len(k) for k in SYMBOLS)
    lines = ["configuration keys (config file or --set key=value):"]
    lines += [f"  {k:<{width}}  {v}" for k, v in SYMBOLS.items()]
    lines.append("  xi, omega" + " " * (width - 7) + "  set all four link classes at once")
    return "\n".join(lines)


def _pair(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None


def _methods(text: str) -> tuple[str, ...]:
    out = []
    for m in text.split(","):
        m = m.strip()
        if m not in METHOD_ALIASES:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}")
        if METHOD_ALIASES[m] not in out:
            out.append(METHOD_ALIASES[m])
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    epilog = _keys_epilog()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario file (defaults when omitted)")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one configuration key")
    common.add_argument("--workers", type=int, default=1,
                        help="parallel workers (affects wall time only)")
    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--trials", type=int, default=1_000_000)
    mc.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="sscp", description=__doc__, formatter_class=fmt,
                                epilog=epilog)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, parents):
        return sub.add_parser(name, help=help_, description=help_, parents=parents,
                              formatter_class=fmt, epilog=epilog)

    s = add("eval", "print the closed-form SSCP (and the reference integral with --method ref)",
            [common])
    s.add_argument("--method", choices=("ana", "ref", "both"), default="ana")

    s = add("simulate", "print a Monte-Carlo SSCP estimate with its standard error",
            [common, mc])
    s.add_argument("--batch", type=int, default=1 << 16)

    s = add("sweep", "evaluate a Cartesian parameter grid and write CSV", [common, mc])
    s.add_argument("--axis", action="append", required=True,
                   help="KEY=lo:hi:step, KEY=v1,v2,... or K1+K2=a/b,c/d (repeatable)")
    s.add_argument("--methods", type=_methods, default=("analytic",),
                   help="comma list of ana, ref, mc (default ana)")
    s.add_argument("--out", help="CSV path (stdout when omitted)")

    s = add("optimize", "maximize the closed-form SSCP over h_u or eta", [common])
    s.add_argument("--key", choices=("h_u", "eta"), required=True)
    s.add_argument("--bounds", type=_pair, required=True, metavar="LO:HI")
    s.add_argument("--budget", type=int, default=40, help="objective evaluations")

    s = add("gridpos", "closed-form SSCP over UAV hover positions, written as CSV", [common])
    s.add_argument("--x", type=_pair, default=(-150.0, 150.0), metavar="LO:HI",
                   help="x range; write --x=-150:150 when LO is negative")
    s.add_argument("--y", type=_pair, default=(-150.0, 150.0), metavar="LO:HI",
                   help="y range; write --y=-150:150 when LO is negative")
    s.add_argument("--step", type=float, default=10.0)
    s.add_argument("--out", help="CSV path (stdout when omitted)")

    s = add("validate", "three-way agreement check on a figure fixture", [common, mc])
    s.add_argument("--figure", type=int, choices=FIGURES, required=True)
    s.add_argument("--methods", type=_methods, default=("analytic", "reference", "monte-carlo"))
    s.add_argument("--step", type=float, default=30.0, help="position grid step for figure 7")
    s.add_argument("--out", help="CSV path (stdout when omitted)")
    return p


def _overrides(args) -> dict[str, str]:
    return dict(parse_assignment(t) for t in args.overrides)


def _emit_csv(spec, rows, out) -> None:
    text = write_csv(spec, rows, out)
    if out is None:
        sys.stdout.write(text)


def _run(args) -> int:
    cmd = args.command
    if cmd == "validate":
        spec = figure_sweep(args.figure, methods=args.methods, trials=args.trials,
                            seed=args.seed, workers=args.workers,
                            overrides=_overrides(args), position_step=args.step)
        rows = run_sweep(spec)
        _emit_csv(spec, rows, args.out)
        rep = triangle_check(rows)
        n = rep.points - rep.errors
        ref = (f"max |ana-ref| {rep.max_ref_gap:.3g} ({rep.ref_breaches} > 1e-3)"
               if "reference" in args.methods else "reference not run")
        mc = (f"mc within 3se+0.01: {rep.mc_within_3}/{n}, within 4se+0.02: {rep.mc_within_4}/{n}"
              if "monte-carlo" in args.methods else "monte-carlo not run")
        print(f"figure {args.figure}: {rep.points} points, {rep.errors} errors, {ref}, {mc}",
              file=sys.stderr)
        if rep.errors:
            return EXIT_CONFIG
        return EXIT_OK if rep.ok else EXIT_TOLERANCE

    cfg = load_config(args.config, _overrides(args))
    if cmd == "eval":
        if args.method in ("ana", "both"):
            est = sscp_analytic(cfg)
            print(f"{est.value:.9g} {est.method}")
        if args.method in ("ref", "both"):
            est = sscp_ref(cfg)
            print(f"{est.value:.9g} {est.method} +/- {est.error_bound:.3g}")
    elif cmd == "simulate":
        est = estimate_sscp(cfg, McConfig(trials=args.trials, seed=args.seed,
                                          workers=args.workers, batch=args.batch))
        print(f"{est.value:.9g} +/- {est.stderr:.3g} {est.method} "
              f"trials={est.trials} seed={est.seed}")
    elif cmd == "sweep":
        spec = SweepSpec(cfg, tuple(Axis.parse(a) for a in args.axis), methods=args.methods,
                         trials=args.trials, seed=args.seed, workers=args.workers)
        _emit_csv(spec, run_sweep(spec), args.out)
    elif cmd == "optimize":
        validate_config(cfg, analytic=True)
        x, v = optimize_scalar(cfg, args.key, args.bounds, args.budget)
        print(f"{args.key}={x:.9g} sscp={v:.9g}")
    elif cmd == "gridpos":
        validate_config(cfg, analytic=True)
        spec = position_spec(cfg, args.x, args.y, args.step, args.workers)
        rows = run_sweep(spec)
        res = grid_from_rows(spec, rows)
        _emit_csv(spec, rows, args.out)
        x, y, v = res.best
        print(f"argmax x_u={x:.9g} y_u={y:.9g} sscp={v:.9g}",
              file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("sscp: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"sscp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ToleranceNotMet, InvalidLimits) as exc:
        print(f"sscp: numeric tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except OSError as exc:
        print(f"sscp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
