"""``slopegrowth`` command line.

    slopegrowth preset example51 --N 4 --out runs/ex51
    slopegrowth profile --preset example41 --lmax 9
    slopegrowth formula example51 --N 4 --theta 1.0472
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import action, calculus, rates
from .action import ConfigError
from .report import RunConfig, UsageError, _ensure_writable, _publish_cache, emit_report, obtain_spectrum, run
from .rates import LowDataError

EXIT_OK, EXIT_USAGE, EXIT_LOW_DATA, EXIT_AUDIT = 0, 2, 3, 4


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _window(text: str) -> tuple[int, int]:
    lo, hi = text.split(",")
    return int(lo), int(hi)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--lmax", type=int, help="abstract word length to enumerate")
    p.add_argument("--bins", type=int, default=90)
    p.add_argument("--binning", choices=["angular", "paper-tan"], default="angular")
    p.add_argument("--eps-schedule", type=_floats, help="comma separated, strictly decreasing")
    p.add_argument("--grid", type=int, default=rates.DEFAULT_GRID, help="number of slope grid points")
    p.add_argument("--window", type=_window, help="annulus window lo,hi")
    p.add_argument("--out", default="out")
    p.add_argument("--cache", choices=["use", "rebuild"], default="use")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--undefined-boundary", choices=["skip", "zero", "neg_inf"], default="skip")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=list(action.PRESETS))
    p.add_argument("--N", type=int, default=4, help="second-factor rank for example51")
    p.add_argument("--spec", dest="spec_file", help="group spec file")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="slopegrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (
        ("spectrum", "enumerate and cache the annulus/slope spectrum"),
        ("profile", "estimate the slope profile and write profile.csv"),
        ("maximizer", "locate the maximising slope"),
        ("audit", "run every audit and write the full report"),
    ):
        _source(sub.add_parser(name, parents=[common], help=helptext))

    pr = sub.add_parser("preset", parents=[common], help="full run of a built-in example")
    pr.add_argument("name")
    pr.add_argument("--N", type=int, default=4)

    fo = sub.add_parser("formula", help="evaluate a closed form")
    fo.add_argument("which", choices=["example51", "example41", "mixing", "tau"])
    fo.add_argument("--N", type=int, default=4)
    fo.add_argument("--theta", type=float)
    fo.add_argument("--beta", type=float)
    fo.add_argument("--t", type=float)
    fo.add_argument("--n", type=int)
    fo.add_argument("--m", type=int)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        subcommand=args.command,
        preset=getattr(args, "preset", None) if args.command != "preset" else args.name,
        N=args.N,
        spec_file=getattr(args, "spec_file", None),
        lmax=args.lmax,
        binning=args.binning,
        bins=args.bins,
        eps_schedule=args.eps_schedule,
        grid=args.grid,
        window=args.window,
        out=args.out,
        cache=args.cache,
        jobs=args.jobs,
        undefined_boundary=args.undefined_boundary,
    )


def _formula(args) -> int:
    w = args.which
    if w == "example51":
        print(repr(calculus.example51_formula(args.N, args.theta)))
    elif w == "example41":
        print(repr(calculus.example41_tan(args.n, args.m)))
    elif w == "mixing":
        t = calculus.mixing_parameter(args.theta)
        print(json.dumps({"t": t, "residual": calculus.mixing_identity_residual(args.theta, t)}))
    else:
        print(json.dumps({
            "tau": calculus.tau(args.t, args.beta, args.theta),
            "tau_prime": calculus.tau_prime(args.t, args.beta, args.theta),
        }))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        if args.command == "formula":
            return _formula(args)
        cfg = _config(args)
        if args.command == "spectrum":
            c = cfg.resolved()
            _ensure_writable(Path(c.out))
            spec = c.spec()
            s = obtain_spectrum(c, spec)
            _publish_cache(c, spec)
            print(f"spectrum {s.fingerprint}: n_max={s.n_max}, elements={int(s.totals.sum())}")
            return EXIT_OK
        report = run(cfg)
        if args.command == "maximizer":
            print(json.dumps({"theta_star": report.theta_star, "delta_star": report.delta_star}))
            emit_report(report, "csv")
            return EXIT_LOW_DATA if report.low_data else EXIT_OK
        emit_report(report, "csv")
        if args.command == "profile":
            return EXIT_LOW_DATA if report.low_data else EXIT_OK
        emit_report(report, "json")
        print(report.condition["text"].splitlines()[0])
        for a in report.audits:
            print(f"{a['name']}: {'pass' if a['passed'] else 'FAIL'}")
        return report.exit_code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LowDataError as exc:  # a ValueError, so it must come first
        print(f"low data: {exc}", file=sys.stderr)
        return EXIT_LOW_DATA
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
