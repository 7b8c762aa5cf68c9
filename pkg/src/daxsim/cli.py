"""Command line: ``daxsim run``, ``daxsim sweep`` and ``daxsim tidy``."""

import argparse
import json
import sys

from . import config as configmod
from .controllers import ControllerMode
from .errors import DaxSimError
from .report import emit, load_reports
from .runner import AXES, run, sweep


def _parse_axis_value(axis, text):
    return text if axis in ("mode", "nvm_latency") else int(text)


def build_parser():
    p = argparse.ArgumentParser(prog="daxsim", description="DAX NVM redundancy simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config", help="TOML experiment file")
    r.add_argument("--out", help="output path (default: config's output.path or stdout)")
    r.add_argument("--format", choices=("json", "csv"))
    r.add_argument("--seed", type=int, action="append", help="override seeds (repeatable)")
    r.add_argument("--summary", action="store_true", help="print the mean/RMS-error summary to stderr")

    s = sub.add_parser("sweep", help="run a config across one axis")
    s.add_argument("config")
    s.add_argument("--axis", required=True, choices=AXES)
    s.add_argument("--values", nargs="+", help="axis points (defaults depend on the axis)")
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"))
    s.add_argument("--seed", type=int, action="append")
    s.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    t = sub.add_parser("tidy", help="convert JSON reports to the tidy CSV")
    t.add_argument("reports", nargs="+")
    t.add_argument("--out")
    return p


def undetected_corruption(reports):
    """True when a mode that promises detection consumed corrupt data silently."""
    return any(r.silent_corruptions for r in reports if ControllerMode.parse(r.mode).detects)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "tidy":
            reports = [r for path in args.reports for r in load_reports(path)]
            emit(reports, "csv", args.out)
            return 0
        cfg = configmod.load(args.config)
        fmt = args.format or cfg.format
        out = args.out or cfg.output
        if args.command == "run":
            reports, summary = run(cfg, args.seed)
            if args.summary:
                sys.stderr.write(json.dumps(summary, indent=2) + "\n")
        else:
            values = None
            if args.values:
                values = [_parse_axis_value(args.axis, v) for v in args.values]
            reports = sweep(cfg, args.axis, values, args.seed, args.jobs)
        emit(reports, fmt, out)
    except DaxSimError as exc:
        sys.stderr.write(f"daxsim: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"daxsim: error: {exc}\n")
        return 2
    if undetected_corruption(reports):
        sys.stderr.write("daxsim: undetected corruption in a detecting mode\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
