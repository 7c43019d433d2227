"""Command-line entry point: ``tagqkd <command> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from tagqkd import experiments
from tagqkd.config import FORMATS, ConfigError, load_config, parse_unitary
from tagqkd.records import write_output


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None, help="root seed (default 0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=FORMATS, default=None)

    parser = argparse.ArgumentParser(
        prog="tagqkd", description="Tag-encoded two-photon QKD simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bell-decompose", parents=[common], help="triplet weights of U x U |Psi+>")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--entries", help="4 comma-separated complex entries, row-major (e.g. '0,1j,1j,0')")
    g.add_argument("--euler", nargs=3, type=float, metavar=("XI", "PHI1", "PHI2"),
                   help="Hurwitz angles: U00 = cos(XI) e^{i PHI1}, U01 = sin(XI) e^{i PHI2}")

    p = sub.add_parser("postselect-stats", parents=[common], help="Haar-averaged acceptance")
    p.add_argument("--trials", type=_positive, default=100_000)

    p = sub.add_parser("qkd-run", parents=[common], help="run one QKD session from a config file")
    p.add_argument("config", help="flat key = value config file")
    p.add_argument("--trials", type=_positive, default=None, help="override n_pairs")

    p = sub.add_parser("measure-circuit-stats", parents=[common],
                       help="beamsplitter circuit success rates per basis")
    p.add_argument("--trials", type=_positive, default=10_000, help="trials per basis")
    p.add_argument("--bases", default=",".join(experiments.DEFAULT_BASES),
                   help="comma list of basis names or theta:phi pairs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = 0 if args.seed is None else args.seed
    fmt = args.format or "summary"
    try:
        if args.command == "bell-decompose":
            euler = " ".join(map(repr, args.euler)) if args.euler else None
            u = parse_unitary(args.entries, euler)
            summary, rows = experiments.bell_decompose_report(u), []
        elif args.command == "postselect-stats":
            summary, rows = experiments.postselect_stats(args.trials, seed)
        elif args.command == "measure-circuit-stats":
            bases = [b.strip() for b in args.bases.split(",") if b.strip()]
            summary, rows = experiments.measure_circuit_stats(args.trials, seed, bases)
        else:
            config, options = load_config(args.config)
            overrides = {}
            if args.seed is not None:
                overrides["seed"] = args.seed
            if args.trials is not None:
                overrides["n_pairs"] = args.trials
            config = dataclasses.replace(config, **overrides)
            fmt = args.format or options.get("format", "summary")
            args.out = args.out or options.get("out")
            summary, rows = experiments.qkd_run(config), []
    except ConfigError as exc:
        print(f"tagqkd: {args.config}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"tagqkd: error: {exc}", file=sys.stderr)
        return 1
    write_output(args.out, fmt, summary, rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
