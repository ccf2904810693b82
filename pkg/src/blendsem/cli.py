"""Command-line entry point: ``blendsem run <config> [--set k=v ...] [--out-dir DIR]``."""

import argparse
import json
import logging
import sys

from blendsem.config import load_config, parse_assignments, preset_names
from blendsem.driver import run
from blendsem.errors import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(prog="blendsem",
                                     description="Positivity-limited hybrid DG/FV Euler solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a simulation from a config file or preset")
    p_run.add_argument("config", help=f"config path or preset ({', '.join(preset_names())})")
    p_run.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE")
    p_run.add_argument("--out-dir", default=None)
    sub.add_parser("presets", help="list shipped presets")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        print("\n".join(preset_names()))
        return EXIT_OK
    try:
        config = load_config(args.config, parse_assignments(args.overrides))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run(config, out_dir=args.out_dir)
    summary = {"status": result.status, "t": result.t, "steps": result.steps,
               "alpha_max": result.alpha_max, "dt_halvings": result.dt_halvings,
               "out_dir": None if result.out_dir is None else str(result.out_dir)}
    if not result.ok:
        summary["failure"] = result.failure
        print(json.dumps(summary, indent=2), file=sys.stderr)
        return EXIT_ABORT
    print(json.dumps(summary, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
