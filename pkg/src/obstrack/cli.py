"""Command-line driver: one subcommand per experiment.

    obstrack single    [--config F] [--seed N] [--trials N] [--out DIR] [--jobs N]
    obstrack confusion ...
    obstrack camera    ...
    obstrack tau       ...
    obstrack emit-ilp  ...

Without ``--config`` the shipped default settings are used.
"""

import argparse
import sys

from .config import ConfigError, load_run_config
from .experiments import run
from .sim import TraceError

COMMANDS = {
    "single": ("single", "one epoch end to end, all artifacts written"),
    "confusion": ("confusion", "confusion matrices per UE-density regime"),
    "camera": ("camera", "tracking and handoff against RGB-D camera count"),
    "tau": ("tau", "accuracy, sensitivity and precision against discovery time"),
    "emit-ilp": ("emit_ilp", "write the integer program of each station's failures"),
}


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="obstrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="INI config file (default: shipped settings)")
        p.add_argument("--seed", type=_nonneg, help="base seed; trial i uses seed + i")
        p.add_argument("--trials", type=_positive, help="number of trials")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    experiment = COMMANDS[args.command][0]
    try:
        cfg = load_run_config(experiment, args.config, args.seed, args.trials, args.out, args.jobs)
        paths = run(cfg)
    except (ConfigError, TraceError, ValueError, OSError) as exc:
        print(f"obstrack {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
