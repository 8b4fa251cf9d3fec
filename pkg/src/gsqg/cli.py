"""Command-line entry point: ``gsqg {run,verify,ic,commutator}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import spectral
from .acceptance import CHECKS, verify_suite
from .analysis import commutator_G
from .config import load_config
from .errors import GSQGError
from .harness import run_experiment
from .presets import PRESET_NAMES, RandomBand, build_ic


def _dump(values: np.ndarray, out: str | None):
    target = sys.stdout if out in (None, "-") else out
    np.savetxt(target, values, delimiter=",", fmt="%.17g")


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except (GSQGError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_experiment(config, args.output_dir)


def cmd_verify(args) -> int:
    return verify_suite(args.only)


def cmd_ic(args) -> int:
    grid = spectral.Grid(args.grid)
    preset = args.preset
    if preset == "random_band":
        preset = RandomBand(seed=args.seed, decay_exponent=args.decay_exponent, band=args.band)
    _dump(spectral.inverse_transform(build_ic(preset, grid)), args.out)
    return 0


def cmd_commutator(args) -> int:
    grid = spectral.Grid(args.grid)
    theta = build_ic("two_mode", grid)
    _dump(spectral.inverse_transform(commutator_G(theta, theta, args.alpha)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsqg", description="Operator-splitting solver for generalized SQG equations."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a convergence experiment from a JSON config")
    run.add_argument("config", help="path to the JSON config")
    run.add_argument("--output-dir", help="override the config's output_dir")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="run the acceptance checks")
    verify.add_argument("--only", action="append", choices=sorted(CHECKS), help="run just this check (repeatable)")
    verify.set_defaults(func=cmd_verify)

    ic = sub.add_parser("ic", help="print an initial condition as a CSV matrix")
    ic.add_argument("preset", choices=PRESET_NAMES)
    ic.add_argument("--grid", type=int, default=128)
    ic.add_argument("--seed", type=int, default=0)
    ic.add_argument("--decay-exponent", type=float, default=2.0)
    ic.add_argument("--band", type=int, default=8)
    ic.add_argument("--out", help="output file (default stdout)")
    ic.set_defaults(func=cmd_ic)

    comm = sub.add_parser("commutator", help="print G^alpha(theta, theta) for the two_mode preset")
    comm.add_argument("--alpha", type=float, required=True)
    comm.add_argument("--grid", type=int, default=128)
    comm.add_argument("--out", help="output file (default stdout)")
    comm.set_defaults(func=cmd_commutator)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (GSQGError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
