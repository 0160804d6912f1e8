"""``zenolab <experiment> [flags]``: run one experiment family and write a table."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigInvalid, ZenoError
from .harness import (
    EXPERIMENTS,
    FORMATS,
    HAMILTONIANS,
    SEED_ENV,
    build_config,
    error_record,
    parse_n_list,
    run_experiment,
    serialize,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalid(message)


def _n_list(text):
    try:
        return parse_n_list(text)
    except ConfigInvalid as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, help="Hilbert-space dimension (default 2)")
    common.add_argument("--n-list", type=_n_list, dest="n_list",
                        help="comma-separated N values; '4,8,...,4096' expands the progression")
    common.add_argument("--seed", type=int, help=f"RNG seed (default 0, or ${SEED_ENV})")
    common.add_argument("--lambda", type=float, dest="lam", help="two-level coupling (default pi/2)")
    common.add_argument("--hamiltonian", choices=HAMILTONIANS)
    common.add_argument("--states", choices=("basis", "random"),
                        help="source/target states: e0->e1 or seeded random")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--config", help="file of 'key = value' lines; flags override it")

    parser = _Parser(prog="zenolab", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        flags = {
            "dim": args.dim,
            "n-list": args.n_list,
            "seed": args.seed,
            "lambda": args.lam,
            "hamiltonian": args.hamiltonian,
            "states": args.states,
            "format": args.format,
            "out": args.out,
        }
        cfg = build_config(args.experiment, flags, args.config).resolved()
        text = serialize(run_experiment(cfg), cfg.format)
        if cfg.out and cfg.out != "-":
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ZenoError, OSError) as exc:
        json.dump(error_record(exc), sys.stderr)
        sys.stderr.write("\n")
        return 2 if isinstance(exc, ConfigInvalid) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
