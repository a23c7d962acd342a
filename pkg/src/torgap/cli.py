"""Command-line scenario runner.

    torgap run config.json [--out DIR] [--seed U64] [--precision double|extended]
                           [--emit-plots]

Exit codes: 0 success, 2 config error, 3 precondition failure, 4 falsified
invariant.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError, FalsifiedInvariantError, PreconditionError
from .scenarios import load_config, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_FALSIFIED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torgap", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a scenario config")
    runp.add_argument("config", help="path to a scenario JSON document")
    runp.add_argument("--out", default=None, help="output directory (default: config's out_dir)")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument("--precision", choices=["double", "extended"], default=None)
    runp.add_argument("--emit-plots", action="store_true", help="also write <kind>_plot.csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.precision is not None:
            config = replace(config, precision=args.precision)
        record = run(config, out_dir=args.out, emit_plots=args.emit_plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FalsifiedInvariantError as exc:
        print(f"falsified invariant: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except PreconditionError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(f"{config.kind}: {len(record.rows)} rows in {record.wall_time:.2f}s "
          f"(digest {record.input_digest[:12]})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
