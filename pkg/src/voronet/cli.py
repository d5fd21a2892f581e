"""Command-line experiment runner.

Usage:
    voronet run <config.json> [--seed S] [--replicates N] [--out DIR] [--jobs J]
    voronet list

Exit codes: 0 success, 1 configuration error, 2 numeric/runtime failure.
Config files are JSON objects validated against the experiment's schema;
unknown keys are errors. Every CSV starts with a comment line recording the
experiment, seed, and resolved parameters, and identical config+seed produces
byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .analytic import NumericError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voronet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("config", help="path to the JSON config file")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument(
        "--replicates", type=int, default=None, help="override the replicate count"
    )
    runp.add_argument("--out", default=None, help="override the output directory")
    runp.add_argument("--jobs", type=int, default=None, help="worker processes")
    sub.add_parser("list", help="print the experiment catalog as JSON")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        print(experiments.list_experiments())
        return EXIT_OK
    overrides = {
        "seed": args.seed,
        "replicates": args.replicates,
        "output_dir": args.out,
        "jobs": args.jobs,
    }
    try:
        summary = experiments.run(args.config, overrides)
    except experiments.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as exc:  # noqa: BLE001 - runner boundary
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"ok: {summary['experiment']} (seed {summary['seed']}) ->")
    for path in summary["csv_files"]:
        print(f"  {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
