"""Command-line front end: ``profdesign search <config.json>``."""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError, InfeasibleSearchError, ProfDesignError
from .runner import run_design_search

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="profdesign",
        description="Optimal designs for functional linear and generalised linear models.")
    sub = parser.add_subparsers(dest="command", required=True)
    search = sub.add_parser("search", help="run a design search described by a JSON config")
    search.add_argument("config", help="path to the JSON configuration")
    search.add_argument("--out", help="output directory (overrides output.directory)")
    search.add_argument("--seed", type=int, help="random seed (overrides search.seed)")
    search.add_argument("--workers", type=int, help="parallel worker processes")
    search.add_argument("--progress", action="store_true", default=None,
                        help="report the objective after every sweep on stderr")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config).with_overrides(
            out=args.out, seed=args.seed, workers=args.workers, progress=args.progress)
        run_design_search(config, stream=sys.stdout)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSearchError as exc:
        print(f"infeasible search: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ProfDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
