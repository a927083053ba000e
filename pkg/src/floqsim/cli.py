"""Command line entry point: ``floqsim <scenario> --config <path> ...``."""
import argparse
import json
import sys
import time

from .config import SCENARIOS, ConfigError, ExperimentConfig
from .experiments import ConvergenceError, run_scenario, write_result

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="floqsim", description="Run a driven-chain simulation scenario.")
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", help="flat key = value config file (defaults are used when omitted)")
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for sweep points")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key; may be repeated")
    parser.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = ExperimentConfig.from_file(args.config, args.scenario)
        else:
            cfg = ExperimentConfig(args.scenario)
        cfg = cfg.with_overrides(args.override)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        print(ExperimentConfig(cfg.scenario, cfg.resolved()).to_text(), end="")
        return EXIT_OK
    if args.workers < 1:
        print("config error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        record = run_scenario(cfg, workers=args.workers)
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        print(json.dumps(exc.record.convergence, indent=2, default=str), file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    paths = write_result(record, args.out, wall_seconds=round(time.perf_counter() - start, 3))
    for key, value in record.headline.items():
        print(f"{key}: {value}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
