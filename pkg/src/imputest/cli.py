"""Command-line entry point: ``imputest --config run.json [--seed S] ...``."""

import argparse
import sys

from . import experiments
from .errors import ConfigError, ImputestError


def build_parser():
    p = argparse.ArgumentParser(
        prog="imputest",
        description="Run a plug-in vs imputation experiment described by a JSON config.",
    )
    p.add_argument("--config", required=True, metavar="PATH", help="JSON experiment config")
    p.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
    p.add_argument("--replicates", type=int, metavar="N", help="override the replicate count")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="worker processes for replicates (default 1)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = experiments.ExperimentConfig.load(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.replicates is not None:
            config.replicates = args.replicates
        if args.out is not None:
            config.output = args.out
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        config.validate()
        written = experiments.run(config, threads=args.threads)
    except ImputestError as exc:
        print(f"imputest: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
