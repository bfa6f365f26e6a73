"""Command-line entry point ``ddsim``.

Exit codes: 0 on success, 2 when convergence flags fail (the output is
still written), 1 on any error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import DDSimError
from .experiments import EXPERIMENTS, ExperimentConfig, emit, run_experiment

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONVERGENCE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map to exit code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ddsim", description="Dynamical decoupling experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="flat INI configuration file")
    p.add_argument("--out", default=None, help="output file (default: output_path from config, else stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent rows")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"ddsim: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = ExperimentConfig.from_ini(args.config, experiment=args.experiment).with_env()
        if args.threads < 1:
            raise DDSimError("--threads must be positive")
        table = run_experiment(cfg, threads=args.threads)
        out = args.out or cfg.output_path or None
        text = emit(table, args.format, out)
        if out is None:
            sys.stdout.write(text)
    except (DDSimError, OSError, ValueError) as exc:
        print(f"ddsim: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if table.convergence_failures:
        for msg in table.convergence_failures:
            print(f"ddsim: convergence flag: {msg}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
