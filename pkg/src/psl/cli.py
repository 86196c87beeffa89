"""Command line entry point: ``psl <kind> --input task.json``."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .tasks import KINDS, dumps, run_task


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psl", description="Run a support or Lagrangian check from a JSON task file.")
    ap.add_argument("--version", action="version", version=f"psl {__version__}")
    ap.add_argument("kind", choices=KINDS, help="task kind; must match the task file")
    ap.add_argument("--input", "-i", required=True, help="path to the JSON task file")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--mode", choices=("eigen", "ideal"), help="eigenvalue route or ideal-certificate route")
    ap.add_argument("--seed", type=int, help="seed for randomized searches")
    ap.add_argument("--depth", type=int, help="word-length bound for the Bernstein search")
    ap.add_argument("--oracle", action="store_true", help="cross-check curvature against an independent computation")
    ap.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    report, code = run_task(args.input, kind=args.kind, mode=args.mode, seed=args.seed, depth=args.depth,
                            oracle=args.oracle, timing=args.timing)
    text = dumps(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"psl: {report['error']}: {report['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
