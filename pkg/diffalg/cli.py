"""``diffalg`` command line: run one scenario, run the shipped corpus, or serve the API."""

from __future__ import annotations

import argparse
import asyncio
import sys
from typing import Sequence

import structlog

from diffalg.errors import DiffalgError
from diffalg.observability import configure
from diffalg.scenario.runner import corpus_paths, run_corpus, run_file

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

logger = structlog.get_logger()


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffalg", description="Exact checks on graded quotient rings.")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_bounds(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--bound", type=_positive, help="degree bound, in units of the largest weight")
        sub.add_argument("--ext-bound", type=_positive, help="highest Ext index checked")
        sub.add_argument("--frobenius-max", type=_positive, help="largest Frobenius exponent checked")
        sub.add_argument("--machine", action="store_true", help="print only the key = value lines")

    run = commands.add_parser("run", help="run one scenario file")
    run.add_argument("file")
    add_bounds(run)

    corpus = commands.add_parser("corpus", help="run the shipped scenarios")
    add_bounds(corpus)

    serve = commands.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, int | None]:
    return {"bound": args.bound, "ext_bound": args.ext_bound, "frobenius_max": args.frobenius_max}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    configure(sys.stderr)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("diffalg.main:app", host=args.host, port=args.port)
        return EXIT_PASS

    try:
        if args.command == "run":
            reports = [run_file(args.file, **_overrides(args))]
        else:
            reports = asyncio.run(run_corpus(corpus_paths(), **_overrides(args)))
    except DiffalgError as exc:
        logger.warning("scenario_error", kind=exc.kind, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for report in reports:
        sys.stdout.write(report.machine_text() if args.machine else report.human_text())
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
