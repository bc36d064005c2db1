"""Command-line entry point for disco."""

import argparse
import logging
import sys
from typing import List, Optional

from disco.commands import (
    cmd_discover,
    cmd_genbk,
    cmd_learn,
    cmd_rulespace,
    cmd_scale,
    cmd_sweep,
)
from disco.core.config import settings
from disco.core.logging import setup_logging
from disco.schemas.report import RunReport

logger = logging.getLogger(__name__)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per batch job."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level", default=settings.LOG_LEVEL, help="Minimum log level on stderr"
    )
    common.add_argument(
        "--log-format",
        default=settings.LOG_FORMAT,
        choices=["TEXT", "JSON", "text", "json"],
        help="Log line format on stderr",
    )
    common.add_argument(
        "--json-report",
        action="store_true",
        help="Print the run report as one JSON line after the output",
    )
    common.add_argument(
        "--threads", type=_positive_int, default=None, help="Worker threads for discovery"
    )

    parser = argparse.ArgumentParser(
        prog="disco",
        description="Discover BK constraints and learn optimal Datalog programs.",
    )
    parser.add_argument("--version", action="version", version=settings.VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    discover = sub.add_parser("discover", parents=[common], help="Mine BK properties")
    discover.add_argument("bk", help="Background knowledge file")
    discover.add_argument("--bias", help="Bias file restricting the candidate relations")
    discover.add_argument("--output", "-o", help="Output file (default: stdout)")
    discover.add_argument("--format", default="json", choices=["json", "asp"])
    discover.add_argument(
        "--constraints", action="store_true", help="Also write compiled constraints"
    )
    discover.add_argument(
        "--explain", action="store_true", help="Log a counter-example per failed check"
    )

    learn = sub.add_parser("learn", parents=[common], help="Learn an optimal program")
    learn.add_argument("bk", help="Background knowledge file")
    learn.add_argument("examples", help="Examples file")
    learn.add_argument("bias", help="Bias file")
    learn.add_argument(
        "--no-discovery", action="store_true", help="Learn without mined constraints"
    )
    learn.add_argument("--timeout", type=float, default=None, help="Budget in seconds")
    learn.add_argument(
        "--subsumption",
        action="store_true",
        default=None,
        help="Use subsumption for learned constraints",
    )

    genbk = sub.add_parser("genbk", parents=[common], help="Write synthetic string BK")
    genbk.add_argument("alphabet", type=int, help="Alphabet size n")
    genbk.add_argument("max_length", type=int, help="Maximum string length L")
    genbk.add_argument("--output", "-o", help="Output file (default: stdout)")
    genbk.add_argument(
        "--force", action="store_true", help="Ignore the output size guard"
    )

    rulespace = sub.add_parser(
        "rulespace", parents=[common], help="Count rules with and without constraints"
    )
    rulespace.add_argument("bias", help="Bias file")
    rulespace.add_argument("bk", help="Background knowledge file")

    sweep = sub.add_parser(
        "sweep", parents=[common], help="Learning effort against maximum rule size"
    )
    sweep.add_argument("bk", help="Background knowledge file")
    sweep.add_argument("examples", help="Examples file")
    sweep.add_argument("bias", help="Bias file")
    sweep.add_argument("--min-body", type=_positive_int, default=1)
    sweep.add_argument("--max-body", type=_positive_int, default=3)
    sweep.add_argument("--timeout", type=float, default=None, help="Budget per run")
    sweep.add_argument("--csv", help="Also write the table as CSV")

    scale = sub.add_parser(
        "scale", parents=[common], help="Discovery time against synthetic BK size"
    )
    scale.add_argument(
        "--alphabets", type=_int_list, default=[2, 4, 8], help="e.g. 5,10,20"
    )
    scale.add_argument("--max-length", type=_positive_int, default=4)
    scale.add_argument("--csv", help="Also write the table as CSV")

    return parser


def run(args: argparse.Namespace) -> RunReport:
    """Dispatch parsed arguments to their command body."""
    if args.command == "discover":
        return cmd_discover(
            args.bk,
            bias_path=args.bias,
            output_path=args.output,
            fmt=args.format,
            with_constraints=args.constraints,
            explain=args.explain,
            threads=args.threads,
        )
    if args.command == "learn":
        return cmd_learn(
            args.bk,
            args.examples,
            args.bias,
            discovery=not args.no_discovery,
            timeout=args.timeout,
            threads=args.threads,
            subsumption=args.subsumption,
        )
    if args.command == "genbk":
        return cmd_genbk(
            args.alphabet, args.max_length, output_path=args.output, force=args.force
        )
    if args.command == "rulespace":
        return cmd_rulespace(args.bias, args.bk, threads=args.threads)
    if args.command == "sweep":
        return cmd_sweep(
            args.bk,
            args.examples,
            args.bias,
            min_body=args.min_body,
            max_body=args.max_body,
            timeout=args.timeout,
            csv_path=args.csv,
            threads=args.threads,
        )
    return cmd_scale(
        args.alphabets,
        max_length=args.max_length,
        csv_path=args.csv,
        threads=args.threads,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit status."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_format)

    report = run(args)
    if args.json_report:
        sys.stdout.write(report.model_dump_json() + "\n")
    if report.success:
        logger.info(f"{report.command} finished in {report.total_time:.3f}s")
    sys.stdout.flush()
    return int(report.exit_code)


if __name__ == "__main__":
    sys.exit(main())
