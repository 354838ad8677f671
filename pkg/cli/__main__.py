"""Entry point for running the CLI as a module."""

import argparse
import sys
from pathlib import Path

from tslg.configs import CaseId

from .tslg_cli import main

_CASES = [c.value for c in CaseId]


def _case_options(parser: argparse.ArgumentParser, with_case: bool = True) -> None:
    if with_case:
        parser.add_argument(
            "--case", required=True, choices=_CASES, help="Case study id"
        )
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="Case YAML overlaid on the defaults "
        "(default: <cases_dir>/<case>.yaml if present)",
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="Random seed (default: from the case)"
    )


def _campaign_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--events", type=Path, required=True, help="Event CSV for the exposure model"
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Threads simulating test batches (results do not depend on it)",
    )
    parser.add_argument(
        "--batch-size",
        type=int,
        default=None,
        help="Tests per seeded batch (default: from the app config)",
    )
    parser.add_argument(
        "--out", type=Path, default=None, help="Output directory"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tslg",
        description="Testing-scenario library generation and accelerated evaluation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--debug", action="store_true", help="Enable debug logging on stderr"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-ndd", help="Generate synthetic naturalistic events")
    _case_options(gen)
    gen.add_argument("--n", type=int, default=None, help="Number of events")
    gen.add_argument("--out", type=Path, default=None, help="Event CSV to write")

    for name, help_text, with_case in (
        ("build-lib", "Build a critical-scenario library", True),
        ("train-rl", "Train the car-following Q-table library", False),
    ):
        build = commands.add_parser(name, help=help_text)
        _case_options(build, with_case=with_case)
        build.add_argument(
            "--events", type=Path, required=True, help="Event CSV for the exposure model"
        )
        build.add_argument(
            "--method",
            choices=("td", "backward"),
            default="td",
            help="Q-table solver for the car-following case (default: td)",
        )
        build.add_argument("--out", type=Path, default=None, help="Library JSON to write")

    evaluate = commands.add_parser("evaluate", help="Run a test campaign")
    _case_options(evaluate)
    _campaign_options(evaluate)
    evaluate.add_argument("--library", type=Path, default=None, help="Library JSON")
    evaluate.add_argument(
        "--baseline", choices=("ndd",), default=None, help="Run the NDD baseline instead"
    )
    evaluate.add_argument(
        "--oracle",
        choices=("exhaustive",),
        default=None,
        help="Compute the exact accident rate instead of sampling",
    )
    evaluate.add_argument(
        "--fixed-tests",
        type=int,
        default=None,
        help="Run exactly this many tests, ignoring the stopping rule",
    )

    compare = commands.add_parser(
        "compare", help="Library campaign against the NDD baseline"
    )
    _case_options(compare)
    _campaign_options(compare)
    compare.add_argument("--library", type=Path, required=True, help="Library JSON")

    inspect = commands.add_parser("inspect", help="Summarize a library")
    _case_options(inspect, with_case=False)
    inspect.add_argument("--library", type=Path, required=True, help="Library JSON")
    inspect.add_argument(
        "--events", type=Path, default=None, help="Event CSV (needed for the map)"
    )
    inspect.add_argument(
        "--accident-map",
        type=Path,
        default=None,
        help="Write the per-cell surrogate outcome as CSV",
    )

    replay = commands.add_parser("replay", help="Re-run a command from its manifest")
    replay.add_argument("--manifest", type=Path, required=True, help="Run manifest")
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    return build_parser().parse_args(argv)


def cli_entry() -> None:
    """CLI entry point."""
    argv = sys.argv[1:]
    args = parse_args(argv)
    try:
        code = main(argv, args, parse_args)
    except KeyboardInterrupt:
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    cli_entry()
