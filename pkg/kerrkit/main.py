"""
Command-line entry point for kerrkit
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .commands import bench, gen_data, grid_search, gram, lattice, train, verify
from .commands.common import FORMATS, RunContext
from .config import activate_settings, load_settings
from .utils.errors import KerrKitError, UsageError, VerificationError
from .utils.logging import LogContext, get_logger, log_with_context, setup_logging

logger = get_logger(__name__)

COMMANDS = (gen_data, gram, train, grid_search, verify, lattice, bench)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose failures surface as UsageError (exit 1, not argparse's 2)"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _workers(text: str) -> int:
    if text == "auto":
        return 0
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got '{text}'")
    if value < 0:
        raise argparse.ArgumentTypeError("workers must be nonnegative")
    return value


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="Base seed (default from settings)")
    parser.add_argument("--workers", type=_workers, default=default, help="Worker count or 'auto'")
    parser.add_argument("--out", type=Path, default=default, help="Output directory")
    parser.add_argument("--format", choices=FORMATS, default=default, help="Tabular output format")
    parser.add_argument("--config", type=Path, default=default, help="JSON settings file")
    parser.add_argument("--log-level", default=default, help="Logging level")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="kerrkit", description="Kerr coherent-state kernels for SVM classification")
    parser.add_argument("--version", action="version", version=f"kerrkit {__version__}")
    _add_global_flags(parser, suppress=False)

    # global flags are accepted after the subcommand too
    parent = CliParser(add_help=False)
    _add_global_flags(parent, suppress=True)

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=CliParser)
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers, parent)
    return parser


def _run_id(argv: List[str]) -> str:
    return hashlib.sha256(json.dumps(argv).encode("utf-8")).hexdigest()[:12]


def run(argv: List[str]) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings(args.config, seed=args.seed, workers=args.workers, log_level=args.log_level)
    setup_logging(settings.log_level)
    activate_settings(settings)

    ctx = RunContext(args.command, args, settings)
    try:
        with LogContext(command=args.command, run_id=_run_id(argv)):
            logger.info(f"Running {args.command}", extra={"seed": settings.seed, "workers": settings.workers})
            try:
                code = args.handler(ctx)
            except VerificationError:
                ctx.write_manifest()
                raise
            ctx.write_manifest()
            return code
    finally:
        activate_settings(None)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, dispatch and map errors to exit codes"""

    argv = list(sys.argv[1:] if argv is None else argv)
    setup_logging("WARNING")
    try:
        return run(argv)
    except KerrKitError as e:
        fields = {k: v for k, v in vars(e).items() if k != "message"}
        log_with_context(logger, "error", e.message, **fields)
        print(f"kerrkit: error: {e.message}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("kerrkit: interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
