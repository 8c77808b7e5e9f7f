"""
bench: reproduce one benchmark table next to its reference scores
"""

import argparse

from ..services.benchmark import TABLES, BenchmarkRunner
from .common import RunContext


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("bench", parents=[parent], help="Reproduce a benchmark table")
    parser.add_argument("--table", type=int, choices=TABLES, required=True)
    parser.add_argument("--noise", type=float, default=None, help="Amplitude-noise level (tables 5 and 6)")
    parser.add_argument("--quick", action="store_true", help="Reduced grids for smoke runs")
    parser.set_defaults(handler=handle)


def handle(ctx: RunContext) -> int:
    args = ctx.args
    runner = BenchmarkRunner(ctx.settings, ctx.workers, quick=args.quick, seed=ctx.seed)
    frame = runner.run(args.table, args.noise)
    ctx.write_table(f"table{args.table}", frame)
    return 0
