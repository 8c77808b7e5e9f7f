"""
verify: run the invariant battery and fail with exit code 2 on any failed check
"""

import argparse

from ..services.verification import FAULTS, TIERS, VerificationSuite
from ..utils.errors import VerificationError
from ..utils.logging import get_logger
from .common import RunContext

logger = get_logger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("verify", parents=[parent], help="Run the verification suite")
    parser.add_argument("--tier", choices=TIERS, default="quick")
    parser.add_argument("--fault", choices=FAULTS, default=None, help="Inject a known fault (negative control)")
    parser.set_defaults(handler=handle)


def handle(ctx: RunContext) -> int:
    args = ctx.args
    report = VerificationSuite(tier=args.tier, fault=args.fault, seed=ctx.seed).run()
    ctx.write_json("verify.json", report)

    if not report["passed"]:
        failed = report["failed_checks"]
        raise VerificationError(f"{len(failed)} verification check(s) failed: {', '.join(failed)}",
                                failed_checks=failed)
    logger.info(f"All {len(report['checks'])} verification checks passed", extra={"tier": args.tier})
    return 0
