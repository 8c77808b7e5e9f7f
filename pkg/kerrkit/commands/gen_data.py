"""
gen-data: generate a preset dataset (or fetch/convert BreastMNIST) to CSV + sidecar
"""

import argparse

from ..payloads.presets import DISK_PRESETS, VERSIONED_GENERATORS, preset_name
from ..services import datasets
from ..integrations import storage
from ..utils.errors import UsageError
from ..utils.logging import get_logger
from .common import RunContext

logger = get_logger(__name__)

GENERATORS = (*VERSIONED_GENERATORS, "disks", "breastmnist")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("gen-data", parents=[parent], help="Generate a benchmark dataset")
    parser.add_argument("generator", choices=GENERATORS)
    parser.add_argument("--version", choices=("v1", "v2"), default=None, help="moons/circles/hypercube size")
    parser.add_argument("--preset", choices=DISK_PRESETS, default=None, help="disks layout")
    parser.add_argument("--noise", type=float, default=None, help="Override generator noise")
    parser.add_argument("--factor", type=float, default=None, help="Override circles inner factor")
    parser.add_argument("--fetch", action="store_true", help="Download the BreastMNIST archive first")
    parser.set_defaults(handler=handle)


def handle(ctx: RunContext) -> int:
    args = ctx.args
    if args.generator == "breastmnist":
        if args.fetch:
            datasets.fetch_breastmnist()
        data = datasets.load_breastmnist()
    else:
        if args.fetch:
            raise UsageError("--fetch only applies to breastmnist")
        if args.generator == "disks" and args.version:
            raise UsageError("disks takes --preset, not --version")
        if args.generator != "disks" and args.preset:
            raise UsageError(f"{args.generator} takes --version, not --preset")
        if args.factor is not None and args.generator != "circles":
            raise UsageError("--factor only applies to circles")
        name = preset_name(args.generator, args.version, args.preset)
        data = datasets.make_preset(name, ctx.seed, noise=args.noise, factor=args.factor)

    csv_path, sidecar = storage.write_dataset(data, ctx.path(f"{data.name}.csv"))
    ctx.record(csv_path)
    ctx.record(sidecar)
    ctx.write_json("summary.json", {"schema_version": "1.0", **datasets.dataset_summary(data)})
    return 0
