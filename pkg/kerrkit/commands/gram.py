"""
gram: compute the Gram matrix of a dataset under a kernel spec and cache it
"""

import argparse
from pathlib import Path

from ..integrations import gram_cache, storage
from ..models.schemas import SCHEMA_VERSION, KernelFamily
from ..services import kernels
from ..services.datasets import scale_for
from ..utils.logging import get_logger
from .common import RunContext

logger = get_logger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("gram", parents=[parent], help="Compute and cache a Gram matrix")
    parser.add_argument("--data", type=Path, required=True, help="Dataset CSV")
    parser.add_argument("--spec", type=Path, required=True, help="KernelSpec JSON")
    parser.add_argument("--audit", action="store_true", help="Write a PSD audit report")
    parser.add_argument("--no-repair", action="store_true", help="Keep an indefinite QEC Gram as computed")
    parser.set_defaults(handler=handle)


def handle(ctx: RunContext) -> int:
    args = ctx.args
    dataset = storage.read_dataset(args.data)
    spec = storage.read_spec(args.spec)
    scaled = scale_for(dataset, spec)

    result = kernels.gram(scaled.features, spec, workers=ctx.workers, audit=args.audit, repair=not args.no_repair)
    path = ctx.record(gram_cache.write_gram(ctx.path("gram.kgrm"), result.values))
    logger.info(f"Cached {result.n}x{result.n} Gram for {spec.label()}", extra={"path": str(path)})

    if args.audit:
        floor = kernels.psd_floor(result.n)
        ctx.write_json("audit.json", {
            "schema_version": SCHEMA_VERSION,
            "dataset": dataset.name,
            "spec": spec.to_json_dict(),
            "n": result.n,
            "min_eigenvalue": result.min_eigenvalue,
            "floor": -floor,
            "pass": result.min_eigenvalue >= -floor,
            "repaired": spec.family == KernelFamily.QEC and not args.no_repair,
            "diagonal_shift": result.diagonal_shift,
            "clipped_mass": result.clipped_mass,
            "sha256": gram_cache.content_digest(path),
        })
    return 0
