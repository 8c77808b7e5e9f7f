"""
lattice: simulate a Glauber–Fock waveguide array and export guide intensities
"""

import argparse

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from ..models.schemas import SCHEMA_VERSION, schema_error_from
from ..payloads.presets import LATTICE_PRESETS
from ..services import lattice
from ..utils.errors import UsageError
from ..utils.logging import get_logger
from .common import RunContext

logger = get_logger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("lattice", parents=[parent], help="Waveguide-lattice propagation")
    parser.add_argument("--preset", choices=tuple(LATTICE_PRESETS), default=None)
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="Kerr parameter")
    parser.add_argument("--j", type=float, default=None, help="Half-integer index j")
    parser.add_argument("--z-max", type=float, default=None)
    parser.add_argument("--z-points", type=int, default=21)
    parser.add_argument("--guides", type=int, default=None, help="Guide count (default from truncation)")
    parser.add_argument("--ode", action="store_true", help="Cross-check against RK45 integration")
    parser.set_defaults(handler=handle)


def build_config(args: argparse.Namespace):
    if args.preset:
        if args.lam is not None or args.j is not None:
            raise UsageError("--preset cannot be combined with --lambda/--j")
        return lattice.preset_config(args.preset)

    if args.lam is None or args.j is None or args.z_max is None:
        raise UsageError("lattice needs --preset or all of --lambda, --j, --z-max")
    if args.z_points < 1:
        raise UsageError("--z-points must be at least 1")
    z_grid = np.linspace(0.0, args.z_max, args.z_points).tolist() if args.z_points > 1 else [args.z_max]
    try:
        return lattice.make_config(args.lam, args.j, z_grid, n_guides=args.guides)
    except PydanticValidationError as e:
        raise schema_error_from(e, prefix="lattice")


def handle(ctx: RunContext) -> int:
    config = build_config(ctx.args)
    intensities = lattice.intensity_map(config)
    ctx.record(lattice.export_intensity_csv(config, ctx.path("intensities.csv"), intensities))

    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_json_dict(),
        "unitarity_residual": lattice.unitarity_residual(intensities),
        "closed_form_residual": float(np.max(np.abs(intensities - lattice.closed_form_intensities(config)))),
    }
    if not config.params.positive:
        summary["revival"] = lattice.revival_report(config)
    if ctx.args.ode:
        ode = np.abs(lattice.propagate_ode(config)) ** 2
        summary["ode_residual"] = float(np.max(np.abs(intensities - ode)))
    ctx.write_json("lattice.json", summary)
    logger.info(f"Propagated {config.n_guides} guides", extra={"z_points": len(config.z_grid)})
    return 0
