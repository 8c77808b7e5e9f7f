"""
grid-search: exhaustive hyperparameter search under the test- or CV-driven objective
"""

import argparse
import json
from pathlib import Path
from typing import Dict, List, Optional

from ..integrations import storage
from ..models.schemas import KernelFamily, NoiseTarget, Realify, Scenario
from ..payloads.grids import default_c_reg, default_grid
from ..services.datasets import add_amplitude_noise
from ..services.search_strategy import GridSearchStrategy
from ..utils.errors import UsageError
from ..utils.logging import get_logger
from .common import RunContext, parse_floats

logger = get_logger(__name__)

SCENARIOS = {"test": Scenario.TEST_DRIVEN, "cv": Scenario.CROSS_VAL_DRIVEN}


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("grid-search", parents=[parent], help="Hyperparameter grid search")
    parser.add_argument("--data", type=Path, required=True, help="Dataset CSV")
    parser.add_argument("--family", required=True, choices=[f.value for f in KernelFamily])
    parser.add_argument("--grid", default=None, help="Grid as a JSON object or a path to one")
    parser.add_argument("--c-reg", default=None, help="Comma-separated C values")
    parser.add_argument("--scenario", choices=tuple(SCENARIOS), default="test")
    parser.add_argument("--realify", choices=[r.value for r in Realify], default=Realify.SQUARED_MODULUS.value)
    parser.add_argument("--noise", type=float, default=None, help="Encoding-amplitude noise level")
    parser.add_argument("--noise-target", choices=[t.value for t in NoiseTarget],
                        default=NoiseTarget.ENCODING_AMPLITUDE.value)
    parser.add_argument("--with-cv", action="store_true", help="Report CV scores under the test scenario too")
    parser.add_argument("--trace", action="store_true", help="Write the per-cell trace CSV")
    parser.add_argument("--quick", action="store_true", help="Use the reduced default grid")
    parser.set_defaults(handler=handle)


def parse_grid(text: Optional[str]) -> Optional[Dict[str, List[float]]]:
    """Inline JSON object or a file holding one; scalars become one-element lists"""
    if text is None:
        return None
    source = text
    if not text.lstrip().startswith("{"):
        path = Path(text)
        if not path.exists():
            raise UsageError(f"--grid is neither a JSON object nor an existing file: {text}")
        source = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(source)
    except json.JSONDecodeError as e:
        raise UsageError(f"--grid is not valid JSON: {e.msg}")
    if not isinstance(payload, dict):
        raise UsageError("--grid must be a JSON object of parameter lists")
    grid = {}
    for key, values in payload.items():
        values = values if isinstance(values, list) else [values]
        try:
            grid[key] = [float(v) for v in values]
        except (TypeError, ValueError):
            raise UsageError(f"--grid values for '{key}' must be numbers")
    return grid


def handle(ctx: RunContext) -> int:
    args = ctx.args
    family = KernelFamily(args.family)
    grid = parse_grid(args.grid) or default_grid(family, args.quick)
    c_values = parse_floats(args.c_reg) or default_c_reg(args.quick)
    noise = None
    if args.noise:
        noise = add_amplitude_noise(args.noise, NoiseTarget(args.noise_target), seed=ctx.seed)

    dataset = storage.read_dataset(args.data)
    result = GridSearchStrategy(ctx.settings, ctx.workers).search(
        dataset,
        family,
        grid=grid,
        c_values=c_values,
        scenario=SCENARIOS[args.scenario],
        seed=ctx.seed,
        realify=Realify(args.realify),
        noise=noise,
        with_cv=args.with_cv,
    )

    payload = result.to_json_dict()
    payload["f1_test"] = result.scores["test"].f1
    payload["f1_train"] = result.scores["train"].f1
    if "cv" in result.scores:
        payload["f1_cv"] = result.scores["cv"].f1
    ctx.write_json("result.json", payload)

    if args.trace:
        ctx.record(storage.write_trace(result, ctx.path("trace.csv")))
    return 0
