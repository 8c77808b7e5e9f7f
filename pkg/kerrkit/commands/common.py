"""
Shared plumbing for command handlers: run context, output writers, manifest
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from .. import __version__
from ..config import Settings
from ..integrations import storage
from ..models.schemas import RunManifest
from ..utils.errors import UsageError
from ..utils.logging import get_logger

logger = get_logger(__name__)

FORMATS = ("csv", "json")

# argparse bookkeeping that never belongs in a manifest
_INTERNAL_ARGS = {"handler", "config", "log_level", "out", "workers", "seed"}


class RunContext:
    """Resolved settings, output directory and the outputs written so far"""

    def __init__(self, command: str, args: argparse.Namespace, settings: Settings):
        self.command = command
        self.args = args
        self.settings = settings
        self.out_dir = Path(args.out) if args.out else Path(".")
        self.fmt = args.format or "json"
        self.outputs: List[Path] = []

    @property
    def seed(self) -> int:
        return self.settings.seed

    @property
    def workers(self) -> int:
        return self.settings.workers

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def record(self, path: Path) -> Path:
        self.outputs.append(Path(path))
        return path

    def write_json(self, name: str, payload: Any) -> Path:
        return self.record(storage.write_json(self.path(name), payload))

    def write_table(self, stem: str, frame: pd.DataFrame) -> Path:
        """Tabular output honouring --format"""
        if self.fmt == "csv":
            return self.record(storage.write_frame(frame, self.path(f"{stem}.csv")))
        records = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
        return self.write_json(f"{stem}.json", records)

    def arguments(self) -> Dict[str, Any]:
        data = {}
        for key, value in sorted(vars(self.args).items()):
            if key in _INTERNAL_ARGS:
                continue
            data[key] = str(value) if isinstance(value, Path) else value
        return data

    def write_manifest(self) -> Path:
        manifest = RunManifest(
            command=self.command,
            arguments=self.arguments(),
            settings=self.settings.model_dump(mode="json"),
            library_version=__version__,
            seeds={"seed": self.seed},
            outputs=sorted(p.name for p in self.outputs),
        )
        path = storage.write_manifest(manifest, self.out_dir)
        logger.info(f"Wrote manifest {path}", extra={"outputs": len(self.outputs)})
        return path


def parse_size(text: str) -> tuple:
    """'WxH' -> (W, H)"""
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"expected WxH, got '{text}'")
    if w < 2 or h < 2:
        raise UsageError("boundary grid needs at least 2x2 points")
    return w, h


def parse_floats(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got '{text}'")
