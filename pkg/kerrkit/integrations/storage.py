"""
File storage for datasets, specs, models, traces and run manifests

Datasets are CSV (`f0..f{d-1},label`, LF line endings) with a JSON sidecar
carrying name, seed, scaling and the train/test partition. JSON outputs are
written with sorted keys so reruns are byte-identical.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError as PydanticValidationError

from ..models.schemas import (
    Dataset,
    GridSearchResult,
    KernelSpec,
    RunManifest,
    ScalingRecord,
    SvmModel,
    schema_error_from,
)
from ..services.datasets import require_labels
from ..utils.errors import DatasetUnavailableError, SchemaError
from ..utils.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_json(path: PathLike, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload), encoding="utf-8", newline="\n")
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path.name} is not valid JSON: {e.msg} (line {e.lineno})", field="<root>")


def sidecar_path(csv_path: PathLike) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_dataset(dataset: Dataset, path: PathLike) -> Tuple[Path, Path]:
    """CSV plus sidecar; returns both paths"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(dataset.features, columns=[f"f{k}" for k in range(dataset.d)])
    frame["label"] = dataset.labels
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    sidecar = write_json(sidecar_path(path), {
        "name": dataset.name,
        "seed": dataset.seed,
        "scaling": dataset.scaling.model_dump(mode="json"),
        "n_train": dataset.n_train,
        "n_test": dataset.n_test,
        "test_idx": dataset.test_idx,
    })
    logger.info(f"Wrote dataset {dataset.name} to {path}", extra={"n": dataset.n, "d": dataset.d})
    return path, sidecar


def _feature_columns(columns: List[str]) -> List[str]:
    features = [c for c in columns if c != "label"]
    expected = [f"f{k}" for k in range(len(features))]
    if features != expected:
        bad = next((c for c, e in zip(features, expected) if c != e), features[-1] if features else "f0")
        raise SchemaError(f"feature columns must be f0..f{len(features) - 1}, found '{bad}'", field=bad)
    if not features:
        raise SchemaError("dataset CSV has no feature columns", field="f0")
    return features


def read_dataset(path: PathLike) -> Dataset:
    """
    Load a dataset CSV and its sidecar (optional)

    Raises:
        DatasetUnavailableError: file missing
        SchemaError: missing label column, non-numeric values, bad labels
    """

    path = Path(path)
    if not path.exists():
        raise DatasetUnavailableError(f"dataset file not found: {path}", path=str(path))

    frame = pd.read_csv(path)
    require_labels(list(frame.columns))
    features = _feature_columns(list(frame.columns))
    for column in features + ["label"]:
        if not pd.api.types.is_numeric_dtype(frame[column]):
            raise SchemaError(f"column '{column}' is not numeric", field=column)

    meta: Dict[str, Any] = {"name": path.stem, "seed": 0}
    if sidecar_path(path).exists():
        meta.update(read_json(sidecar_path(path)))

    try:
        return Dataset(
            features=frame[features].to_numpy(dtype=float),
            labels=frame["label"].to_numpy(),
            name=meta["name"],
            seed=meta.get("seed", 0),
            scaling=ScalingRecord.model_validate(meta.get("scaling") or {}),
            n_train=meta.get("n_train"),
            n_test=meta.get("n_test"),
            test_idx=meta.get("test_idx"),
        )
    except PydanticValidationError as e:
        raise schema_error_from(e)


def read_spec(path: PathLike) -> KernelSpec:
    """KernelSpec JSON; SchemaError names the offending field"""
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise SchemaError("kernel spec must be a JSON object", field="<root>")
    return KernelSpec.parse(payload)


def write_model(model: SvmModel, path: PathLike) -> Path:
    return write_json(path, model.to_json_dict())


def read_model(path: PathLike) -> SvmModel:
    payload = read_json(path)
    try:
        spec = payload.get("spec")
        return SvmModel(
            dual_coefs=payload["dual_coefs"],
            bias=payload["bias"],
            support_idx=payload["support_idx"],
            c_reg=payload["c_reg"],
            spec=KernelSpec.parse(spec) if spec else None,
            train_ref=payload.get("train_ref", ""),
            status=payload.get("status", "converged"),
            iterations=payload.get("iterations", 0),
            kkt_violation=payload.get("kkt_violation", 0.0),
        )
    except KeyError as e:
        raise SchemaError(f"model JSON missing field {e.args[0]}", field=str(e.args[0]))
    except PydanticValidationError as e:
        raise schema_error_from(e)


def trace_frame(result: GridSearchResult) -> pd.DataFrame:
    """One row per (kernel cell, c_reg): family, params..., c_reg, cv_f1, test_f1, train_f1"""
    keys = sorted({k for cell in result.trace for k in cell.spec.params})
    rows = []
    for cell in result.trace:
        row: Dict[str, Optional[float]] = {"family": cell.spec.family.value}
        for k in keys:
            row[k] = cell.spec.params.get(k)
        row.update({"c_reg": cell.c_reg, "cv_f1": cell.cv_f1, "test_f1": cell.test_f1, "train_f1": cell.train_f1})
        rows.append(row)
    return pd.DataFrame(rows, columns=["family", *keys, "c_reg", "cv_f1", "test_f1", "train_f1"])


def write_frame(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_trace(result: GridSearchResult, path: PathLike) -> Path:
    path = write_frame(trace_frame(result), path)
    logger.info(f"Wrote grid trace ({len(result.trace)} cells) to {path}")
    return path


def write_manifest(manifest: RunManifest, out_dir: PathLike) -> Path:
    return write_json(Path(out_dir) / "manifest.json", manifest.model_dump(mode="json"))
