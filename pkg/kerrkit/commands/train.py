"""
train: fit one SVM on a dataset's training partition and score both partitions
"""

import argparse
from pathlib import Path

import numpy as np
import pandas as pd

from ..integrations import gram_cache, storage
from ..models.schemas import SCHEMA_VERSION, Dataset, GramMatrix, KernelFamily, SplitTag
from ..services import kernels, svm
from ..services.datasets import apply_scaling, scale_for, split
from ..utils.errors import ShapeMismatchError, UsageError
from ..utils.logging import get_logger
from .common import RunContext, parse_size

logger = get_logger(__name__)

# fraction of the feature range added around the data when meshing
MESH_MARGIN = 0.1


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("train", parents=[parent], help="Train and evaluate one SVM")
    parser.add_argument("--data", type=Path, required=True, help="Dataset CSV")
    parser.add_argument("--spec", type=Path, required=True, help="KernelSpec JSON")
    parser.add_argument("--c-reg", type=float, default=1.0, help="Box constraint C")
    parser.add_argument("--gram", type=Path, default=None, help="Reuse a cached Gram (.kgrm)")
    parser.add_argument("--boundary-grid", default=None, metavar="WxH", help="Write the decision function on a mesh")
    parser.set_defaults(handler=handle)


def _load_gram(ctx: RunContext, scaled: Dataset, spec) -> GramMatrix:
    """Unrepaired Gram over all points; repair happens on the training block"""
    if ctx.args.gram is None:
        return kernels.gram(scaled.features, spec, workers=ctx.workers, repair=False)

    values = gram_cache.read_gram(ctx.args.gram)
    if values.shape[0] != scaled.n:
        raise ShapeMismatchError("cached Gram does not match the dataset size", expected=scaled.n, actual=values.shape[0])
    if spec.family == KernelFamily.QEC:
        logger.warning(
            "Cached QEC Gram may already be projected over all points; cache it with gram --no-repair",
            extra={"path": str(ctx.args.gram)},
        )
    return GramMatrix(values=values, spec=spec)


def boundary_mesh(dataset: Dataset, scaled: Dataset, model, train_idx, size) -> pd.DataFrame:
    """Decision values on a W×H mesh over the raw 2-D feature box"""
    if dataset.d != 2:
        raise UsageError(f"--boundary-grid needs 2-D data, dataset has d={dataset.d}")
    width, height = size
    lo, hi = dataset.features.min(axis=0), dataset.features.max(axis=0)
    pad = MESH_MARGIN * (hi - lo)
    xs = np.linspace(lo[0] - pad[0], hi[0] + pad[0], width)
    ys = np.linspace(lo[1] - pad[1], hi[1] + pad[1], height)
    gx, gy = np.meshgrid(xs, ys)
    mesh = np.column_stack([gx.ravel(), gy.ravel()])

    k = kernels.cross_gram(apply_scaling(mesh, scaled.scaling), scaled.features[train_idx], model.spec)
    labels, values = svm.predict(model, k)
    return pd.DataFrame({"x0": mesh[:, 0], "x1": mesh[:, 1], "decision": values, "label": labels})


def handle(ctx: RunContext) -> int:
    args = ctx.args
    dataset = storage.read_dataset(args.data)
    spec = storage.read_spec(args.spec)
    size = parse_size(args.boundary_grid) if args.boundary_grid else None

    scaled = scale_for(dataset, spec)
    plan = split(dataset, seed=ctx.seed)
    train, test = np.asarray(plan.train_idx), np.asarray(plan.test_idx)
    gram = _load_gram(ctx, scaled, spec)
    k_train, k_test = kernels.fit_blocks(gram, train, test)

    model = svm.train_svm(
        k_train.values, dataset.labels[train], args.c_reg,
        seed=ctx.seed, spec=spec, train_ref=dataset.fingerprint, assume_psd=True,
    )
    train_report = svm.evaluate(model, k_train.values, dataset.labels[train], SplitTag.TRAIN)
    test_report = svm.evaluate(model, k_test, dataset.labels[test], SplitTag.TEST)
    logger.info(f"Trained {spec.label()}: test F1 {test_report.f1:.4f}", extra={"status": model.status.value})

    storage.write_model(model, ctx.path("model.json"))
    ctx.record(ctx.path("model.json"))
    ctx.write_json("result.json", {
        "schema_version": SCHEMA_VERSION,
        "dataset": dataset.name,
        "spec": spec.to_json_dict(),
        "c_reg": args.c_reg,
        "f1_test": test_report.f1,
        "f1_train": train_report.f1,
        "accuracy_test": test_report.accuracy,
        "accuracy_train": train_report.accuracy,
        "confusion_test": test_report.confusion,
        "confusion_train": train_report.confusion,
        "solver_status": model.status.value,
        "iterations": model.iterations,
        "n_support": len(model.support_idx),
        "diagonal_shift": k_train.diagonal_shift,
        "clipped_mass": k_train.clipped_mass,
    })

    if size is not None:
        ctx.write_table("boundary", boundary_mesh(dataset, scaled, model, train, size))
    return 0
