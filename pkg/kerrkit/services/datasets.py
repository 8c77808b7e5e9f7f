"""
Dataset generators, feature scaling, amplitude noise and train/test splits

Generators wrap the scikit-learn samplers and then apply a stratified
train/test partition sized by the preset counts. Every function is a pure
function of its arguments and seed.
"""

import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn import datasets as sk_datasets
from sklearn.model_selection import StratifiedKFold, train_test_split

from ..config import get_settings
from ..integrations import breastmnist
from ..models.schemas import (
    Dataset,
    KernelFamily,
    KernelSpec,
    NoisePlan,
    NoiseTarget,
    ScalingMode,
    ScalingRecord,
    SplitPlan,
)
from ..payloads.presets import DATASET_PRESETS
from ..utils.errors import DomainError, SchemaError
from ..utils.logging import get_logger

logger = get_logger(__name__)


def _partition(labels: np.ndarray, n_test: int, seed: int) -> List[int]:
    """Stratified test indices of the requested size"""
    idx = np.arange(labels.shape[0])
    _, test_idx = train_test_split(idx, test_size=n_test, random_state=seed, stratify=labels)
    return sorted(int(i) for i in test_idx)


def _assemble(features, labels, name: str, seed: int, n_train: int, n_test: int) -> Dataset:
    labels = np.asarray(labels, dtype=np.int64)
    return Dataset(
        features=features,
        labels=labels,
        name=name,
        seed=seed,
        n_train=n_train,
        n_test=n_test,
        test_idx=_partition(labels, n_test, seed),
    )


def _check_counts(n_train: int, n_test: int) -> None:
    if n_train <= 0 or n_test <= 0:
        raise DomainError(f"counts must be positive, got {n_train}/{n_test}", parameter="n_train")


def make_moons(n_train: int, n_test: int, noise: float, seed: int, name: str = "moons") -> Dataset:
    """Two interleaving half-circles with isotropic Gaussian noise"""
    _check_counts(n_train, n_test)
    if noise < 0:
        raise DomainError("noise must be non-negative", parameter="noise")
    x, y = sk_datasets.make_moons(n_samples=n_train + n_test, noise=noise or None, random_state=seed)
    return _assemble(x, y, name, seed, n_train, n_test)


def make_circles(
    n_train: int, n_test: int, noise: float, factor: float, seed: int, name: str = "circles"
) -> Dataset:
    """Outer unit circle (label 0) and inner circle of radius factor (label 1)"""
    _check_counts(n_train, n_test)
    if not 0.0 < factor < 1.0:
        raise DomainError(f"factor must lie in (0, 1), got {factor}", parameter="factor")
    if noise < 0:
        raise DomainError("noise must be non-negative", parameter="noise")
    x, y = sk_datasets.make_circles(
        n_samples=n_train + n_test, noise=noise or None, factor=factor, random_state=seed
    )
    return _assemble(x, y, name, seed, n_train, n_test)


def make_hypercube(
    n_train: int,
    n_test: int,
    n_features: int,
    n_informative: int,
    class_sep: float,
    n_flipped: int,
    seed: int,
    name: str = "hypercube",
) -> Dataset:
    """
    Gaussian clusters at hypercube vertices, padded with noise features,
    with exactly n_flipped labels inverted

    Args:
        n_features: Total feature count
        n_informative: Dimension of the vertex hypercube
        class_sep: Vertex spacing
        n_flipped: Number of labels inverted uniformly at random

    Returns:
        Dataset with stratified train/test partition
    """

    _check_counts(n_train, n_test)
    n = n_train + n_test
    if not 0 < n_informative <= n_features:
        raise DomainError("need 0 < n_informative <= n_features", parameter="n_informative")
    if not 0 <= n_flipped < n:
        raise DomainError(f"n_flipped must lie in [0, {n})", parameter="n_flipped")
    # two clusters per class need four distinct vertices
    if 2**n_informative < 4:
        raise DomainError("n_informative too small for two clusters per class", parameter="n_informative")

    x, y = _hypercube_samples(n, n_features, n_informative, class_sep, seed)
    if n_flipped:
        rng = np.random.default_rng(seed)
        flipped = rng.choice(n, size=n_flipped, replace=False)
        y = y.copy()
        y[flipped] = 1 - y[flipped]
        logger.debug(f"flipped {n_flipped} hypercube labels")
    return _assemble(x, y, name, seed, n_train, n_test)


def geometric_hypercube_labels(
    n_train: int, n_test: int, n_features: int, n_informative: int, class_sep: float, seed: int
) -> np.ndarray:
    """Labels before flipping, for flip-count audits"""
    return _hypercube_samples(n_train + n_test, n_features, n_informative, class_sep, seed)[1]


def _hypercube_samples(n: int, n_features: int, n_informative: int, class_sep: float, seed: int):
    """Gaussian clusters on the vertices of a hypercube with side class_sep"""
    # sklearn places vertices at ±class_sep, a side of twice its argument
    return sk_datasets.make_classification(
        n_samples=n,
        n_features=n_features,
        n_informative=n_informative,
        n_redundant=0,
        n_repeated=0,
        n_classes=2,
        class_sep=class_sep / 2.0,
        flip_y=0.0,
        hypercube=True,
        random_state=seed,
    )


def _layer_sizes(total: int, layers: int) -> List[int]:
    base, extra = divmod(total, layers)
    return [base + (1 if k < extra else 0) for k in range(layers)]


def make_disks(
    layer_counts: Sequence[int],
    radii: Sequence[float],
    jitter: float,
    seed: int,
    n_test: Optional[int] = None,
    name: str = "disks",
) -> Dataset:
    """
    Concentric annuli with alternating labels (layer k has label k mod 2)

    Points are uniform in angle with radius radii[k] + jitter·N(0, 1).
    """

    if len(layer_counts) != len(radii) or len(radii) < 2:
        raise DomainError("need matching layer_counts and radii with at least two layers", parameter="radii")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly increasing", parameter="radii")
    if any(c <= 0 for c in layer_counts):
        raise DomainError("layer counts must be positive", parameter="layer_counts")
    if jitter < 0:
        raise DomainError("jitter must be non-negative", parameter="jitter")

    rng = np.random.default_rng(seed)
    points, labels = [], []
    for k, (count, radius) in enumerate(zip(layer_counts, radii)):
        theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
        rho = radius + jitter * rng.standard_normal(count) if jitter else np.full(count, float(radius))
        points.append(np.column_stack([rho * np.cos(theta), rho * np.sin(theta)]))
        labels.append(np.full(count, k % 2))

    x = np.vstack(points)
    y = np.concatenate(labels)
    total = x.shape[0]
    n_test = n_test if n_test is not None else max(1, round(0.15 * total))
    return _assemble(x, y, name, seed, total - n_test, n_test)


def make_preset(name: str, seed: int, **overrides) -> Dataset:
    """Generate a named preset; keyword overrides replace preset values"""
    if name not in DATASET_PRESETS:
        raise DomainError(f"unknown dataset preset '{name}'", parameter="preset")
    cfg = {**DATASET_PRESETS[name], **{k: v for k, v in overrides.items() if v is not None}}
    generator = cfg.pop("generator")
    logger.info(f"Generating dataset {name}", extra={"preset": name, "seed": seed})

    if generator == "moons":
        return make_moons(cfg["n_train"], cfg["n_test"], cfg["noise"], seed, name=name)
    if generator == "circles":
        return make_circles(cfg["n_train"], cfg["n_test"], cfg["noise"], cfg["factor"], seed, name=name)
    if generator == "hypercube":
        return make_hypercube(
            cfg["n_train"], cfg["n_test"], cfg["n_features"], cfg["n_informative"],
            cfg["class_sep"], cfg["n_flipped"], seed, name=name,
        )
    total = cfg["n_train"] + cfg["n_test"]
    counts = _layer_sizes(total, len(cfg["radii"]))
    return make_disks(counts, cfg["radii"], cfg["jitter"], seed, n_test=cfg["n_test"], name=name)


def default_scaling_mode(family: KernelFamily) -> ScalingMode:
    """PhasePeriodic for phase kernels, AmplitudeBox for amplitude kernels, ZScore otherwise"""
    if family.is_phase:
        return ScalingMode.PHASE_PERIODIC
    if family in (KernelFamily.RBF, KernelFamily.ESS):
        return ScalingMode.ZSCORE
    return ScalingMode.AMPLITUDE_BOX


def fit_scaling(
    features: np.ndarray,
    mode: ScalingMode,
    span: Optional[float] = None,
    r_box: Optional[float] = None,
    domain_radius: Optional[float] = None,
) -> ScalingRecord:
    """
    Fit a per-feature affine map scaled = (raw - offset) / scale

    Args:
        features: n×d matrix the map is fitted on
        mode: Scaling mode
        span: Phase range for PhasePeriodic (default settings.phase_span, must be < 2π)
        r_box: Amplitude range for AmplitudeBox (default settings.amplitude_box)
        domain_radius: Optional negative-λ domain bound the box must stay inside

    Returns:
        ScalingRecord
    """

    settings = get_settings()
    x = np.asarray(features, dtype=float)
    d = x.shape[1]

    if mode == ScalingMode.NONE:
        return ScalingRecord(mode=mode, per_feature_offsets=[0.0] * d, per_feature_scales=[1.0] * d)

    if mode == ScalingMode.ZSCORE:
        offsets = x.mean(axis=0)
        scales = x.std(axis=0)
        scales = np.where(scales > 0, scales, 1.0)
        return ScalingRecord(mode=mode, per_feature_offsets=offsets.tolist(), per_feature_scales=scales.tolist())

    if mode == ScalingMode.PHASE_PERIODIC:
        target = settings.phase_span if span is None else span
        if not 0.0 < target < 2.0 * math.pi:
            raise DomainError(f"phase span must lie in (0, 2π), got {target}", parameter="span")
    else:
        target = settings.amplitude_box if r_box is None else r_box
        if domain_radius is not None:
            target = min(target, domain_radius * (1.0 - 1e-9))
        if not target > 0:
            raise DomainError("amplitude box must be positive", parameter="r_box")

    lo = x.min(axis=0)
    width = x.max(axis=0) - lo
    scales = np.where(width > 0, width / target, 1.0)
    return ScalingRecord(mode=mode, per_feature_offsets=lo.tolist(), per_feature_scales=scales.tolist())


def apply_scaling(features: np.ndarray, record: ScalingRecord) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if record.mode == ScalingMode.NONE and not record.per_feature_scales:
        return x.copy()
    return (x - np.asarray(record.per_feature_offsets)) / np.asarray(record.per_feature_scales)


def invert_scaling(features: np.ndarray, record: ScalingRecord) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if record.mode == ScalingMode.NONE and not record.per_feature_scales:
        return x.copy()
    return x * np.asarray(record.per_feature_scales) + np.asarray(record.per_feature_offsets)


def scale_for(dataset: Dataset, spec: KernelSpec, mode: Optional[ScalingMode] = None) -> Dataset:
    """Return the dataset scaled for a kernel family (fitted on all features, labels unused)"""
    mode = mode or default_scaling_mode(spec.family)
    params = spec.kerr_params
    domain_radius = None
    if params is not None and not params.positive and spec.family != KernelFamily.QEC:
        domain_radius = params.domain_radius
    record = fit_scaling(dataset.features, mode, domain_radius=domain_radius)
    return dataset.replace(features=apply_scaling(dataset.features, record), scaling=record)


def add_amplitude_noise(level: float, target: NoiseTarget = NoiseTarget.ENCODING_AMPLITUDE, seed: int = 0) -> NoisePlan:
    """Seeded Gaussian noise plan, consumed by apply_noise"""
    if level < 0:
        raise DomainError(f"noise level must be non-negative, got {level}", parameter="level")
    return NoisePlan(level=level, target=target, seed=seed)


def apply_noise(
    plan: Optional[NoisePlan], features: np.ndarray, spec: KernelSpec
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Perturb a scaled feature matrix according to a noise plan

    Phase families under EncodingAmplitude keep their phases and get
    per-point, per-feature moduli |c + N(0, level)| (clipped into the
    negative-λ domain). All other cases perturb the features themselves.
    Perturbation happens once per point, so the perturbed Gram is still a
    Gram of fixed feature vectors.

    Returns:
        (features, amplitudes) where amplitudes is None unless phase moduli were drawn
    """

    x = np.asarray(features, dtype=float)
    if plan is None or not plan.active:
        return x, None

    rng = np.random.default_rng(plan.seed)
    noise = plan.level * rng.standard_normal(x.shape)

    if spec.family.is_phase and plan.target == NoiseTarget.ENCODING_AMPLITUDE:
        amplitudes = np.abs(spec.params["c"] + noise)
        if spec.family == KernelFamily.KERR_PHASE_NEG:
            params = spec.kerr_params
            amplitudes = np.minimum(amplitudes, params.domain_radius * (1.0 - 1e-9))
        logger.debug(f"drew encoding amplitudes, level={plan.level}")
        return x, amplitudes

    return x + noise, None


def split(
    dataset: Dataset,
    n_test: Optional[int] = None,
    test_fraction: Optional[float] = None,
    k_folds: Optional[int] = None,
    stratified: bool = True,
    seed: Optional[int] = None,
) -> SplitPlan:
    """
    Train/test partition plus optional k-fold CV over the training part

    The dataset's own test indices are used unless a size is requested.
    """

    seed = dataset.seed if seed is None else seed
    n = dataset.n
    idx = np.arange(n)

    if n_test is None and test_fraction is None and dataset.test_idx is not None:
        test_idx = list(dataset.test_idx)
    else:
        if n_test is None:
            fraction = 0.25 if test_fraction is None else test_fraction
            n_test = int(round(fraction * n))
        if not 0 < n_test < n:
            raise DomainError(f"infeasible test size {n_test} for n={n}", parameter="n_test")
        _, test = train_test_split(
            idx, test_size=n_test, random_state=seed, stratify=dataset.labels if stratified else None
        )
        test_idx = sorted(int(i) for i in test)

    test_set = set(test_idx)
    train_idx = [int(i) for i in idx if i not in test_set]

    folds = None
    if k_folds:
        train_labels = dataset.labels[train_idx]
        if k_folds < 2 or np.min(np.bincount(train_labels, minlength=2)) < k_folds:
            raise DomainError(f"cannot build {k_folds} stratified folds", parameter="k_folds")
        splitter = StratifiedKFold(n_splits=k_folds, shuffle=True, random_state=seed)
        train_arr = np.asarray(train_idx)
        folds = [
            (train_arr[fit].tolist(), train_arr[val].tolist())
            for fit, val in splitter.split(train_arr, train_labels)
        ]

    return SplitPlan(train_idx=train_idx, test_idx=test_idx, cv_folds=folds, stratified=stratified, seed=seed)


def load_breastmnist(path=None) -> Dataset:
    """BreastMNIST archive as a flattened [0, 1] dataset with its own partition"""
    return breastmnist.load_archive(path)


def fetch_breastmnist(dest=None) -> Path:
    return breastmnist.fetch_archive(dest)


def dataset_summary(dataset: Dataset) -> Dict[str, object]:
    counts = np.bincount(dataset.labels, minlength=2)
    return {
        "name": dataset.name,
        "n": dataset.n,
        "d": dataset.d,
        "n_train": dataset.n_train,
        "n_test": dataset.n_test,
        "class_counts": counts.tolist(),
        "fingerprint": dataset.fingerprint,
    }


def require_labels(columns: Sequence[str]) -> None:
    if "label" not in columns:
        raise SchemaError("dataset CSV has no 'label' column", field="label")
