"""
Pydantic models for data structures used throughout the library
"""

import hashlib
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..utils.errors import DomainError, SchemaError

SCHEMA_VERSION = "1.0"
TWO_PI = 2.0 * math.pi


def _frozen_array(value: Any, dtype) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _two_j(j: float) -> int:
    two_j = int(round(2.0 * float(j)))
    if two_j <= 0 or abs(2.0 * float(j) - two_j) > 1e-9:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    return two_j


def schema_error_from(exc: PydanticValidationError, prefix: str = "") -> SchemaError:
    """Convert a pydantic ValidationError into a SchemaError naming the first offending field"""
    first = exc.errors()[0]
    field = ".".join(str(p) for p in first["loc"]) or prefix or "<root>"
    if prefix and not field.startswith(prefix):
        field = f"{prefix}.{field}"
    return SchemaError(f"Invalid field '{field}': {first['msg']}", field=field)


class KernelFamily(str, Enum):
    """Kernel family enumeration"""
    KERR_PHASE_POS = "KerrPhasePos"
    KERR_PHASE_NEG = "KerrPhaseNeg"
    KERR_AMP_POS = "KerrAmpPos"
    KERR_AMP_NEG = "KerrAmpNeg"
    SQUEEZED_PHASE = "SqueezedPhase"
    SQUEEZED_AMP = "SqueezedAmp"
    RBF = "RBF"
    ESS = "ESS"
    QEC = "QEC"

    @property
    def is_phase(self) -> bool:
        return self in PHASE_FAMILIES

    @property
    def is_complex(self) -> bool:
        return self in PHASE_FAMILIES

    @property
    def uses_kerr_params(self) -> bool:
        return self in KERR_FAMILIES


PHASE_FAMILIES = frozenset({
    KernelFamily.KERR_PHASE_POS, KernelFamily.KERR_PHASE_NEG, KernelFamily.SQUEEZED_PHASE,
})
KERR_FAMILIES = frozenset({
    KernelFamily.KERR_PHASE_POS, KernelFamily.KERR_PHASE_NEG,
    KernelFamily.KERR_AMP_POS, KernelFamily.KERR_AMP_NEG, KernelFamily.QEC,
})
POSITIVE_LAMBDA_FAMILIES = frozenset({KernelFamily.KERR_PHASE_POS, KernelFamily.KERR_AMP_POS})

REQUIRED_PARAMS: Dict[KernelFamily, Tuple[str, ...]] = {
    KernelFamily.KERR_PHASE_POS: ("c", "lambda", "j"),
    KernelFamily.KERR_PHASE_NEG: ("c", "lambda", "j"),
    KernelFamily.KERR_AMP_POS: ("lambda", "j"),
    KernelFamily.KERR_AMP_NEG: ("lambda", "j"),
    KernelFamily.SQUEEZED_PHASE: ("c",),
    KernelFamily.SQUEEZED_AMP: (),
    KernelFamily.RBF: ("sigma",),
    KernelFamily.ESS: ("l", "p"),
    KernelFamily.QEC: ("l", "lambda", "j"),
}


class Realify(str, Enum):
    """How a complex overlap becomes a real kernel value"""
    SQUARED_MODULUS = "SquaredModulus"
    REAL_PART = "RealPart"


class Compose(str, Enum):
    """How per-feature kernels are combined"""
    PRODUCT = "Product"
    SUM_THEN_REALIFY = "SumThenRealify"


class ScalingMode(str, Enum):
    """Feature scaling enumeration"""
    PHASE_PERIODIC = "PhasePeriodic"
    AMPLITUDE_BOX = "AmplitudeBox"
    ZSCORE = "ZScore"
    NONE = "None"


class SplitTag(str, Enum):
    """Which partition an evaluation refers to"""
    TRAIN = "Train"
    TEST = "Test"
    CROSS_VAL = "CrossVal"


class Scenario(str, Enum):
    """Grid-search objective"""
    TEST_DRIVEN = "TestDriven"
    CROSS_VAL_DRIVEN = "CrossValDriven"


class NoiseTarget(str, Enum):
    """Where amplitude noise is injected"""
    ENCODING_AMPLITUDE = "EncodingAmplitude"
    RAW_FEATURES = "RawFeatures"


class SolverStatus(str, Enum):
    """SMO termination status"""
    CONVERGED = "converged"
    NOT_CONVERGED = "not_converged"


class KerrParams(BaseModel):
    """Kerr parameter λ and the half-integer index j (stored exactly as 2j)"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    two_j: int = Field(gt=0)

    @model_validator(mode="before")
    @classmethod
    def _accept_j(cls, data: Any) -> Any:
        if isinstance(data, dict) and "j" in data and "two_j" not in data:
            data = dict(data)
            data["two_j"] = _two_j(data.pop("j"))
        return data

    @field_validator("lam")
    @classmethod
    def _nonzero(cls, v: float) -> float:
        if not math.isfinite(v) or v == 0.0:
            raise ValueError("lambda must be finite and nonzero")
        return float(v)

    @classmethod
    def of(cls, lam: float, j: float) -> "KerrParams":
        """Build from (λ, j), raising DomainError on invalid input"""
        try:
            return cls(lam=lam, two_j=_two_j(j))
        except (ValueError, PydanticValidationError) as e:
            raise DomainError(f"Invalid Kerr parameters (lambda={lam}, j={j}): {e}", parameter="j")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def positive(self) -> bool:
        return self.lam > 0

    @property
    def scale(self) -> float:
        """√(|λ|/2), the factor multiplying |α| in every closed form"""
        return math.sqrt(abs(self.lam) / 2.0)

    @property
    def domain_radius(self) -> float:
        """Largest admissible modulus for a negative-λ state (exclusive)"""
        return math.pi / (2.0 * self.scale) if not self.positive else math.inf

    def in_domain(self, r: float) -> bool:
        return self.positive or self.scale * r < math.pi / 2.0

    def to_dict(self) -> Dict[str, float]:
        return {"lambda": self.lam, "j": self.j}


class PolarAmplitude(BaseModel):
    """Coherent-state label α = r·e^{iφ} with φ stored in [0, 2π)"""

    model_config = ConfigDict(frozen=True)

    r: float = Field(ge=0.0)
    phi: float = 0.0

    @field_validator("phi")
    @classmethod
    def _wrap_phase(cls, v: float) -> float:
        wrapped = math.fmod(float(v), TWO_PI)
        if wrapped < 0:
            wrapped += TWO_PI
        return 0.0 if wrapped >= TWO_PI else wrapped

    @classmethod
    def from_complex(cls, alpha: complex) -> "PolarAmplitude":
        return cls(r=abs(alpha), phi=math.atan2(alpha.imag, alpha.real))

    @property
    def value(self) -> complex:
        return complex(self.r * math.cos(self.phi), self.r * math.sin(self.phi))

    def conjugate(self) -> "PolarAmplitude":
        return PolarAmplitude(r=self.r, phi=-self.phi)


class StateVector(BaseModel):
    """Fock-basis amplitudes plus a bound on the discarded probability"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray
    truncation_tail: float = Field(default=0.0, ge=0.0)

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _as_complex(cls, v: Any) -> np.ndarray:
        arr = _frozen_array(v, np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("amplitudes must be a non-empty vector")
        return arr

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def padded(self, dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=np.complex128)
        out[: self.dim] = self.amplitudes[:dim]
        return out


class LadderOps(BaseModel):
    """Deformed annihilation/creation operators and K₀ in a truncated Fock basis"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a_op: np.ndarray
    a_dag: np.ndarray
    k0: np.ndarray
    params: KerrParams

    @field_validator("a_op", "a_dag", "k0", mode="before")
    @classmethod
    def _as_matrix(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, np.complex128)

    @property
    def dim(self) -> int:
        return int(self.a_op.shape[0])


class KernelSpec(BaseModel):
    """Tagged description of one kernel family, its hyperparameters and realification"""

    model_config = ConfigDict(frozen=True)

    family: KernelFamily
    params: Dict[str, float] = Field(default_factory=dict)
    realify: Realify = Realify.SQUARED_MODULUS
    compose: Compose = Compose.PRODUCT
    normalize_diagonal: bool = False

    @model_validator(mode="after")
    def _check_params(self) -> "KernelSpec":
        required = REQUIRED_PARAMS[self.family]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ValueError(f"params missing {missing} for family {self.family.value}")
        for key in ("c", "sigma", "l", "p", "j"):
            if key in self.params and not self.params[key] > 0:
                raise ValueError(f"params.{key} must be positive")
        if "j" in self.params:
            _two_j(self.params["j"])
        if "lambda" in self.params:
            lam = self.params["lambda"]
            if lam == 0:
                raise ValueError("params.lambda must be nonzero")
            if self.family in POSITIVE_LAMBDA_FAMILIES and lam < 0:
                raise ValueError(f"{self.family.value} requires lambda > 0")
            if self.family in KERR_FAMILIES and self.family not in POSITIVE_LAMBDA_FAMILIES and lam > 0:
                raise ValueError(f"{self.family.value} requires lambda < 0")
        if self.normalize_diagonal and self.family != KernelFamily.QEC:
            raise ValueError("normalize_diagonal only applies to QEC")
        return self

    @classmethod
    def parse(cls, payload: Dict[str, Any]) -> "KernelSpec":
        """Validate a JSON object, raising SchemaError naming the offending field"""
        try:
            return cls.model_validate(payload)
        except PydanticValidationError as e:
            raise schema_error_from(e)

    @property
    def kerr_params(self) -> Optional[KerrParams]:
        if "lambda" not in self.params:
            return None
        return KerrParams.of(self.params["lambda"], self.params["j"])

    def with_params(self, **params: float) -> "KernelSpec":
        return KernelSpec(
            family=self.family,
            params={**self.params, **params},
            realify=self.realify,
            compose=self.compose,
            normalize_diagonal=self.normalize_diagonal,
        )

    def to_json_dict(self) -> Dict[str, Any]:
        data = {
            "family": self.family.value,
            "params": dict(self.params),
            "realify": self.realify.value,
            "compose": self.compose.value,
        }
        if self.normalize_diagonal:
            data["normalize_diagonal"] = True
        return data

    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family.value}({inner})"


class GramMatrix(BaseModel):
    """Realified kernel matrix with its audit trail"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    spec: KernelSpec
    min_eigenvalue: Optional[float] = None
    diagonal_shift: float = 0.0
    clipped_mass: float = 0.0

    @field_validator("values", mode="before")
    @classmethod
    def _as_real(cls, v: Any) -> np.ndarray:
        arr = _frozen_array(v, np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("Gram values must be a square matrix")
        return arr

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def subset(self, rows, cols=None) -> np.ndarray:
        rows = np.asarray(rows, dtype=int)
        cols = rows if cols is None else np.asarray(cols, dtype=int)
        return self.values[np.ix_(rows, cols)]


class ScalingRecord(BaseModel):
    """Affine per-feature map: scaled = (raw - offset) / scale"""

    model_config = ConfigDict(frozen=True)

    mode: ScalingMode = ScalingMode.NONE
    per_feature_offsets: List[float] = Field(default_factory=list)
    per_feature_scales: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "ScalingRecord":
        if len(self.per_feature_offsets) != len(self.per_feature_scales):
            raise ValueError("offsets and scales must have the same length")
        if any(not s > 0 for s in self.per_feature_scales):
            raise ValueError("per_feature_scales must be positive")
        return self


class Dataset(BaseModel):
    """Binary-labelled feature matrix with split hints and scaling record"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    features: np.ndarray
    labels: np.ndarray
    name: str
    seed: int = Field(default=0, ge=0)
    scaling: ScalingRecord = Field(default_factory=ScalingRecord)
    n_train: Optional[int] = None
    n_test: Optional[int] = None
    test_idx: Optional[List[int]] = None

    @field_validator("features", mode="before")
    @classmethod
    def _features(cls, v: Any) -> np.ndarray:
        arr = _frozen_array(v, np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("features must be a non-empty n×d matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("features contain non-finite values")
        return arr

    @field_validator("labels", mode="before")
    @classmethod
    def _labels(cls, v: Any) -> np.ndarray:
        arr = _frozen_array(v, np.int64)
        if arr.ndim != 1:
            raise ValueError("labels must be a vector")
        if not set(np.unique(arr).tolist()) <= {0, 1}:
            raise ValueError("labels must be in {0, 1}")
        return arr

    @model_validator(mode="after")
    def _check(self) -> "Dataset":
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels disagree on n")
        if len(np.unique(self.labels)) < 2:
            raise ValueError("both classes must be present")
        return self

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()[:16]

    def replace(self, **changes: Any) -> "Dataset":
        data = {
            "features": self.features, "labels": self.labels, "name": self.name,
            "seed": self.seed, "scaling": self.scaling, "n_train": self.n_train,
            "n_test": self.n_test, "test_idx": self.test_idx,
        }
        data.update(changes)
        return Dataset(**data)


class SplitPlan(BaseModel):
    """Train/test partition plus optional CV folds over the training part"""

    model_config = ConfigDict(frozen=True)

    train_idx: List[int]
    test_idx: List[int]
    cv_folds: Optional[List[Tuple[List[int], List[int]]]] = None
    stratified: bool = True
    seed: int = 0

    @model_validator(mode="after")
    def _disjoint(self) -> "SplitPlan":
        if set(self.train_idx) & set(self.test_idx):
            raise ValueError("train and test indices overlap")
        for k, (fit, val) in enumerate(self.cv_folds or []):
            if set(fit) & set(val):
                raise ValueError(f"fold {k} train/validate overlap")
        return self


class NoisePlan(BaseModel):
    """Seeded Gaussian perturbation of encoding amplitudes or raw features"""

    model_config = ConfigDict(frozen=True)

    level: float = Field(ge=0.0)
    target: NoiseTarget = NoiseTarget.ENCODING_AMPLITUDE
    seed: int = Field(default=0, ge=0)

    @property
    def active(self) -> bool:
        return self.level > 0.0


class SvmModel(BaseModel):
    """Trained soft-margin SVM in dual form"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dual_coefs: np.ndarray
    bias: float
    support_idx: List[int]
    c_reg: float = Field(gt=0.0)
    spec: Optional[KernelSpec] = None
    train_ref: str = ""
    status: SolverStatus = SolverStatus.CONVERGED
    iterations: int = 0
    kkt_violation: float = 0.0

    @field_validator("dual_coefs", mode="before")
    @classmethod
    def _coefs(cls, v: Any) -> np.ndarray:
        return _frozen_array(v, np.float64)

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coefs)

    @property
    def converged(self) -> bool:
        return self.status == SolverStatus.CONVERGED

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "dual_coefs": self.dual_coefs.tolist(),
            "bias": self.bias,
            "support_idx": list(self.support_idx),
            "c_reg": self.c_reg,
            "spec": self.spec.to_json_dict() if self.spec else None,
            "train_ref": self.train_ref,
            "status": self.status.value,
            "iterations": self.iterations,
            "kkt_violation": self.kkt_violation,
        }


class EvalReport(BaseModel):
    """F1 / accuracy with the confusion matrix [[TN, FP], [FN, TP]]"""

    model_config = ConfigDict(frozen=True)

    f1: float = Field(ge=0.0, le=1.0)
    accuracy: float = Field(ge=0.0, le=1.0)
    confusion: List[List[int]]
    split_tag: SplitTag

    @model_validator(mode="after")
    def _consistent(self) -> "EvalReport":
        (tn, fp), (fn, tp) = self.confusion
        total = tn + fp + fn + tp
        if total <= 0:
            raise ValueError("confusion matrix is empty")
        if abs(self.accuracy - (tp + tn) / total) > 1e-12:
            raise ValueError("accuracy inconsistent with confusion")
        denom = 2 * tp + fp + fn
        expected_f1 = 2 * tp / denom if denom else 0.0
        if abs(self.f1 - expected_f1) > 1e-12:
            raise ValueError("f1 inconsistent with confusion")
        return self

    @property
    def size(self) -> int:
        return int(sum(sum(row) for row in self.confusion))


class GridCell(BaseModel):
    """One evaluated (kernel, c_reg) cell of a grid search"""

    model_config = ConfigDict(frozen=True)

    spec: KernelSpec
    c_reg: float
    cv_f1: Optional[float] = None
    test_f1: float
    train_f1: float

    def objective(self, scenario: Scenario) -> float:
        if scenario == Scenario.CROSS_VAL_DRIVEN:
            return self.cv_f1 if self.cv_f1 is not None else 0.0
        return self.test_f1


class GridSearchResult(BaseModel):
    """Best cell, its reports and the full trace"""

    model_config = ConfigDict(frozen=True)

    schema_version: str = SCHEMA_VERSION
    dataset: str
    best_spec: KernelSpec
    best_c_reg: float
    scenario: Scenario
    scores: Dict[str, EvalReport]
    trace: List[GridCell]
    skipped: List[Dict[str, Any]] = Field(default_factory=list)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "dataset": self.dataset,
            "best_spec": self.best_spec.to_json_dict(),
            "best_c_reg": self.best_c_reg,
            "scenario": self.scenario.value,
            "scores": {k: v.model_dump(mode="json") for k, v in self.scores.items()},
            "trace": [
                {
                    "spec": cell.spec.to_json_dict(),
                    "c_reg": cell.c_reg,
                    "cv_f1": cell.cv_f1,
                    "test_f1": cell.test_f1,
                    "train_f1": cell.train_f1,
                }
                for cell in self.trace
            ],
            "skipped": self.skipped,
        }


class MetricAtPoint(BaseModel):
    """Fubini–Study metric components in (r, φ) coordinates"""

    model_config = ConfigDict(frozen=True)

    g_rr: float
    g_phiphi: float
    g_rphi: float = 0.0
    point: PolarAmplitude
    params: KerrParams

    @model_validator(mode="after")
    def _signature(self) -> "MetricAtPoint":
        if not self.g_rr > 0:
            raise ValueError("g_rr must be positive")
        if self.g_phiphi < -1e-9:
            raise ValueError("g_phiphi must be nonnegative")
        return self


class QuadratureConfig(BaseModel):
    """Node counts and truncation for the invariant-measure integrals"""

    model_config = ConfigDict(frozen=True)

    radial_nodes: int = Field(default=64, ge=8)
    angular_nodes: int = Field(default=64, ge=8)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    projector_count: int = Field(default=8, ge=1)

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(
            radial_nodes=2 * self.radial_nodes,
            angular_nodes=2 * self.angular_nodes,
            r_max=self.r_max,
            projector_count=self.projector_count,
        )


class LatticeConfig(BaseModel):
    """Glauber–Fock waveguide array"""

    model_config = ConfigDict(frozen=True)

    params: KerrParams
    n_guides: int = Field(ge=2)
    c1: float = Field(default=1.0, gt=0.0)
    d0: float = 10.0
    kappa: float = Field(default=1.0, gt=0.0)
    z_grid: List[float]

    @field_validator("z_grid")
    @classmethod
    def _increasing(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("z_grid must not be empty")
        if v[0] < 0 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("z_grid must be increasing and nonnegative")
        return [float(z) for z in v]

    @model_validator(mode="after")
    def _guides(self) -> "LatticeConfig":
        if not self.params.positive and self.n_guides != self.params.two_j + 1:
            raise ValueError(f"negative-lambda lattice needs exactly 2j+1 = {self.params.two_j + 1} guides")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "n_guides": self.n_guides,
            "c1": self.c1,
            "d0": self.d0,
            "kappa": self.kappa,
            "z_grid": list(self.z_grid),
        }


class CheckResult(BaseModel):
    """One line of a verification report"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    check: str
    params: Dict[str, Any] = Field(default_factory=dict)
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool = Field(alias="pass")
    note: Optional[str] = None

    def to_json_dict(self) -> Dict[str, Any]:
        data = {
            "check": self.check,
            "params": self.params,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.note:
            data["note"] = self.note
        return data


class RunManifest(BaseModel):
    """Everything needed to reproduce a CLI run"""

    schema_version: str = SCHEMA_VERSION
    command: str
    arguments: Dict[str, Any]
    settings: Dict[str, Any]
    library_version: str
    seeds: Dict[str, int]
    outputs: List[str] = Field(default_factory=list)
