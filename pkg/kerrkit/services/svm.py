"""
Soft-margin SVM on precomputed Gram matrices

The dual  min ½αᵀQα - eᵀα  s.t.  yᵀα = 0, 0 ≤ α ≤ C  with Q_ik = y_i y_k K_ik
is solved by SMO with maximal-violating-pair selection. Labels are {0, 1}
externally and {-1, +1} internally (0 ↦ -1).
"""

from typing import Optional, Tuple, Union

import numpy as np
from cvxopt import matrix, solvers
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from ..config import get_settings
from ..models.schemas import EvalReport, GramMatrix, KernelSpec, SolverStatus, SplitTag, SvmModel
from ..utils.errors import DomainError, ShapeMismatchError, SizeGuardError
from ..utils.logging import get_logger
from .kernels import psd_floor

logger = get_logger(__name__)

BRUTE_FORCE_LIMIT = 16

# handed to each solvers.qp call, never written to solvers.options
QP_OPTIONS = {"show_progress": False, "abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12}
_TAU = 1e-12
_BOUND_EPS = 1e-12

GramLike = Union[GramMatrix, np.ndarray]


def signed_labels(labels) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if not set(np.unique(labels).tolist()) <= {0, 1}:
        raise DomainError("labels must be in {0, 1}", parameter="labels")
    return 2.0 * labels - 1.0


def _values(gram: GramLike) -> np.ndarray:
    return gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)


def _prepare_gram(gram: GramLike, n_labels: int, assume_psd: bool) -> Tuple[np.ndarray, float]:
    """Validate a training Gram and shift a slightly indefinite diagonal"""
    k = _values(gram)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ShapeMismatchError("gram must be square", expected="n×n", actual=k.shape)
    if k.shape[0] != n_labels:
        raise ShapeMismatchError("gram and labels disagree on n", expected=n_labels, actual=k.shape[0])
    if not np.allclose(k, k.T, rtol=0.0, atol=1e-12):
        raise DomainError("gram matrix is not symmetric", parameter="gram")
    if assume_psd:
        return k, 0.0

    lowest = float(np.linalg.eigvalsh(k)[0])
    if lowest >= 0.0:
        return k, 0.0
    if lowest < -psd_floor(k.shape[0]):
        raise DomainError(
            f"gram is indefinite (min eigenvalue {lowest:.3g}); repair it before training", parameter="gram"
        )
    logger.warning("Shifting slightly indefinite Gram before training", extra={"shift": -lowest})
    return k + (-lowest) * np.eye(k.shape[0]), -lowest


def _violating_bounds(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, c_reg: float):
    """(i, m, j, M) of the maximal violating pair"""
    score = -y * grad
    up = ((y > 0) & (alpha < c_reg)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c_reg))

    up_scores = np.where(up, score, -np.inf)
    low_scores = np.where(low, score, np.inf)
    i = int(np.argmax(up_scores))
    j = int(np.argmin(low_scores))
    return i, float(up_scores[i]), j, float(low_scores[j]), up, low


def _bias(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, c_reg: float, m: float, big_m: float) -> float:
    free = (alpha > _BOUND_EPS * c_reg) & (alpha < c_reg * (1.0 - _BOUND_EPS))
    if np.any(free):
        return float(np.mean(-y[free] * grad[free]))
    return 0.5 * (m + big_m)


def _finish(alpha, y, bias, c_reg, spec, train_ref, status, iterations, violation) -> SvmModel:
    alpha = np.clip(alpha, 0.0, c_reg)
    support = np.flatnonzero(alpha > _BOUND_EPS * c_reg)
    coefs = np.where(alpha > _BOUND_EPS * c_reg, alpha * y, 0.0)
    return SvmModel(
        dual_coefs=coefs,
        bias=bias,
        support_idx=support.tolist(),
        c_reg=c_reg,
        spec=spec,
        train_ref=train_ref,
        status=status,
        iterations=iterations,
        kkt_violation=max(0.0, violation),
    )


def train_svm(
    gram: GramLike,
    labels,
    c_reg: float,
    tol: Optional[float] = None,
    max_passes: Optional[int] = None,
    seed: int = 0,
    spec: Optional[KernelSpec] = None,
    train_ref: str = "",
    assume_psd: bool = False,
) -> SvmModel:
    """
    Solve the soft-margin dual by sequential minimal optimization

    Args:
        gram: Training Gram (n×n, symmetric)
        labels: {0, 1} labels
        c_reg: Box constraint
        tol: Stop when the maximal KKT violation m - M drops below tol
        max_passes: Iteration cap; reaching it yields status not_converged
        seed: Seed for the random second choice on degenerate curvature
        assume_psd: Skip the eigenvalue check (caller already repaired the Gram)

    Returns:
        SvmModel carrying the final iterate
    """

    settings = get_settings()
    tol = settings.smo_tol if tol is None else tol
    max_passes = settings.smo_max_passes if max_passes is None else max_passes
    if not c_reg > 0:
        raise DomainError(f"c_reg must be positive, got {c_reg}", parameter="c_reg")

    y = signed_labels(labels)
    k, _ = _prepare_gram(gram, y.shape[0], assume_psd)
    if len(np.unique(y)) < 2:
        raise DomainError("training labels must contain both classes", parameter="labels")

    rng = np.random.default_rng(seed)
    n = y.shape[0]
    diag = np.diag(k)
    alpha = np.zeros(n)
    grad = -np.ones(n)

    status = SolverStatus.NOT_CONVERGED
    iterations = 0
    m = big_m = 0.0
    while iterations < max_passes:
        i, m, j, big_m, _, low = _violating_bounds(alpha, y, grad, c_reg)
        if m - big_m < tol:
            status = SolverStatus.CONVERGED
            break

        curvature = diag[i] + diag[j] - 2.0 * k[i, j]
        if curvature <= _TAU:
            candidates = np.flatnonzero(low & (-y * grad < m) & (diag[i] + diag - 2.0 * k[i] > _TAU))
            if candidates.size:
                j = int(rng.choice(candidates))
                big_m = float(-y[j] * grad[j])
                curvature = diag[i] + diag[j] - 2.0 * k[i, j]
            else:
                curvature = _TAU

        step = (m - big_m) / curvature
        room_i = c_reg - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else c_reg - alpha[j]
        step = min(step, room_i, room_j)

        old_i, old_j = alpha[i], alpha[j]
        alpha[i] = min(max(old_i + y[i] * step, 0.0), c_reg)
        alpha[j] = min(max(old_j - y[j] * step, 0.0), c_reg)
        delta_i = alpha[i] - old_i
        delta_j = alpha[j] - old_j
        grad += y * (k[:, i] * y[i] * delta_i + k[:, j] * y[j] * delta_j)
        iterations += 1

    if status == SolverStatus.NOT_CONVERGED:
        logger.warning(
            "SMO did not converge",
            extra={"iterations": iterations, "kkt_violation": m - big_m, "c_reg": c_reg},
        )
    else:
        logger.debug(f"SMO converged in {iterations} iterations")

    bias = _bias(alpha, y, grad, c_reg, m, big_m)
    return _finish(alpha, y, bias, c_reg, spec, train_ref, status, iterations, m - big_m)


def _dual_value(alpha: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(alpha) - 0.5 * alpha @ q @ alpha)


def _polish(alpha: np.ndarray, q: np.ndarray, y: np.ndarray, c_reg: float, tol: float) -> Tuple[np.ndarray, Optional[float]]:
    """Re-solve the equality-constrained KKT system on the free set of an interior-point solution"""
    lower = alpha <= tol * c_reg
    upper = alpha >= c_reg * (1.0 - tol)
    free = ~(lower | upper)
    if not np.any(free):
        return alpha, None

    fixed = np.where(upper, c_reg, 0.0)
    f_idx = np.flatnonzero(free)
    b_idx = np.flatnonzero(~free)
    size = f_idx.size

    system = np.zeros((size + 1, size + 1))
    system[:size, :size] = q[np.ix_(f_idx, f_idx)]
    system[:size, size] = y[f_idx]
    system[size, :size] = y[f_idx]
    rhs = np.empty(size + 1)
    rhs[:size] = 1.0 - q[np.ix_(f_idx, b_idx)] @ fixed[b_idx]
    rhs[size] = -y[b_idx] @ fixed[b_idx]

    solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    polished = fixed.copy()
    polished[f_idx] = solution[:size]
    if np.any(polished < -1e-9) or np.any(polished > c_reg + 1e-9):
        return alpha, None
    return np.clip(polished, 0.0, c_reg), float(solution[size])


def brute_force_qp(gram: GramLike, labels, c_reg: float, spec: Optional[KernelSpec] = None) -> SvmModel:
    """
    Reference dual solution by interior-point QP plus active-set polishing

    Only for small problems (n ≤ 16); used as the SMO oracle.
    """

    y = signed_labels(labels)
    n = y.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise SizeGuardError(f"brute_force_qp limited to n <= {BRUTE_FORCE_LIMIT}", size=n, limit=BRUTE_FORCE_LIMIT)
    if not c_reg > 0:
        raise DomainError(f"c_reg must be positive, got {c_reg}", parameter="c_reg")
    k, _ = _prepare_gram(gram, n, assume_psd=False)
    q = np.outer(y, y) * k

    result = solvers.qp(
        matrix(q),
        matrix(-np.ones(n)),
        matrix(np.vstack([-np.eye(n), np.eye(n)])),
        matrix(np.concatenate([np.zeros(n), np.full(n, c_reg)])),
        matrix(y.reshape(1, -1)),
        matrix(0.0),
        options=QP_OPTIONS,
    )
    alpha = np.clip(np.asarray(result["x"]).ravel(), 0.0, c_reg)

    bias = None
    for eps in (1e-6, 1e-4):
        polished, nu = _polish(alpha, q, y, c_reg, eps)
        if nu is not None and _dual_value(polished, q) >= _dual_value(alpha, q) - 1e-12:
            alpha, bias = polished, nu
            break

    grad = q @ alpha - 1.0
    _, m, _, big_m, _, _ = _violating_bounds(alpha, y, grad, c_reg)
    if bias is None:
        bias = _bias(alpha, y, grad, c_reg, m, big_m)
    return _finish(alpha, y, bias, c_reg, spec, "", SolverStatus.CONVERGED, 0, m - big_m)


def decision_function(model: SvmModel, cross_gram) -> np.ndarray:
    """Σ α_i y_i K(x, x_i) + b for each row of an m×n cross Gram"""
    k = np.atleast_2d(np.asarray(cross_gram, dtype=float))
    if k.shape[1] != model.dual_coefs.shape[0]:
        raise ShapeMismatchError(
            "cross gram columns must equal the training size",
            expected=model.dual_coefs.shape[0],
            actual=k.shape[1],
        )
    support = np.asarray(model.support_idx, dtype=int)
    return k[:, support] @ model.dual_coefs[support] + model.bias


def predict(model: SvmModel, cross_gram) -> Tuple[np.ndarray, np.ndarray]:
    """(labels in {0, 1}, decision values)"""
    values = decision_function(model, cross_gram)
    return (values > 0).astype(np.int64), values


def confusion(labels_true, labels_pred) -> np.ndarray:
    """[[TN, FP], [FN, TP]]"""
    return sk_confusion_matrix(labels_true, labels_pred, labels=[0, 1])


def f1_score(confusion_matrix) -> float:
    (tn, fp), (fn, tp) = np.asarray(confusion_matrix).tolist()
    denom = 2 * tp + fp + fn
    if denom == 0:
        logger.warning("F1 undefined without positive labels or predictions; reporting 0")
        return 0.0
    return 2 * tp / denom


def accuracy(confusion_matrix) -> float:
    (tn, fp), (fn, tp) = np.asarray(confusion_matrix).tolist()
    return (tp + tn) / (tn + fp + fn + tp)


def report(labels_true, labels_pred, split_tag: SplitTag) -> EvalReport:
    cm = confusion(labels_true, labels_pred)
    return EvalReport(f1=f1_score(cm), accuracy=accuracy(cm), confusion=cm.tolist(), split_tag=split_tag)


def evaluate(model: SvmModel, cross_gram, labels, split_tag: SplitTag) -> EvalReport:
    predicted, _ = predict(model, cross_gram)
    return report(labels, predicted, split_tag)


def dual_objective(model: SvmModel, gram: GramLike, labels) -> float:
    """eᵀα - ½αᵀQα (to be maximized)"""
    signed_labels(labels)
    k = _values(gram)
    alpha = model.alphas
    w = model.dual_coefs
    return float(np.sum(alpha) - 0.5 * w @ k @ w)


def primal_objective(model: SvmModel, gram: GramLike, labels) -> float:
    """½‖w‖² + C·Σ hinge(y_i f(x_i)) from the reconstructed decision function"""
    y = signed_labels(labels)
    k = _values(gram)
    w = model.dual_coefs
    f = k @ w + model.bias
    hinge = np.maximum(0.0, 1.0 - y * f)
    return float(0.5 * w @ k @ w + model.c_reg * np.sum(hinge))


def kkt_violation(model: SvmModel, gram: GramLike, labels) -> float:
    """Maximal violating-pair gap m - M (0 at optimality)"""
    y = signed_labels(labels)
    k = _values(gram)
    grad = y * (k @ model.dual_coefs) - 1.0
    _, m, _, big_m, _, _ = _violating_bounds(model.alphas, y, grad, model.c_reg)
    return max(0.0, m - big_m)
