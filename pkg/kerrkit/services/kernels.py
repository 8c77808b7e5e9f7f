"""
Closed-form kernel families, per-feature composition, realification and
Gram assembly.

Every one-dimensional kernel broadcasts over numpy arrays so the same code
serves single evaluations and whole Gram blocks. Power-law families are
evaluated in log space.
"""

import math
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..config import get_settings
from ..models.schemas import (
    Compose,
    GramMatrix,
    KernelFamily,
    KernelSpec,
    KerrParams,
    PolarAmplitude,
    Realify,
)
from ..utils.errors import DomainError, ShapeMismatchError
from ..utils.logging import get_logger
from .fockspace import log_cosh

logger = get_logger(__name__)

# complex entries per block (rows x n x d), independent of the worker count
_BLOCK_BUDGET = 4_000_000
SQUEEZED_TWO_J = 0.5


def _scale(lam: float) -> float:
    return math.sqrt(abs(lam) / 2.0)


def _check_negative_domain(c, lam: float) -> None:
    arg = _scale(lam) * np.asarray(c)
    if np.any(arg >= math.pi / 2.0):
        raise DomainError(
            f"amplitude outside the negative-lambda domain: max sqrt(|lambda|/2)*c = {float(np.max(arg)):.6g} >= pi/2",
            parameter="c",
        )


def kerr_overlap_pos(r1, phi1, r2, phi2, lam: float, two_j: float):
    """⟨α₁|α₂⟩ for λ > 0 with independent moduli and phases"""
    s = _scale(lam)
    u1, u2 = s * np.asarray(r1, dtype=float), s * np.asarray(r2, dtype=float)
    delta = np.asarray(phi1, dtype=float) - np.asarray(phi2, dtype=float)
    t = np.tanh(u1) * np.tanh(u2)
    log_k = -two_j * (log_cosh(u1) + log_cosh(u2)) - two_j * np.log(1.0 - np.exp(1j * delta) * t)
    return np.exp(log_k)


def kerr_overlap_neg(r1, phi1, r2, phi2, lam: float, two_j: int):
    """⟨α₁|α₂⟩ for λ < 0 (integer power 2j)"""
    s = _scale(lam)
    u1, u2 = s * np.asarray(r1, dtype=float), s * np.asarray(r2, dtype=float)
    delta = np.asarray(phi1, dtype=float) - np.asarray(phi2, dtype=float)
    base = np.cos(u1) * np.cos(u2) + np.exp(1j * delta) * np.sin(u1) * np.sin(u2)
    return base ** int(two_j)


def kerr_overlap(alpha1: PolarAmplitude, alpha2: PolarAmplitude, params: KerrParams) -> complex:
    """General closed-form overlap of two Kerr coherent states"""
    if params.positive:
        value = kerr_overlap_pos(alpha1.r, alpha1.phi, alpha2.r, alpha2.phi, params.lam, params.two_j)
    else:
        value = kerr_overlap_neg(alpha1.r, alpha1.phi, alpha2.r, alpha2.phi, params.lam, params.two_j)
    return complex(value)


def kerr_phase_pos(phi1, phi2, c: float, lam: float, j: float):
    """sech^{4j}(u) / (1 - e^{iΔφ} tanh²u)^{2j} with u = √(λ/2)·c"""
    if lam <= 0:
        raise DomainError("kerr_phase_pos requires lambda > 0", parameter="lambda")
    return kerr_overlap_pos(c, phi1, c, phi2, lam, 2.0 * j)


def kerr_phase_neg(phi1, phi2, c: float, lam: float, j: float):
    """(1 + e^{iΔφ} tan²u)^{2j} / sec^{4j}(u) with u = √(|λ|/2)·c"""
    if lam >= 0:
        raise DomainError("kerr_phase_neg requires lambda < 0", parameter="lambda")
    _check_negative_domain(c, lam)
    return kerr_overlap_neg(c, phi1, c, phi2, lam, int(round(2 * j)))


def kerr_amp_pos(x, y, lam: float, j: float):
    """cosh^{-2j}(√(λ/2)·|x - y|)"""
    if lam <= 0:
        raise DomainError("kerr_amp_pos requires lambda > 0", parameter="lambda")
    delta = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return np.exp(-2.0 * j * log_cosh(_scale(lam) * delta))


def kerr_amp_neg(x, y, lam: float, j: float):
    """cos^{2j}(√(|λ|/2)·|x - y|); negative values possible for odd 2j"""
    if lam >= 0:
        raise DomainError("kerr_amp_neg requires lambda < 0", parameter="lambda")
    delta = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return np.cos(_scale(lam) * delta) ** int(round(2 * j))


def ess(x, y, l: float, p: float):
    """Exponential sine-squared kernel"""
    delta = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return np.exp(-(2.0 / l**2) * np.sin(math.pi * delta / p) ** 2)


def qec(x, y, l: float, lam: float, j: float):
    """Quantum exponential cosine kernel; diagonal exp(-2/l²)"""
    if lam >= 0:
        raise DomainError("qec requires lambda < 0", parameter="lambda")
    return np.exp(-(2.0 / l**2) * kerr_amp_neg(x, y, lam, j))


def rbf(x, y, sigma: float):
    """exp(-|x - y|² / 2σ²)"""
    if not sigma > 0:
        raise DomainError("rbf requires sigma > 0", parameter="sigma")
    delta = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return np.exp(-(delta**2) / (2.0 * sigma**2))


def squeezed_phase(phi1, phi2, c: float):
    """Squeezed-vacuum phase overlap: the λ = 2 phase kernel with exponent -1/2"""
    return kerr_overlap_pos(c, phi1, c, phi2, 2.0, SQUEEZED_TWO_J)


def squeezed_amp(x, y):
    """cosh^{-1/2}(|x - y|)"""
    delta = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return np.exp(-0.5 * log_cosh(delta))


def per_feature_values(
    spec: KernelSpec,
    x: np.ndarray,
    y: np.ndarray,
    amp_x: Optional[np.ndarray] = None,
    amp_y: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    One-dimensional kernel values for broadcast-compatible feature arrays

    Args:
        spec: Kernel specification
        x, y: Feature arrays (broadcast against each other)
        amp_x, amp_y: Optional per-point encoding moduli for phase families

    Returns:
        Array of per-feature values (complex for phase families)
    """

    family = spec.family
    p = spec.params

    if family.is_phase:
        if amp_x is None:
            amp_x = amp_y = p["c"]
        if family == KernelFamily.KERR_PHASE_POS:
            return kerr_overlap_pos(amp_x, x, amp_y, y, p["lambda"], 2.0 * p["j"])
        if family == KernelFamily.KERR_PHASE_NEG:
            _check_negative_domain(amp_x, p["lambda"])
            _check_negative_domain(amp_y, p["lambda"])
            return kerr_overlap_neg(amp_x, x, amp_y, y, p["lambda"], int(round(2 * p["j"])))
        return kerr_overlap_pos(amp_x, x, amp_y, y, 2.0, SQUEEZED_TWO_J)

    if family == KernelFamily.KERR_AMP_POS:
        return kerr_amp_pos(x, y, p["lambda"], p["j"])
    if family == KernelFamily.KERR_AMP_NEG:
        return kerr_amp_neg(x, y, p["lambda"], p["j"])
    if family == KernelFamily.SQUEEZED_AMP:
        return squeezed_amp(x, y)
    if family == KernelFamily.RBF:
        return rbf(x, y, p["sigma"])
    if family == KernelFamily.ESS:
        return ess(x, y, p["l"], p["p"])
    values = qec(x, y, p["l"], p["lambda"], p["j"])
    if spec.normalize_diagonal:
        values = values / math.exp(-2.0 / p["l"] ** 2)
    return values


def realify(values, policy: Realify):
    """|K|² or Re K; real inputs pass through"""
    if not np.iscomplexobj(values):
        return values
    if policy == Realify.SQUARED_MODULUS:
        return values.real**2 + values.imag**2
    return values.real


def combine(spec: KernelSpec, per_feature: np.ndarray) -> np.ndarray:
    """Compose per-feature values along the last axis, then realify"""
    if spec.compose == Compose.PRODUCT:
        combined = np.prod(per_feature, axis=-1)
    else:
        combined = np.sum(per_feature, axis=-1)
    return realify(combined, spec.realify)


def feature_kernel(
    spec: KernelSpec,
    x,
    y,
    amp_x=None,
    amp_y=None,
) -> float:
    """Realified kernel between two feature vectors"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ShapeMismatchError(
            f"feature vectors differ in dimension: {x.shape} vs {y.shape}", expected=x.shape, actual=y.shape
        )
    return float(combine(spec, per_feature_values(spec, x, y, amp_x, amp_y)))


def _rows_per_block(n_cols: int, d: int) -> int:
    return max(1, _BLOCK_BUDGET // max(1, n_cols * d))


def _block(spec, xa, xb, amp_a, amp_b) -> np.ndarray:
    left = xa[:, None, :]
    right = xb[None, :, :]
    aa = None if amp_a is None else amp_a[:, None, :]
    ab = None if amp_b is None else amp_b[None, :, :]
    return combine(spec, per_feature_values(spec, left, right, aa, ab))


def _check_amplitudes(amplitudes: Optional[np.ndarray], features: np.ndarray) -> Optional[np.ndarray]:
    if amplitudes is None:
        return None
    amplitudes = np.asarray(amplitudes, dtype=float)
    if amplitudes.shape != features.shape:
        raise ShapeMismatchError(
            "encoding amplitudes must match the feature matrix", expected=features.shape, actual=amplitudes.shape
        )
    return amplitudes


def cross_gram(
    features_a,
    features_b,
    spec: KernelSpec,
    amplitudes_a: Optional[np.ndarray] = None,
    amplitudes_b: Optional[np.ndarray] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Rectangular kernel matrix K[i, k] = k(a_i, b_k)

    Args:
        features_a: m×d matrix
        features_b: n×d matrix
        spec: Kernel specification
        amplitudes_a, amplitudes_b: Optional per-point encoding moduli
        workers: joblib worker count (defaults to settings)

    Returns:
        m×n real matrix
    """

    a = np.atleast_2d(np.asarray(features_a, dtype=float))
    b = np.atleast_2d(np.asarray(features_b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ShapeMismatchError("feature dimensions differ", expected=b.shape[1], actual=a.shape[1])
    amp_a = _check_amplitudes(amplitudes_a, a)
    amp_b = _check_amplitudes(amplitudes_b, b)
    if spec.family.is_phase and spec.family == KernelFamily.KERR_PHASE_NEG and amp_a is None:
        _check_negative_domain(spec.params["c"], spec.params["lambda"])

    step = _rows_per_block(b.shape[0], b.shape[1])
    starts = list(range(0, a.shape[0], step))
    n_jobs = get_settings().n_jobs if workers is None else (-1 if workers <= 0 else workers)

    def _rows(start: int) -> np.ndarray:
        stop = min(start + step, a.shape[0])
        sub_amp = None if amp_a is None else amp_a[start:stop]
        try:
            return _block(spec, a[start:stop], b, sub_amp, amp_b)
        except DomainError as e:
            raise DomainError(
                f"{e.message} (rows {start}..{stop - 1})",
                parameter=e.parameter,
                details={**e.details, "rows": [start, stop - 1]},
            )

    if n_jobs == 1 or len(starts) == 1:
        blocks = [_rows(s) for s in starts]
    else:
        blocks = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(_rows)(s) for s in starts)
    return np.vstack(blocks)


def gram(
    features,
    spec: KernelSpec,
    amplitudes: Optional[np.ndarray] = None,
    workers: Optional[int] = None,
    audit: bool = False,
    repair: bool = True,
) -> GramMatrix:
    """
    Symmetric Gram matrix of feature_kernel values

    The upper triangle is mirrored, so the result is exactly symmetric and
    independent of the row-block schedule. QEC Grams are projected onto the
    PSD cone unless ``repair`` is False.
    """

    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[0] < 2:
        raise ShapeMismatchError("gram needs at least two points", expected=">=2", actual=x.shape[0])

    values = cross_gram(x, x, spec, amplitudes, amplitudes, workers=workers)
    values = np.triu(values) + np.triu(values, 1).T
    logger.debug(f"gram n={x.shape[0]} d={x.shape[1]} family={spec.family.value}")

    result = GramMatrix(values=values, spec=spec)
    if spec.family == KernelFamily.QEC and repair:
        result = repair_psd(result)
    if audit:
        result = audit_psd(result)
    return result


def min_eigenvalue(values: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(values)[0])


def audit_psd(gram_matrix: GramMatrix) -> GramMatrix:
    """Fill min_eigenvalue"""
    return gram_matrix.model_copy(update={"min_eigenvalue": min_eigenvalue(gram_matrix.values)})


def psd_floor(n: int) -> float:
    return get_settings().psd_floor_factor * n


def repair_psd(gram_matrix: GramMatrix) -> GramMatrix:
    """
    Make a Gram usable by a convex solver

    Slightly indefinite matrices (min eigenvalue within the numerical floor)
    get a diagonal shift of |min eig|; anything more indefinite is replaced
    by its nearest symmetric PSD matrix (negative eigenvalues clipped).
    """

    values = gram_matrix.values
    eigvals, eigvecs = np.linalg.eigh(values)
    lowest = float(eigvals[0])
    if lowest >= 0.0:
        return gram_matrix.model_copy(update={"min_eigenvalue": lowest})

    n = values.shape[0]
    if lowest >= -psd_floor(n):
        logger.warning(
            "Shifting slightly indefinite Gram diagonal",
            extra={"shift": -lowest, "family": gram_matrix.spec.family.value},
        )
        shifted = values + (-lowest) * np.eye(n)
        return GramMatrix(
            values=shifted,
            spec=gram_matrix.spec,
            min_eigenvalue=0.0,
            diagonal_shift=gram_matrix.diagonal_shift - lowest,
            clipped_mass=gram_matrix.clipped_mass,
        )

    clipped = np.clip(eigvals, 0.0, None)
    mass = float(np.sum(clipped - eigvals))
    projected = (eigvecs * clipped) @ eigvecs.T
    projected = 0.5 * (projected + projected.T)
    logger.warning(
        "Projected indefinite Gram onto the PSD cone",
        extra={"min_eigenvalue": lowest, "clipped_mass": mass, "family": gram_matrix.spec.family.value},
    )
    return GramMatrix(
        values=projected,
        spec=gram_matrix.spec,
        min_eigenvalue=min_eigenvalue(projected),
        diagonal_shift=gram_matrix.diagonal_shift,
        clipped_mass=gram_matrix.clipped_mass + mass,
    )


def fit_blocks(gram_matrix: GramMatrix, fit_idx, held_idx) -> Tuple[GramMatrix, np.ndarray]:
    """
    Training block and held-out cross block for one fit

    The training block is repaired on its own, so held-out points never
    enter the projection. The held-out × fit block is returned raw.
    """

    fit = np.asarray(fit_idx, dtype=int)
    held = np.asarray(held_idx, dtype=int)
    block = GramMatrix(
        values=gram_matrix.subset(fit),
        spec=gram_matrix.spec,
        diagonal_shift=gram_matrix.diagonal_shift,
        clipped_mass=gram_matrix.clipped_mass,
    )
    return repair_psd(block), gram_matrix.subset(held, fit)
