"""
Kerr coherent states, deformed ladder operators and displacement unitaries
in a truncated Fock basis.

Closed-form states follow the expansion convention with phase factor
e^{-inφ}; the displacement exp(αA† - α*A)|0⟩ carries e^{+inφ}, so the
closed-form state at α equals the displaced vacuum at the conjugate label.
"""

import math
from typing import Literal, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply
from scipy.special import comb, gammaln
from scipy.stats import nbinom

from ..config import get_settings
from ..models.schemas import KerrParams, LadderOps, PolarAmplitude, StateVector
from ..utils.errors import DomainError, TruncationOverflowError
from ..utils.logging import get_logger

logger = get_logger(__name__)

ZetaVariant = Literal["proof", "statement"]

# dense expm below this size, expm_multiply above
_DENSE_EXPM_LIMIT = 512
_ORACLE_TOL = 1e-14


def log_cosh(x):
    """log(cosh x) without overflow"""
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _check_tol(tol: float) -> float:
    if not 0.0 < tol <= 1e-6:
        raise DomainError(f"tol must lie in (0, 1e-6], got {tol}", parameter="tol")
    return tol


def _require_sign(params: KerrParams, positive: bool) -> None:
    if params.positive != positive:
        wanted = "lambda > 0" if positive else "lambda < 0"
        raise DomainError(f"Operation requires {wanted}, got lambda={params.lam}", parameter="lambda")


def _require_domain(params: KerrParams, r: float) -> None:
    if not params.in_domain(r):
        raise DomainError(
            f"Amplitude r={r} outside the negative-lambda state domain r < {params.domain_radius:.6g}",
            parameter="r",
            details={"r": r, "domain_radius": params.domain_radius},
        )


def k0_diagonal(params: KerrParams, dim: int) -> np.ndarray:
    """Diagonal of K₀ = [A, A†]/2 on the untruncated algebra"""
    n = np.arange(dim, dtype=float)
    if params.positive:
        return 0.5 * params.lam * (params.j + n)
    return 0.5 * abs(params.lam) * (params.j - n)


def ladder_ops(params: KerrParams, dim: int) -> LadderOps:
    """
    Deformed ladder operators in a dim-dimensional Fock basis

    Args:
        params: Kerr parameters
        dim: Basis size; exactly 2j+1 for negative lambda

    Returns:
        LadderOps with A[n-1, n] populated, A† = A^H and diagonal K₀
    """

    if dim < 2:
        raise DomainError(f"dim must be at least 2, got {dim}", parameter="dim")
    if not params.positive and dim != params.two_j + 1:
        raise DomainError(
            f"negative-lambda basis must have dim = 2j+1 = {params.two_j + 1}, got {dim}",
            parameter="dim",
        )

    n = np.arange(1, dim, dtype=float)
    if params.positive:
        entries = params.scale * np.sqrt(n) * np.sqrt(params.two_j - 1 + n)
    else:
        entries = params.scale * np.sqrt(n) * np.sqrt(params.two_j + 1 - n)

    a_op = np.diag(entries.astype(np.complex128), k=1)
    return LadderOps(
        a_op=a_op,
        a_dag=a_op.conj().T,
        k0=np.diag(k0_diagonal(params, dim)).astype(np.complex128),
        params=params,
    )


def tail_probability(params: KerrParams, r: float, dim: int) -> float:
    """Probability mass of a positive-lambda state beyond the first dim levels"""
    if r == 0.0:
        return 0.0
    p = math.exp(-2.0 * float(log_cosh(params.scale * r)))
    return float(nbinom.sf(dim - 1, params.two_j, p))


def truncation_dim(
    params: KerrParams,
    r: float,
    tol: Optional[float] = None,
    cap: Optional[int] = None,
) -> int:
    """
    Smallest N whose negative-binomial tail Σ_{n≥N} |c_n|² lies below tol

    Args:
        params: Kerr parameters with lambda > 0
        r: Modulus of α
        tol: Tail bound in (0, 1e-6]
        cap: Hard cap on N (defaults to settings.max_fock_dim)

    Returns:
        The truncation dimension N
    """

    settings = get_settings()
    tol = _check_tol(settings.truncation_tol if tol is None else tol)
    cap = settings.max_fock_dim if cap is None else cap
    _require_sign(params, positive=True)
    if r < 0:
        raise DomainError(f"r must be nonnegative, got {r}", parameter="r")
    if r == 0.0:
        return 1

    p = math.exp(-2.0 * float(log_cosh(params.scale * r)))
    if p <= 0.0:
        raise TruncationOverflowError(
            f"state at r={r} is beyond double precision", required_dim=None, cap=cap
        )

    candidates = np.arange(cap + 1)
    tails = nbinom.sf(candidates - 1, params.two_j, p)
    ok = np.flatnonzero(tails < tol)
    if ok.size == 0:
        mean = params.two_j * (1.0 - p) / p
        raise TruncationOverflowError(
            f"truncation overflow: tail {tol:g} needs more than {cap} Fock levels",
            required_dim=None,
            cap=cap,
            details={"lambda": params.lam, "j": params.j, "r": r, "mean_photons": mean},
        )
    return max(int(ok[0]), 1)


def kerr_amplitudes(alpha: PolarAmplitude, params: KerrParams, dim: int) -> np.ndarray:
    """
    First dim closed-form amplitudes, without any tail requirement

    Negative lambda uses the cos/sin form, valid for every modulus; entries
    beyond n = 2j are zero.
    """

    n = np.arange(dim)
    u = params.scale * alpha.r
    phase = np.exp(-1j * n * alpha.phi)
    out = np.zeros(dim, dtype=np.complex128)

    if params.positive:
        if alpha.r == 0.0:
            out[0] = 1.0
            return out
        log_mag = (
            -params.two_j * log_cosh(u)
            + 0.5 * (gammaln(params.two_j + n) - gammaln(params.two_j) - gammaln(n + 1))
            + n * math.log(math.tanh(u))
        )
        return np.exp(log_mag) * phase

    m = n[n <= params.two_j]
    mag = np.sqrt(comb(params.two_j, m)) * np.cos(u) ** (params.two_j - m) * np.sin(u) ** m
    out[: m.size] = mag * phase[: m.size]
    return out


def kerr_state_pos(
    alpha: PolarAmplitude,
    params: KerrParams,
    tol: Optional[float] = None,
) -> StateVector:
    """Positive-lambda Kerr coherent state with adaptive truncation"""

    _require_sign(params, positive=True)
    tol = _check_tol(get_settings().truncation_tol if tol is None else tol)
    dim = truncation_dim(params, alpha.r, tol)
    return StateVector(
        amplitudes=kerr_amplitudes(alpha, params, dim),
        truncation_tail=tail_probability(params, alpha.r, dim),
    )


def kerr_state_neg(alpha: PolarAmplitude, params: KerrParams) -> StateVector:
    """Negative-lambda Kerr coherent state, exactly 2j+1 levels"""

    _require_sign(params, positive=False)
    _require_domain(params, alpha.r)
    return StateVector(amplitudes=kerr_amplitudes(alpha, params, params.two_j + 1), truncation_tail=0.0)


def kerr_state(alpha: PolarAmplitude, params: KerrParams, tol: Optional[float] = None) -> StateVector:
    """Dispatch on the sign of lambda"""
    if params.positive:
        return kerr_state_pos(alpha, params, tol)
    return kerr_state_neg(alpha, params)


def oracle_dim(params: KerrParams, r: float) -> int:
    """Basis size for matrix-exponential oracles: 1.5x the 1e-14 truncation plus margin"""
    if not params.positive:
        return params.two_j + 1
    settings = get_settings()
    dim = int(math.ceil(1.5 * truncation_dim(params, r, _ORACLE_TOL))) + 10
    if dim > settings.max_fock_dim:
        raise TruncationOverflowError(
            f"truncation overflow: oracle basis {dim} exceeds cap {settings.max_fock_dim}",
            required_dim=dim,
            cap=settings.max_fock_dim,
        )
    return dim


def _apply_exponential(generator: np.ndarray, vector: np.ndarray) -> np.ndarray:
    if generator.shape[0] <= _DENSE_EXPM_LIMIT:
        return expm(generator) @ vector
    return expm_multiply(sparse.csr_matrix(generator), vector)


def displace_vacuum(
    alpha: PolarAmplitude,
    params: KerrParams,
    dim: Optional[int] = None,
) -> StateVector:
    """
    exp(αA† - α*A)|0⟩ by matrix exponential; the independent oracle for the closed forms

    Args:
        alpha: Displacement label
        params: Kerr parameters
        dim: Basis size (positive lambda: defaults to oracle_dim; negative: 2j+1)

    Returns:
        Displaced vacuum
    """

    if dim is None:
        dim = oracle_dim(params, alpha.r)
    elif params.positive and dim > get_settings().max_fock_dim:
        raise TruncationOverflowError(
            f"truncation overflow: dim {dim} exceeds cap", required_dim=dim, cap=get_settings().max_fock_dim
        )

    ops = ladder_ops(params, dim)
    a = alpha.value
    generator = a * ops.a_dag - np.conj(a) * ops.a_op
    vacuum = np.zeros(dim, dtype=np.complex128)
    vacuum[0] = 1.0
    state = _apply_exponential(generator, vacuum)

    tail = tail_probability(params, alpha.r, dim) if params.positive else 0.0
    logger.debug(f"displace_vacuum dim={dim} r={alpha.r:.4g} tail={tail:.3g}")
    return StateVector(amplitudes=state, truncation_tail=tail)


def gaussian_decomposition(
    alpha: PolarAmplitude,
    params: KerrParams,
    variant: ZetaVariant = "proof",
) -> Tuple[complex, float]:
    """
    Disentangled form exp(ζA†)·ζ₀^{K₀}·exp(-ζ*A) of the displacement

    The "proof" variant uses ζ₀ = cosh^{-4/λ} (cos^{4/|λ|} for λ < 0), which
    reproduces the cosh^{-2j} prefactor through the vacuum K₀ eigenvalue
    |λ|j/2. The "statement" variant (cosh^{-j}) is kept only as a negative
    control.
    """

    u = params.scale * alpha.r
    direction = complex(math.cos(alpha.phi), math.sin(alpha.phi))

    if params.positive:
        zeta = direction * math.sqrt(2.0 / params.lam) * math.tanh(u)
        exponent = -4.0 / params.lam if variant == "proof" else -params.j
        zeta0 = math.exp(exponent * float(log_cosh(u)))
    else:
        _require_domain(params, alpha.r)
        zeta = direction * math.sqrt(2.0 / abs(params.lam)) * math.tan(u)
        exponent = 4.0 / abs(params.lam) if variant == "proof" else params.j
        zeta0 = math.cos(u) ** exponent

    return zeta, zeta0


def decomposition_state(
    alpha: PolarAmplitude,
    params: KerrParams,
    dim: Optional[int] = None,
    variant: ZetaVariant = "proof",
) -> StateVector:
    """Apply the factorized displacement to the vacuum"""

    if dim is None:
        dim = oracle_dim(params, alpha.r)
    zeta, zeta0 = gaussian_decomposition(alpha, params, variant)
    ops = ladder_ops(params, dim)

    state = np.zeros(dim, dtype=np.complex128)
    state[0] = 1.0
    state = _apply_exponential(-np.conj(zeta) * ops.a_op, state)
    state = np.power(zeta0, np.real(np.diag(ops.k0))) * state
    state = _apply_exponential(zeta * ops.a_dag, state)

    tail = tail_probability(params, alpha.r, dim) if params.positive else 0.0
    return StateVector(amplitudes=state, truncation_tail=tail)


def squeezed_dim(r: float, tol: float = _ORACLE_TOL) -> int:
    """Basis size holding a squeezed vacuum of modulus r to within tol (with margin)"""
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:
        return 2
    m = 0
    log_sech = -float(log_cosh(r))
    while True:
        log_term = log_sech + gammaln(2 * m + 1) - 2 * m * math.log(2.0) - 2 * gammaln(m + 1) + m * math.log(t2)
        if math.exp(log_term) / (1.0 - t2) < tol:
            break
        m += 1
    return int(math.ceil(1.5 * (2 * m + 1))) + 10


def squeezed_vacuum(alpha: PolarAmplitude, dim: Optional[int] = None) -> StateVector:
    """
    Single-mode squeezed vacuum exp((ξ*a² - ξa†²)/2)|0⟩ with ξ = r·e^{-iφ}

    The conjugated phase makes overlaps carry e^{i(φ₁-φ₂)} like the Kerr phase kernel.
    """

    dim = squeezed_dim(alpha.r) if dim is None else dim
    settings = get_settings()
    if dim > settings.max_fock_dim:
        raise TruncationOverflowError(
            f"truncation overflow: squeezed basis {dim} exceeds cap", required_dim=dim, cap=settings.max_fock_dim
        )

    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)
    a_dag = a.conj().T
    xi = alpha.r * complex(math.cos(alpha.phi), -math.sin(alpha.phi))
    generator = 0.5 * (np.conj(xi) * (a @ a) - xi * (a_dag @ a_dag))
    vacuum = np.zeros(dim, dtype=np.complex128)
    vacuum[0] = 1.0
    return StateVector(amplitudes=_apply_exponential(generator, vacuum), truncation_tail=0.0)


def inner_product(bra: StateVector, ket: StateVector) -> complex:
    """⟨bra|ket⟩ after zero-padding to a common dimension"""
    dim = max(bra.dim, ket.dim)
    return complex(np.vdot(bra.padded(dim), ket.padded(dim)))


def tensor_product(*states: StateVector) -> StateVector:
    """Kronecker product of single-mode states"""
    amplitudes = states[0].amplitudes
    tail = states[0].truncation_tail
    for state in states[1:]:
        amplitudes = np.kron(amplitudes, state.amplitudes)
        tail = tail + state.truncation_tail
    return StateVector(amplitudes=amplitudes, truncation_tail=min(tail, 1.0))
