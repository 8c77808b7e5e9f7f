"""
Feature-space geometry of Kerr coherent states: Fubini–Study metric,
curvature, quadric embeddings, resolution of identity and the reproducing
property.

Curvature note: the closed-form metric g = diag(j|λ|, (j/2)·sinh²(√(2|λ|)r))
(sin² for λ < 0) has Gaussian curvature ∓2/j for every λ, so its Ricci scalar
is ∓4/j. The printed value ∓2λ/j agrees only at |λ| = 2; both are exposed.
"""

import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import betainc

from ..models.schemas import KerrParams, MetricAtPoint, PolarAmplitude, QuadratureConfig
from ..utils.errors import DomainError, QuadratureResolutionError, StepSizeError
from ..utils.logging import get_logger
from .fockspace import kerr_amplitudes, truncation_dim
from .kernels import kerr_overlap_neg, kerr_overlap_pos

logger = get_logger(__name__)

_RICHARDSON_RTOL = 1e-6
_MAX_HALVINGS = 8


def _check_domain(params: KerrParams, r: float) -> None:
    if r < 0 or not params.in_domain(r):
        raise DomainError(f"r={r} outside the state domain", parameter="r")


def metric_closed_form(params: KerrParams, r: float, phi: float = 0.0) -> MetricAtPoint:
    """(g_rr, g_φφ) = (j|λ|, (j/2)·sinh² or sin²(√(2|λ|)·r)), g_rφ = 0"""

    _check_domain(params, r)
    a = math.sqrt(2.0 * abs(params.lam))
    if params.positive:
        g_phiphi = 0.5 * params.j * math.sinh(a * r) ** 2
    else:
        g_phiphi = 0.5 * params.j * math.sin(a * r) ** 2
    return MetricAtPoint(
        g_rr=params.j * abs(params.lam),
        g_phiphi=g_phiphi,
        g_rphi=0.0,
        point=PolarAmplitude(r=r, phi=phi),
        params=params,
    )


def _richardson(f: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """Central difference with one Richardson step; error O(h⁴)"""

    def central(step: float) -> np.ndarray:
        return (f(step) - f(-step)) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def _converged_derivative(f: Callable[[float], np.ndarray], h: float, label: str) -> np.ndarray:
    """Halve h until successive Richardson estimates agree"""

    previous = _richardson(f, h)
    for _ in range(_MAX_HALVINGS):
        h *= 0.5
        current = _richardson(f, h)
        scale = max(float(np.max(np.abs(current))), 1e-300)
        if float(np.max(np.abs(current - previous))) <= _RICHARDSON_RTOL * scale:
            return current
        previous = current
    raise StepSizeError(f"finite differences for {label} did not converge", details={"h_final": h})


def metric_numeric(params: KerrParams, point: PolarAmplitude, h: float = 1e-4) -> MetricAtPoint:
    """
    Fubini–Study metric from central-difference state derivatives

    Args:
        params: Kerr parameters
        point: Where to evaluate (interior of the domain)
        h: Initial step in [1e-6, 1e-3]

    Returns:
        MetricAtPoint from g_{μν} = Re(⟨ψ_μ|ψ_ν⟩ - ⟨ψ_μ|ψ⟩⟨ψ|ψ_ν⟩) for normalized ψ
    """

    if not 1e-6 <= h <= 1e-3:
        raise DomainError(f"h must lie in [1e-6, 1e-3], got {h}", parameter="h")
    _check_domain(params, point.r + h)

    if params.positive:
        dim = truncation_dim(params, point.r + 2 * h)
    else:
        dim = params.two_j + 1

    def state(r: float, phi: float) -> np.ndarray:
        if r < 0:
            # continue through the origin along the opposite ray
            r, phi = -r, phi + math.pi
        psi = kerr_amplitudes(PolarAmplitude(r=r, phi=phi), params, dim)
        return psi / np.linalg.norm(psi)

    psi = state(point.r, point.phi)
    d_r = _converged_derivative(lambda s: state(point.r + s, point.phi), h, "d/dr")
    d_phi = _converged_derivative(lambda s: state(point.r, point.phi + s), h, "d/dphi")

    def component(a: np.ndarray, b: np.ndarray) -> complex:
        return np.vdot(a, b) - np.vdot(a, psi) * np.vdot(psi, b)

    g_rr = component(d_r, d_r).real
    g_pp = component(d_phi, d_phi).real
    g_rp = component(d_r, d_phi).real
    return MetricAtPoint(g_rr=g_rr, g_phiphi=g_pp, g_rphi=g_rp, point=point, params=params)


def ricci_scalar(params: KerrParams) -> float:
    """Ricci scalar of the closed-form metric: -4/j (λ > 0), +4/j (λ < 0)"""
    return (-4.0 if params.positive else 4.0) / params.j


def ricci_scalar_printed(params: KerrParams) -> float:
    """The printed form -2λ/j (λ > 0), +2|λ|/j (λ < 0)"""
    return (-2.0 * params.lam if params.positive else 2.0 * abs(params.lam)) / params.j


def christoffel_closed_form(params: KerrParams, r: float) -> Tuple[float, float]:
    """
    Non-zero Christoffel symbols of the diagonal metric

    Returns:
        (Γ^φ_{rφ}, Γ^r_{φφ}) = (G'/2G, -G'/2E)
    """

    a = math.sqrt(2.0 * abs(params.lam))
    if params.positive:
        return a / math.tanh(a * r), -math.sinh(2 * a * r) / (2.0 * a)
    return a / math.tan(a * r), -math.sin(2 * a * r) / (2.0 * a)


def christoffel_printed(params: KerrParams, r: float) -> Tuple[float, float]:
    """Christoffel symbols in the printed form, for auditing"""
    a = math.sqrt(2.0 * abs(params.lam))
    half = math.sqrt(abs(params.lam) / 2.0)
    if params.positive:
        return a / math.tanh(a * r), -half * math.sinh(2 * a * r)
    return a / math.tan(a * r), -half * math.sin(2 * a * r)


def _curvature_at(params: KerrParams, r: float, h: float) -> float:
    g_rr = params.j * abs(params.lam)

    def g_phiphi(x: float) -> float:
        return metric_closed_form(params, x).g_phiphi

    def gamma_r_phiphi(x: float) -> float:
        d_g = float(_converged_derivative(lambda s: np.array([g_phiphi(x + s)]), h, "G'")[0])
        return -d_g / (2.0 * g_rr)

    G = g_phiphi(r)
    gamma_phi_rphi = float(_converged_derivative(lambda s: np.array([g_phiphi(r + s)]), h, "G'")[0]) / (2.0 * G)
    d_gamma = float(_converged_derivative(lambda s: np.array([gamma_r_phiphi(r + s)]), h, "dΓ")[0])
    riemann = d_gamma - gamma_r_phiphi(r) * gamma_phi_rphi
    return 2.0 * riemann / G


def ricci_numeric(params: KerrParams, r_samples: List[float], h: float = 1e-3) -> List[float]:
    """
    Scalar curvature from finite-difference Christoffel symbols of the closed-form metric

    Samples must avoid the coordinate degeneracy at r = 0 (r ≥ 0.05).
    """

    values: List[float] = []
    failed: List[float] = []
    for r in r_samples:
        if r < 0.05:
            raise DomainError(f"curvature sample r={r} too close to the origin", parameter="r")
        _check_domain(params, r + 4 * h)
        try:
            values.append(_curvature_at(params, r, h))
        except StepSizeError:
            failed.append(r)
            values.append(float("nan"))
    if failed:
        raise StepSizeError(
            f"Richardson check failed at {len(failed)} sample(s)",
            samples=failed,
            details={"failed_samples": failed},
        )
    return values


def embed(params: KerrParams, r: float, phi: float) -> Tuple[float, float, float]:
    """Hyperboloid (λ > 0) or sphere (λ < 0) of squared radius j/2"""

    a = math.sqrt(2.0 * abs(params.lam))
    radius = math.sqrt(params.j / 2.0)
    if params.positive:
        return (
            radius * math.cosh(a * r),
            radius * math.sinh(a * r) * math.cos(phi),
            radius * math.sinh(a * r) * math.sin(phi),
        )
    return (
        radius * math.cos(a * r),
        radius * math.sin(a * r) * math.cos(phi),
        radius * math.sin(a * r) * math.sin(phi),
    )


def quadric_residual(params: KerrParams, r: float, phi: float) -> float:
    """|x₀² ∓ x₁² ∓ x₂² - j/2|"""
    x0, x1, x2 = embed(params, r, phi)
    if params.positive:
        return abs(x0**2 - x1**2 - x2**2 - params.j / 2.0)
    return abs(x0**2 + x1**2 + x2**2 - params.j / 2.0)


def pullback_metric(params: KerrParams, r: float, phi: float, h: float = 1e-4) -> Tuple[float, float, float]:
    """
    Metric induced by the embedding, ambient signature (-,+,+) for the
    hyperboloid and Euclidean for the sphere

    Returns:
        (g_rr, g_φφ, g_rφ)
    """

    eta = np.array([-1.0, 1.0, 1.0]) if params.positive else np.ones(3)

    d_r = _converged_derivative(lambda s: np.array(embed(params, r + s, phi)), h, "dx/dr")
    d_phi = _converged_derivative(lambda s: np.array(embed(params, r, phi + s)), h, "dx/dphi")
    return (
        float(np.sum(eta * d_r * d_r)),
        float(np.sum(eta * d_phi * d_phi)),
        float(np.sum(eta * d_r * d_phi)),
    )


def _angular_nodes(q: QuadratureConfig) -> np.ndarray:
    m = max(q.angular_nodes, 2 * q.projector_count + 1)
    return 2.0 * math.pi * np.arange(m) / m


def _radial_rule(params: KerrParams, q: QuadratureConfig, nodes: int, for_resolution: bool):
    """
    Radial nodes as moduli r with weights of the radial measure density

    λ > 0: s = tanh(u) on [0, s_max], density 2(2j-1)·s/(1-s²)² ds
    λ < 0 (resolution): x = cos(2u) on [-1, 1], density (2j+1)/2 dx
    λ < 0 (reproducing): u on [0, π/2], density (2j+1)·sin(2u) du
    """

    x, w = np.polynomial.legendre.leggauss(nodes)
    s = params.scale
    if params.positive:
        s_max = 1.0 if q.r_max is None else math.tanh(s * q.r_max)
        t = 0.5 * s_max * (x + 1.0)
        weights = 0.5 * s_max * w * 2.0 * (params.two_j - 1) * t / (1.0 - t**2) ** 2
        radii = np.arctanh(t) / s
        return radii, weights
    if for_resolution:
        u = 0.5 * np.arccos(x)
        return u / s, w * (params.two_j + 1) / 2.0
    u = 0.25 * math.pi * (x + 1.0)
    return u / s, 0.25 * math.pi * w * (params.two_j + 1) * np.sin(2.0 * u)


def _check_measure(params: KerrParams) -> None:
    if params.positive and params.two_j < 2:
        logger.warning("Positive-lambda measure vanishes at j = 1/2; identity check unresolved", extra={"j": params.j})
        raise DomainError("positive-lambda resolution of identity requires j >= 1", parameter="j")


def _resolution_block(params: KerrParams, q: QuadratureConfig) -> np.ndarray:
    radii, weights = _radial_rule(params, q, q.radial_nodes, for_resolution=True)
    phis = _angular_nodes(q)
    p = q.projector_count
    if not params.positive:
        p = min(p, params.two_j + 1)

    block = np.zeros((p, p), dtype=np.complex128)
    for r, w_r in zip(radii, weights):
        for phi in phis:
            c = kerr_amplitudes(PolarAmplitude(r=float(r), phi=float(phi)), params, p)
            block += (w_r / phis.size) * np.outer(c, c.conj())
    return block


def resolution_residual(params: KerrParams, q: QuadratureConfig, check_resolution: bool = True) -> float:
    """
    max |(∫dμ |α⟩⟨α|)_{mn} - δ_{mn}| over the leading projector block

    Raises QuadratureResolutionError when doubling the nodes changes the
    residual by more than 10% (plus an absolute floor of 1e-12).
    """

    _check_measure(params)
    block = _resolution_block(params, q)
    residual = float(np.max(np.abs(block - np.eye(block.shape[0]))))

    if check_resolution:
        refined = resolution_residual(params, q.doubled(), check_resolution=False)
        if abs(refined - residual) > 0.1 * residual + 1e-12:
            raise QuadratureResolutionError(
                "resolution-of-identity quadrature under-resolved",
                residual=residual,
                refined=refined,
            )
    logger.debug(f"resolution residual {residual:.3g} (lambda={params.lam}, j={params.j})")
    return residual


def resolution_tail(params: KerrParams, r_max: float, n: int) -> float:
    """Mass of the n-th diagonal entry beyond r_max (λ > 0): 1 - I_{s²}(n+1, 2j-1)"""
    s2 = math.tanh(params.scale * r_max) ** 2
    return float(1.0 - betainc(n + 1, params.two_j - 1, s2))


def _overlap(params: KerrParams, r1, phi1, r2, phi2):
    if params.positive:
        return kerr_overlap_pos(r1, phi1, r2, phi2, params.lam, params.two_j)
    return kerr_overlap_neg(r1, phi1, r2, phi2, params.lam, params.two_j)


def _reproduced(alpha1: PolarAmplitude, alpha2: PolarAmplitude, params: KerrParams, q: QuadratureConfig) -> complex:
    radii, weights = _radial_rule(params, q, q.radial_nodes, for_resolution=False)
    phis = _angular_nodes(q)
    rr, pp = np.meshgrid(radii, phis, indexing="ij")
    integrand = _overlap(params, alpha1.r, alpha1.phi, rr, pp) * _overlap(params, rr, pp, alpha2.r, alpha2.phi)
    return complex(np.sum(weights[:, None] * integrand) / phis.size)


def reproducing_residual(
    alpha1: PolarAmplitude,
    alpha2: PolarAmplitude,
    params: KerrParams,
    q: QuadratureConfig,
    check_resolution: bool = True,
) -> float:
    """|K(α₁, α₂) - ∫dμ(α) K(α₁, α) K(α, α₂)| with the complex closed-form kernels"""

    _check_measure(params)
    for a in (alpha1, alpha2):
        _check_domain(params, a.r)

    target = complex(_overlap(params, alpha1.r, alpha1.phi, alpha2.r, alpha2.phi))
    residual = abs(target - _reproduced(alpha1, alpha2, params, q))

    if check_resolution:
        refined = reproducing_residual(alpha1, alpha2, params, q.doubled(), check_resolution=False)
        if abs(refined - residual) > 0.1 * residual + 1e-12:
            raise QuadratureResolutionError(
                "reproducing-property quadrature under-resolved",
                residual=residual,
                refined=refined,
            )
    return residual


def default_quadrature(params: KerrParams, projector_count: int = 8, r_max: Optional[float] = None) -> QuadratureConfig:
    """Node counts that integrate the leading projector block exactly"""
    if params.positive:
        degree = 2 * (projector_count - 1) + 1 + 2 * max(params.two_j - 2, 0)
    else:
        degree = params.two_j
    radial = max(16, degree // 2 + 8)
    return QuadratureConfig(
        radial_nodes=radial,
        angular_nodes=max(16, 2 * projector_count + 1),
        r_max=r_max,
        projector_count=projector_count,
    )
