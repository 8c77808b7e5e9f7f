"""
Glauber–Fock waveguide lattice: coupled-mode propagation that reproduces
Kerr coherent-state photon statistics

Guide n stands for Fock level n. The coupling matrix is A + A† from the
deformed ladder operators, so propagating a single excited guide 0 over
distance z yields Ψ(z) = exp(i(A + A†)z)|0⟩, the Kerr coherent state with
α = iz.
"""

import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from ..models.schemas import KerrParams, LatticeConfig, PolarAmplitude
from ..payloads.presets import LATTICE_PRESETS
from ..utils.errors import DomainError, TruncationOverflowError
from ..utils.logging import get_logger
from .fockspace import kerr_amplitudes, ladder_ops, truncation_dim

logger = get_logger(__name__)

LEAKAGE_LIMIT = 1e-10
ODE_TOL = 1e-10
_SAFETY = 1.5


def coupling_coeffs(config: LatticeConfig) -> np.ndarray:
    """
    C_n between guides n-1 and n, n = 1 .. n_guides-1

    C_n = √(|λ|/2)·√n·√(2j ∓ 1 ± n), the off-diagonal of A + A†.
    """

    params = config.params
    n = np.arange(1, config.n_guides, dtype=float)
    if params.positive:
        return params.scale * np.sqrt(n) * np.sqrt(params.two_j - 1 + n)
    return params.scale * np.sqrt(n) * np.sqrt(params.two_j + 1 - n)


def coupling_matrix(config: LatticeConfig) -> np.ndarray:
    """A + A† assembled from the ladder operators, checked against coupling_coeffs"""
    ops = ladder_ops(config.params, config.n_guides)
    h = (ops.a_op + ops.a_dag).real
    off = np.diag(h, k=1)
    expected = coupling_coeffs(config)
    if not np.allclose(off, expected, rtol=1e-12, atol=0.0):
        raise DomainError("coupling law disagrees with A + A†", parameter="n_guides")
    return h


def guide_spacings(config: LatticeConfig) -> np.ndarray:
    """d_n = d0 - κ·ln(C_n / c1), the spacing realizing the exponential coupling law"""
    couplings = coupling_coeffs(config)
    if np.any(couplings <= 0):
        raise DomainError("coupling must be positive for every guide pair", parameter="n_guides")
    return config.d0 - config.kappa * np.log(couplings / config.c1)


def couplings_from_spacings(config: LatticeConfig, spacings: np.ndarray) -> np.ndarray:
    """C_n = c1·exp(-(d_n - d0)/κ)"""
    return config.c1 * np.exp(-(np.asarray(spacings) - config.d0) / config.kappa)


def default_guides(params: KerrParams, z_max: float) -> int:
    """2j+1 for λ < 0; 1.5× the 1e-12 truncation at z_max otherwise"""
    if not params.positive:
        return params.two_j + 1
    return max(2, int(math.ceil(_SAFETY * truncation_dim(params, z_max, 1e-12))))


def make_config(
    lam: float,
    j: float,
    z_grid: List[float],
    n_guides: Optional[int] = None,
    c1: float = 1.0,
    d0: float = 10.0,
    kappa: float = 1.0,
) -> LatticeConfig:
    params = KerrParams.of(lam, j)
    guides = n_guides if n_guides is not None else default_guides(params, max(z_grid))
    return LatticeConfig(params=params, n_guides=guides, c1=c1, d0=d0, kappa=kappa, z_grid=list(z_grid))


def preset_config(name: str) -> LatticeConfig:
    if name not in LATTICE_PRESETS:
        raise DomainError(f"unknown lattice preset '{name}'", parameter="preset")
    p = LATTICE_PRESETS[name]
    z_grid = np.linspace(0.0, p["z_max"], p["z_points"]).tolist()
    return make_config(p["lambda"], p["j"], z_grid)


def _check_leakage(config: LatticeConfig, field: np.ndarray) -> None:
    if not config.params.positive:
        return
    edge = np.abs(field[-1]) ** 2
    worst = float(np.max(edge))
    if worst > LEAKAGE_LIMIT:
        z_bad = config.z_grid[int(np.argmax(edge))]
        raise TruncationOverflowError(
            f"truncation overflow: light reaches the last guide (intensity {worst:.3g} at z={z_bad:g})",
            required_dim=None,
            cap=config.n_guides,
            details={"leakage": worst, "z": z_bad},
        )


def propagate(config: LatticeConfig) -> np.ndarray:
    """
    Field E_n(z) for a unit excitation of guide 0

    Returns:
        n_guides × len(z_grid) complex matrix
    """

    h = coupling_matrix(config)
    w, v = eigh_tridiagonal(np.diag(h), np.diag(h, k=1))
    z = np.asarray(config.z_grid)
    weights = v[0, :]
    field = v @ (np.exp(1j * np.outer(w, z)) * weights[:, None])
    _check_leakage(config, field)

    power = np.sum(np.abs(field) ** 2, axis=0)
    logger.debug(f"propagated {config.n_guides} guides over {z.size} distances, max |1-P|={np.max(np.abs(power - 1)):.2g}")
    return field


def propagate_ode(config: LatticeConfig) -> np.ndarray:
    """Same field from adaptive RK45 integration of i dE/dz + (A + A†)E = 0"""
    h = sparse.csr_matrix(coupling_matrix(config))
    e0 = np.zeros(config.n_guides, dtype=np.complex128)
    e0[0] = 1.0
    z = np.asarray(config.z_grid)
    if z[-1] == 0.0:
        return e0[:, None].copy()

    result = solve_ivp(
        lambda _, e: 1j * (h @ e),
        (0.0, float(z[-1])),
        e0,
        method="RK45",
        t_eval=z,
        rtol=ODE_TOL,
        atol=ODE_TOL,
    )
    if not result.success:
        raise DomainError(f"lattice ODE integration failed: {result.message}", parameter="z_grid")
    return result.y


def intensity_map(config: LatticeConfig) -> np.ndarray:
    """|E_n(z)|², one column per distance; column sums are 1"""
    return np.abs(propagate(config)) ** 2


def closed_form_intensities(config: LatticeConfig) -> np.ndarray:
    """|⟨n|α = iz⟩|² from the closed-form amplitudes"""
    columns = [
        np.abs(kerr_amplitudes(PolarAmplitude(r=z, phi=math.pi / 2.0), config.params, config.n_guides)) ** 2
        for z in config.z_grid
    ]
    return np.column_stack(columns)


def unitarity_residual(intensities: np.ndarray) -> float:
    return float(np.max(np.abs(intensities.sum(axis=0) - 1.0)))


def revival_distances(params: KerrParams) -> Dict[str, float]:
    """Transfer to guide 2j at √(|λ|/2)z = π/2, return to guide 0 at √(|λ|/2)z = π"""
    if params.positive:
        raise DomainError("revivals only occur for negative lambda", parameter="lambda")
    return {"transfer": (math.pi / 2.0) / params.scale, "revival": math.pi / params.scale}


def revival_report(config: LatticeConfig) -> Dict[str, float]:
    """Intensity at the transfer and revival distances of a negative-λ lattice"""
    distances = revival_distances(config.params)
    at_revival = config.model_copy(update={"z_grid": [distances["transfer"], distances["revival"]]})
    intensities = intensity_map(at_revival)
    last = config.n_guides - 1
    return {
        "transfer_z": distances["transfer"],
        "transfer_intensity": float(intensities[last, 0]),
        "transfer_residual": abs(1.0 - float(intensities[last, 0])),
        "revival_z": distances["revival"],
        "revival_intensity": float(intensities[0, 1]),
        "revival_residual": abs(1.0 - float(intensities[0, 1])),
    }


def intensity_frame(config: LatticeConfig, intensities: Optional[np.ndarray] = None) -> pd.DataFrame:
    """Rows per z: column z, then guide_0 .. guide_{N-1}"""
    intensities = intensity_map(config) if intensities is None else intensities
    frame = pd.DataFrame(intensities.T, columns=[f"guide_{n}" for n in range(config.n_guides)])
    frame.insert(0, "z", config.z_grid)
    return frame


def export_intensity_csv(config: LatticeConfig, path: Path, intensities: Optional[np.ndarray] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    intensity_frame(config, intensities).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote lattice intensities to {path}")
    return path
