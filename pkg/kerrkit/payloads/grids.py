"""
Default hyperparameter grids per kernel family
"""

from typing import Dict, List

from ..models.schemas import KernelFamily

J_VALUES = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]

# sqrt(|lambda|/2)·c for phase kernels at |lambda| = 2
PHASE_AMPLITUDES = [0.1, 0.25, 0.5, 1.0, 1.5]

# sqrt(|lambda|/2) for amplitude kernels; lambda = ±2·s²
AMPLITUDE_SCALES = [0.5, 1.0, 2.0, 4.0, 8.0]

C_REG_VALUES = [0.1, 1.0, 10.0, 100.0]


def _lambdas(sign: float, scales: List[float]) -> List[float]:
    return [sign * 2.0 * s * s for s in scales]


DEFAULT_GRIDS: Dict[KernelFamily, Dict[str, List[float]]] = {
    KernelFamily.KERR_PHASE_POS: {"c": PHASE_AMPLITUDES, "lambda": [2.0], "j": J_VALUES},
    KernelFamily.KERR_PHASE_NEG: {"c": PHASE_AMPLITUDES, "lambda": [-2.0], "j": J_VALUES},
    KernelFamily.KERR_AMP_POS: {"lambda": _lambdas(1.0, AMPLITUDE_SCALES), "j": J_VALUES},
    KernelFamily.KERR_AMP_NEG: {"lambda": _lambdas(-1.0, AMPLITUDE_SCALES), "j": J_VALUES},
    KernelFamily.SQUEEZED_PHASE: {"c": PHASE_AMPLITUDES},
    KernelFamily.SQUEEZED_AMP: {},
    KernelFamily.RBF: {"sigma": [0.1, 0.3, 1.0, 3.0, 10.0]},
    KernelFamily.ESS: {"l": [0.5, 1.0, 2.0], "p": [0.5, 1.0, 2.0, 4.0]},
    KernelFamily.QEC: {"l": [0.5, 1.0, 2.0], "lambda": _lambdas(-1.0, [0.5, 1.0, 2.0]), "j": [0.5, 1.0, 2.0, 3.0]},
}

# Reduced grids for smoke runs (`bench --quick`)
QUICK_GRIDS: Dict[KernelFamily, Dict[str, List[float]]] = {
    KernelFamily.KERR_PHASE_POS: {"c": [0.5, 1.0], "lambda": [2.0], "j": [1.0, 2.0]},
    KernelFamily.KERR_PHASE_NEG: {"c": [0.5, 1.0], "lambda": [-2.0], "j": [1.0, 2.0]},
    KernelFamily.KERR_AMP_POS: {"lambda": _lambdas(1.0, [1.0, 4.0]), "j": [1.0, 2.0]},
    KernelFamily.KERR_AMP_NEG: {"lambda": _lambdas(-1.0, [1.0, 4.0]), "j": [1.0, 2.0]},
    KernelFamily.SQUEEZED_PHASE: {"c": [0.5, 1.0]},
    KernelFamily.SQUEEZED_AMP: {},
    KernelFamily.RBF: {"sigma": [0.3, 1.0]},
    KernelFamily.ESS: {"l": [1.0], "p": [1.0, 2.0]},
    KernelFamily.QEC: {"l": [1.0], "lambda": [-2.0], "j": [1.0, 2.0]},
}
QUICK_C_REG = [1.0, 10.0]


def default_grid(family: KernelFamily, quick: bool = False) -> Dict[str, List[float]]:
    table = QUICK_GRIDS if quick else DEFAULT_GRIDS
    return {k: list(v) for k, v in table[family].items()}


def default_c_reg(quick: bool = False) -> List[float]:
    return list(QUICK_C_REG if quick else C_REG_VALUES)
