"""
Dataset presets: generator parameters and train/test counts for every
benchmark dataset
"""

import math

# name -> (generator, counts and generator keyword arguments)
DATASET_PRESETS = {
    # Two interleaving half-circles, Gaussian noise sigma
    "moons-v1": {"generator": "moons", "n_train": 300, "n_test": 100, "noise": 0.25},
    "moons-v2": {"generator": "moons", "n_train": 645, "n_test": 215, "noise": 0.25},

    # Concentric circles, noise sigma / inner radius factor
    "circles-v1": {"generator": "circles", "n_train": 300, "n_test": 100, "noise": 0.1, "factor": 0.8},
    "circles-v2": {"generator": "circles", "n_train": 645, "n_test": 215, "noise": 0.1, "factor": 0.8},

    # Hypercube vertices: n_features / n_informative / class_sep, plus flipped labels
    "hypercube-v1": {
        "generator": "hypercube", "n_train": 300, "n_test": 100,
        "n_features": 8, "n_informative": 4, "class_sep": 8.0, "n_flipped": 40,
    },
    "hypercube-v2": {
        "generator": "hypercube", "n_train": 645, "n_test": 215,
        "n_features": 8, "n_informative": 4, "class_sep": 8.0, "n_flipped": 86,
    },

    # Periodic data: concentric annuli with alternating labels
    "disks-double": {"generator": "disks", "n_train": 80, "n_test": 15, "radii": [1.0, 1.5], "jitter": 0.2},
    "disks-double-v2": {"generator": "disks", "n_train": 105, "n_test": 20, "radii": [1.0, 2.0], "jitter": 0.1},
    "disks-triple": {"generator": "disks", "n_train": 306, "n_test": 54, "radii": [1.0, 2.0, 3.0], "jitter": 0.1},
    "disks-quadruple": {
        "generator": "disks", "n_train": 367, "n_test": 65, "radii": [1.0, 2.0, 3.0, 4.0], "jitter": 0.1,
    },
}

# CLI spelling: `gen-data moons --version v1`, `gen-data disks --preset double`
VERSIONED_GENERATORS = ("moons", "circles", "hypercube")
DISK_PRESETS = ("double", "double-v2", "triple", "quadruple")

BREASTMNIST_COUNTS = {"n_train": 546, "n_test": 78}
BREASTMNIST_SHAPE = (28, 28)

SYNTHETIC_DATASETS = ("moons-v1", "moons-v2", "circles-v1", "circles-v2", "hypercube-v1", "hypercube-v2")
PERIODIC_DATASETS = ("disks-double", "disks-double-v2", "disks-triple", "disks-quadruple")

# Lattice presets for |lambda| = 2, j = 20
LATTICE_PRESETS = {
    "fig7-pos": {"lambda": 2.0, "j": 20.0, "z_max": 1.0, "z_points": 21},
    "fig7-neg": {"lambda": -2.0, "j": 20.0, "z_max": math.pi, "z_points": 41},
}


def preset_name(generator: str, version: str = None, preset: str = None) -> str:
    """Resolve CLI generator/version/preset flags to a preset key"""
    if generator == "disks":
        return f"disks-{preset or 'double'}"
    return f"{generator}-{version or 'v1'}"
