import numpy as np
import pytest

from kerrkit.config import Settings, activate_settings
from kerrkit.services.datasets import make_circles, make_moons


@pytest.fixture(autouse=True)
def settings(tmp_path, monkeypatch):
    """Fresh settings per test with a temporary data directory"""
    for key in ("KERRKIT_SEED", "KERRKIT_WORKERS", "KERRKIT_LOG_LEVEL", "KERRKIT_DATA_DIR"):
        monkeypatch.delenv(key, raising=False)
    active = Settings(data_dir=tmp_path / "data", _env_file=None)
    activate_settings(active)
    yield active
    activate_settings(None)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_moons():
    return make_moons(45, 15, 0.2, seed=3, name="moons-small")


@pytest.fixture
def small_circles():
    return make_circles(45, 15, 0.05, 0.5, seed=5, name="circles-small")
