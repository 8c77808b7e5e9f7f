"""
Library and CLI configuration using Pydantic BaseSettings
"""

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError as PydanticValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .utils.errors import ConfigurationError


class Settings(BaseSettings):
    """Settings from KERRKIT_* environment variables, .env and config files"""

    model_config = SettingsConfigDict(
        env_prefix="KERRKIT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Paths
    data_dir: Path = Path("data")

    # Application Configuration
    log_level: str = "INFO"
    seed: int = 0
    workers: int = 1  # 0 means all cores

    # Fock-space truncation
    truncation_tol: float = 1e-12
    max_fock_dim: int = 4096
    oracle_dim_budget: int = 1500

    # Feature scaling
    phase_span: float = math.pi
    amplitude_box: float = 1.0

    # Kernels / SVM
    psd_floor_factor: float = 1e-8
    smo_tol: float = 1e-8
    smo_max_passes: int = 200000
    cv_folds: int = 5

    # Archive download
    breastmnist_url: str = "https://zenodo.org/record/6496656/files/breastmnist.npz?download=1"
    http_timeout: float = 60.0

    @property
    def n_jobs(self) -> int:
        """Worker count in joblib convention"""
        return -1 if self.workers <= 0 else self.workers


_active: Optional[Settings] = None


@lru_cache(maxsize=1)
def _default_settings() -> Settings:
    return Settings()


def get_settings() -> Settings:
    """Process-wide settings instance (the activated one, else env/defaults)"""
    return _active if _active is not None else _default_settings()


def activate_settings(settings: Optional[Settings]) -> None:
    """Make resolved settings the process-wide instance; None restores env/defaults"""
    global _active
    _active = settings


def load_settings(config_path: Optional[Path] = None, **overrides: Any) -> Settings:
    """
    Resolve settings with CLI flags > config file > environment > defaults

    Args:
        config_path: Optional JSON file holding settings fields
        **overrides: Explicit values (None entries are ignored)

    Returns:
        Resolved Settings instance
    """

    values: Dict[str, Any] = {}
    if config_path is not None:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {config_path}", config_key="config")
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"Config file is not valid JSON: {e.msg}",
                config_key="config",
                details={"offset": e.pos},
            )
        if not isinstance(loaded, dict):
            raise ConfigurationError("Config file must hold a JSON object", config_key="config")
        values.update(loaded)

    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except PydanticValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"])
        raise ConfigurationError(f"Invalid setting '{key}': {first['msg']}", config_key=key)
