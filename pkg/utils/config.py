"""
⚙️ Settings for spincyl
=======================

Numerical steps and tolerances shared by every engine. Values come from
``SPINCYL_*`` environment variables (or a ``.env`` file) and fall back to the
defaults below.
"""

from functools import lru_cache
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """⚙️ Global numerical configuration"""

    model_config = SettingsConfigDict(env_prefix="SPINCYL_", extra="ignore")

    # finite differences and ODEs
    fd_step: float = 1e-3
    ode_step: float = 1e-3

    # tolerances
    tau_frame: float = 1e-10
    curvature_tol: float = 1e-4
    precondition_tol: float = 1e-6
    killing_tol: float = 1e-3
    tau_u: float = 1e-9
    tau_cluster: float = 1e-7
    tau_root: float = 1e-9
    tau_tr: float = 1e-9

    # sampling
    signature_samples: int = 32
    window_margin: float = 0.1
    max_workers: int = 4
    seed: int = 0

    log_level: str = "INFO"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance"""
    return Settings()


def resolve(name: str, value: Optional[Any]) -> Any:
    """Return ``value`` unless it is None, else the configured default for ``name``"""
    if value is not None:
        return value
    return getattr(get_settings(), name)
