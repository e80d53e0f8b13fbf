# app/core/config.py

"""
Runtime settings.

Responsibility:
- Load settings from environment variables.
- Provide a single cached entrypoint `get_settings()` for services,
  routers and the CLI.

Environment variable defaults:

- NEUROEVO_OUTPUT_DIR     : trace root directory (default "runs")
- NEUROEVO_DATABASE_URL   : run registry (default "sqlite:///./neuroevo.db")
- NEUROEVO_BF_CAP         : max symmetry group size for brute force (default 10^7)
- NEUROEVO_WORKERS        : parallel runs per experiment (default 1)
- NEUROEVO_LOG_LEVEL      : logging level name (default "INFO")
- NEUROEVO_ALPHA          : significance level for the tests (default 0.05)
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

DEFAULT_BRUTE_FORCE_CAP = 10_000_000


@dataclass(frozen=True)
class Settings:
    output_dir: str = "runs"
    database_url: str = "sqlite:///./neuroevo.db"
    brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP
    workers: int = 1
    log_level: str = "INFO"
    significance_level: float = 0.05

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)


# ---------------------------------------------------------------------------
# Environment loading helpers
# ---------------------------------------------------------------------------

def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        return int(float(value))
    except ValueError as exc:
        raise RuntimeError(f"{name} must be an integer, got {value!r}") from exc


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        return float(value)
    except ValueError as exc:
        raise RuntimeError(f"{name} must be a number, got {value!r}") from exc


def load_settings_from_env() -> Settings:
    """
    Build Settings from NEUROEVO_* environment variables.

    Raises RuntimeError on malformed numeric values so misconfiguration is
    obvious at startup.
    """
    workers = _env_int("NEUROEVO_WORKERS", 1)
    if workers < 1:
        raise RuntimeError("NEUROEVO_WORKERS must be >= 1")

    alpha = _env_float("NEUROEVO_ALPHA", 0.05)
    if not 0.0 < alpha < 1.0:
        raise RuntimeError("NEUROEVO_ALPHA must lie in (0, 1)")

    return Settings(
        output_dir=os.getenv("NEUROEVO_OUTPUT_DIR", "runs"),
        database_url=os.getenv("NEUROEVO_DATABASE_URL", "sqlite:///./neuroevo.db"),
        brute_force_cap=_env_int("NEUROEVO_BF_CAP", DEFAULT_BRUTE_FORCE_CAP),
        workers=workers,
        log_level=os.getenv("NEUROEVO_LOG_LEVEL", "INFO").upper(),
        significance_level=alpha,
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    FastAPI dependency target and CLI entrypoint for settings.
    """
    return load_settings_from_env()

