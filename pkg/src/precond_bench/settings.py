"""Process-level settings loaded from environment variables or a .env file."""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SEED = 123456789


def _default_cache() -> Path:
    return Path.home() / ".cache" / "precond-bench" / "matrices"


class Settings(BaseSettings):
    """Settings read from ``PRECOND_BENCH_*`` variables."""

    model_config = SettingsConfigDict(
        env_prefix="PRECOND_BENCH_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
    )

    # Matrix cache (PRECOND_BENCH_CACHE)
    cache: Path = Field(default_factory=_default_cache, description="Directory for fetched matrices")
    offline: bool = Field(False, description="Never touch the network; use the cache only")

    # Logging
    log_level: str = "INFO"
    log_json: bool = False
    log_file: Optional[str] = None

    # Fetcher
    http_timeout_seconds: float = Field(60.0, gt=0)

    default_seed: int = DEFAULT_SEED


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the memoised settings instance."""
    return Settings()


__all__ = ["Settings", "get_settings", "DEFAULT_SEED"]
