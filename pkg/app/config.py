"""Application configuration using Pydantic Settings."""

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="GSA_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "GSA Multiverse"
    app_env: Literal["development", "production", "testing"] = "development"

    # Logging
    log_level: str = "INFO"
    log_file: Path | None = None

    # Execution
    workers: int = Field(default=1, ge=1, description="Worker threads for permutations and grids")
    output_directory: Path = Field(default=Path("./results"))
    default_seed: int = Field(default=42, ge=0, lt=2**64)

    # Permutation counts below this trigger a warning
    warn_min_permutations: int = Field(default=1000, ge=1)

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        return str(v).upper()

    @property
    def is_testing(self) -> bool:
        return self.app_env == "testing"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
