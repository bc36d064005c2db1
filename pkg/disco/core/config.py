"""Application configuration settings."""

import os
from typing import Any, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    # Application info
    PROJECT_NAME: str = "disco"
    VERSION: str = "0.1.0"

    # Worker threads for property mining (the DISCO_THREADS env var)
    DISCO_THREADS: int = os.cpu_count() or 1

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "TEXT"

    # Discovery
    MAX_PROPERTY_ARITY: int = 3

    # Synthetic BK guard
    GENBK_MAX_FACTS: int = 10**8

    # Learning
    LEARN_TIMEOUT: Optional[float] = None
    LEARN_SUBSUMPTION: bool = False

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_file=".env",
        extra="ignore",
    )

    @field_validator("DISCO_THREADS", mode="before")
    def default_thread_count(cls, v: Any) -> Any:
        """Fall back to the CPU count when the variable is empty."""
        if v is None or (isinstance(v, str) and not v.strip()):
            return os.cpu_count() or 1
        return v

    @field_validator("DISCO_THREADS")
    def validate_thread_count(cls, v: int) -> int:
        """Thread count must be positive."""
        if v < 1:
            raise ValueError("DISCO_THREADS must be at least 1")
        return v

    @field_validator("LOG_LEVEL", "LOG_FORMAT", mode="before")
    def normalise_case(cls, v: Any) -> Any:
        """Accept lower-case spellings from the environment."""
        if isinstance(v, str):
            return v.strip().upper()
        return v

    @field_validator("LOG_FORMAT")
    def validate_log_format(cls, v: str) -> str:
        """Only plain text and JSON sinks exist."""
        if v not in ("TEXT", "JSON"):
            raise ValueError("LOG_FORMAT must be TEXT or JSON")
        return v

    @field_validator("MAX_PROPERTY_ARITY")
    def validate_property_arity(cls, v: int) -> int:
        """Permutation and dependency families stop at arity 3."""
        if not 1 <= v <= 3:
            raise ValueError("MAX_PROPERTY_ARITY must be between 1 and 3")
        return v

    @field_validator("LEARN_TIMEOUT", mode="before")
    def empty_timeout_is_unbounded(cls, v: Any) -> Any:
        """An empty or non-positive timeout means no budget."""
        if v is None or (isinstance(v, str) and not v.strip()):
            return None
        if float(v) <= 0:
            return None
        return v


# Create settings instance
settings = Settings()
