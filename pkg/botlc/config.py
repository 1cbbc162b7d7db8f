"""
Configuration management with environment variables
"""
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings from environment variables (prefix BOTLC_)"""

    model_config = SettingsConfigDict(
        env_prefix="BOTLC_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Output handling
    OUT: Path = Path("outputs")
    EMIT: str = "csv,svg,report"

    # Batch execution
    PARALLELISM: int = 1

    # Logging
    LOG_LEVEL: str = "INFO"

    # HTTP surface
    HOST: str = "127.0.0.1"
    PORT: int = 8000
    DEBUG: bool = False
    MAX_UPLOAD_KB: int = 64
    UPLOAD_DIR: Path = Path("uploads")


# Global settings instance
settings = Settings()
