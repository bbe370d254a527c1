"""
Configuration management for the consistent-histories toolkit.
"""
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from the environment.

    Only the report directory may be overridden from the environment; every
    numerical knob comes from the run configuration file.
    """

    output_dir: Path = Field(default=Path("reports"), description="Report output directory")

    model_config = SettingsConfigDict(
        env_prefix="HISTORIES_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


class Defaults(BaseModel):
    """Numerical defaults shared by every module."""

    model_config = ConfigDict(frozen=True)

    # Consistency
    epsilon: float = 1e-8
    division_floor: float = 1e-300
    negligible_probability: float = 1e-14

    # Operator validation
    operator_tol: float = 1e-10
    density_tol: float = 1e-10

    # Capacity
    history_cap: int = 4096
    max_dim: int = 4096

    # Probabilities
    negative_probability_tol: float = 1e-12
    measurement_floor: float = 1e-15
    prune_norm: float = 1e-14

    # Robot posterior
    posterior_grid: int = 101
    credible_level: float = 0.95

    # Logging
    log_level: str = "INFO"
    log_format: str = "console"


# Global instances
settings = Settings()
defaults = Defaults()


def get_settings() -> Settings:
    """Get the global settings instance."""
    return settings


def get_defaults() -> Defaults:
    """Get the numerical defaults."""
    return defaults
