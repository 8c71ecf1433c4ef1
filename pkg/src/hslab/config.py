"""Configuration management for hslab runs."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings

if TYPE_CHECKING:
    from .quad.settings import QuadSettings


class LogLevel(str, Enum):
    """Valid log levels."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class Settings(BaseSettings):
    """Process-wide defaults, read from ``HSLAB_*`` environment variables."""

    # Logging settings
    log_level: LogLevel = Field(default=LogLevel.INFO, description="Logging level")
    log_dir: str | None = Field(default=None, description="Directory for log files")
    enable_file_logging: bool = Field(
        default=False, description="Enable file logging with rotation"
    )

    # Monte Carlo settings
    mc_samples: int = Field(default=20000, description="Samples per MC integral")
    mc_seed: int = Field(default=12345, description="Seed for counter-based streams")
    mc_block_size: int = Field(default=4096, description="Samples per RNG block")
    workers: int = Field(default=1, description="Worker threads for MC blocks")
    inner_samples: int = Field(
        default=4096, description="Inner budget of nested MC mixed norms"
    )

    # Deterministic quadrature settings
    tol: float = Field(default=1e-8, description="Relative tolerance of 1-D rules")
    origin_exclusion: float = Field(
        default=1e-12, description="Radius of the excluded origin ball"
    )
    window_factor: float = Field(
        default=2.0, description="Whole-space window radius / support radius"
    )

    # Experiment grids
    psi_grid_size: int = Field(default=64, description="Intervals of the BGLS p-grid")
    theta_points: int = Field(default=9, description="Points of the default θ-grid")

    cache_max_size: int = Field(default=256, description="Oracle cache entries")
    strict_numerics: bool = Field(
        default=False, description="Exit with status 2 when numerical flags are raised"
    )

    model_config = {"env_prefix": "HSLAB_", "case_sensitive": False, "extra": "ignore"}

    @field_validator(
        "mc_samples", "mc_block_size", "workers", "cache_max_size", "psi_grid_size"
    )
    @classmethod
    def validate_positive_integers(cls, v: int) -> int:
        """Validate positive integer values."""
        if v < 1:
            raise ValueError("Value must be at least 1")
        return v

    @field_validator("mc_seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        """Philox keys are unsigned."""
        if v < 0:
            raise ValueError("Seed must be non-negative")
        return v

    @field_validator("inner_samples")
    @classmethod
    def validate_inner_samples(cls, v: int) -> int:
        """Validate the nested MC inner budget."""
        if v < 16:
            raise ValueError("Inner samples must be at least 16")
        return v

    @field_validator("theta_points")
    @classmethod
    def validate_theta_points(cls, v: int) -> int:
        """A slope fit needs at least three dilations."""
        if v < 3:
            raise ValueError("Theta grid needs at least 3 points")
        return v

    @field_validator("tol", "origin_exclusion")
    @classmethod
    def validate_small_positive(cls, v: float) -> float:
        """Validate tolerances lie in (0, 1)."""
        if not 0.0 < v < 1.0:
            raise ValueError("Tolerances must lie in (0, 1)")
        return v

    @field_validator("window_factor")
    @classmethod
    def validate_window_factor(cls, v: float) -> float:
        """The window must contain the support."""
        if v <= 1.0:
            raise ValueError("Window factor must exceed 1")
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: Any) -> str:
        """Validate and normalize log level."""
        if isinstance(v, str):
            v = v.upper()
            if v not in [level.value for level in LogLevel]:
                raise ValueError(f"Invalid log level: {v}")
        return str(v.value if isinstance(v, LogLevel) else v)

    def quad_settings(self) -> QuadSettings:
        """Build the default quadrature settings for a run."""
        from .quad.settings import McConfig, QuadSettings

        return QuadSettings(
            tol=self.tol,
            mc=McConfig(
                n_samples=self.mc_samples,
                seed=self.mc_seed,
                block_size=self.mc_block_size,
                workers=self.workers,
            ),
            window_factor=self.window_factor,
            inner_samples=self.inner_samples,
            origin_exclusion=self.origin_exclusion,
        )
