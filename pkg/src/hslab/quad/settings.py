"""Sampler and tolerance settings shared by the quadrature engine."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator


class MethodChoice(str, Enum):
    """Override for the double-integral method."""

    AUTO = "auto"
    MC = "mc"
    NESTED = "nested"


class McConfig(BaseModel):
    """Monte Carlo sampler configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_samples: int = Field(default=20000, ge=1, description="Total samples")
    seed: int = Field(default=12345, ge=0, description="Philox key")
    pair_exponent: float | None = Field(
        default=None, description="Proposal exponent for |x-y| (default from beta)"
    )
    origin_exponent: float | None = Field(
        default=None, description="Proposal exponent for |x| (default from weights)"
    )
    block_size: int = Field(default=4096, ge=1, description="Samples per stream")
    workers: int = Field(default=1, ge=1, description="Worker threads")

    def with_seed(self, seed: int) -> McConfig:
        return self.model_copy(update={"seed": seed})


class QuadSettings(BaseModel):
    """Tolerances and sampler settings of one norm evaluation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(default=1e-8, gt=0.0, lt=1.0)
    mc: McConfig = Field(default_factory=McConfig)
    window_factor: float = Field(default=2.0, gt=1.0)
    inner_samples: int = Field(default=4096)
    origin_exclusion: float = Field(default=1e-12, gt=0.0, lt=1.0)
    method: MethodChoice = MethodChoice.AUTO

    @field_validator("inner_samples")
    @classmethod
    def validate_inner_samples(cls, v: int) -> int:
        """Nested MC needs two usable inner halves."""
        if v < 16:
            raise ValueError(f"inner samples must be at least 16, got {v}")
        return v
