"""Unit tests for configuration management."""

import os
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from hslab.config import LogLevel, Settings
from hslab.quad.settings import QuadSettings


class TestSettings:
    """Test Settings configuration class."""

    def test_defaults(self, clean_env):
        """Test default values without any HSLAB_ variables."""
        settings = Settings(_env_file=None)

        assert settings.log_level == LogLevel.INFO
        assert settings.mc_samples == 20000
        assert settings.mc_seed == 12345
        assert settings.workers == 1
        assert settings.tol == 1e-8
        assert settings.origin_exclusion == 1e-12
        assert settings.window_factor == 2.0
        assert settings.psi_grid_size == 64
        assert settings.strict_numerics is False

    def test_env_overrides(self, quick_env):
        """Test values read from HSLAB_ environment variables."""
        settings = Settings(_env_file=None)

        assert settings.mc_samples == 4096
        assert settings.mc_seed == 7
        assert settings.mc_block_size == 1024
        assert settings.inner_samples == 64
        assert settings.psi_grid_size == 8
        assert settings.log_level == LogLevel.WARNING

    def test_case_insensitive_log_level(self, clean_env):
        """Test log level normalisation."""
        with patch.dict(os.environ, {"HSLAB_LOG_LEVEL": "debug"}):
            settings = Settings(_env_file=None)
            assert settings.log_level == LogLevel.DEBUG

    def test_invalid_log_level(self, clean_env):
        """Test rejection of unknown log levels."""
        with patch.dict(os.environ, {"HSLAB_LOG_LEVEL": "LOUD"}):
            with pytest.raises(ValidationError) as exc_info:
                Settings(_env_file=None)
            assert "Invalid log level" in str(exc_info.value)

    @pytest.mark.parametrize(
        "name,value",
        [
            ("HSLAB_MC_SAMPLES", "0"),
            ("HSLAB_WORKERS", "0"),
            ("HSLAB_MC_SEED", "-1"),
            ("HSLAB_INNER_SAMPLES", "8"),
            ("HSLAB_THETA_POINTS", "2"),
            ("HSLAB_TOL", "0"),
            ("HSLAB_TOL", "1.5"),
            ("HSLAB_WINDOW_FACTOR", "1.0"),
        ],
    )
    def test_invalid_values(self, clean_env, name, value):
        """Test validation of numeric settings."""
        with patch.dict(os.environ, {name: value}):
            with pytest.raises(ValidationError):
                Settings(_env_file=None)

    def test_quad_settings(self, quick_env):
        """Test translation into quadrature settings."""
        quad = Settings(_env_file=None).quad_settings()

        assert quad.mc.n_samples == 4096
        assert quad.mc.seed == 7
        assert quad.mc.block_size == 1024
        assert quad.inner_samples == 64
        assert quad.tol == 1e-8

    def test_quad_settings_inner_budget(self):
        """Test that a small inner budget surfaces as a validation error."""
        with pytest.raises(ValidationError) as exc_info:
            QuadSettings(inner_samples=8)
        assert "inner samples must be at least 16" in str(exc_info.value)
