"""Pytest configuration and shared fixtures."""

import os
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from hslab.model import InequalityParams  # noqa: E402
from hslab.quad.settings import McConfig, QuadSettings  # noqa: E402


@pytest.fixture
def clean_env():
    """Fixture to provide clean environment variables."""
    # Store original environment
    original_env = os.environ.copy()

    # Clear hslab environment variables
    hslab_keys = [k for k in os.environ if k.startswith("HSLAB_")]
    for key in hslab_keys:
        del os.environ[key]

    yield

    # Restore original environment
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture
def quick_env(clean_env):
    """Fixture to provide small sampler budgets through the environment."""
    env_vars = {
        "HSLAB_MC_SAMPLES": "4096",
        "HSLAB_MC_SEED": "7",
        "HSLAB_MC_BLOCK_SIZE": "1024",
        "HSLAB_INNER_SAMPLES": "64",
        "HSLAB_PSI_GRID_SIZE": "8",
        "HSLAB_LOG_LEVEL": "WARNING",
    }

    with patch.dict(os.environ, env_vars):
        yield env_vars


@pytest.fixture
def quad_settings():
    """Deterministic-rule tolerances with a small Monte Carlo budget."""
    return QuadSettings(
        tol=1e-9,
        mc=McConfig(n_samples=8192, seed=11, block_size=2048),
        inner_samples=64,
    )


@pytest.fixture
def hardy_params():
    """A balanced one-dimensional ordinary tuple: (1 - 0.5)/2 = (2 - 1.5)/2."""
    return InequalityParams(d=1, p=2.0, q=2.0, beta=1.5, mu=0.5)
