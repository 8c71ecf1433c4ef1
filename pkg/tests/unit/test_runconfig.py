"""Unit tests for run configuration loading."""

import json

import pytest
from pydantic import ValidationError

from hslab.cli.runconfig import (
    Command,
    DomainConfig,
    FunctionConfig,
    PsiConfig,
    QuadConfig,
    WeightConfig,
    load_config,
)
from hslab.config import Settings
from hslab.exceptions import ConfigError, MissingExponentError
from hslab.gls import DegeneratePsi, ScaledPsi
from hslab.model import DomainKind

HARDY = {"d": 1, "p": 2.0, "q": 2.0, "beta": 1.5, "mu": 0.5}


class TestLoadConfig:
    """Test merging of config files and flag overrides."""

    def test_overrides_only(self):
        """Test a config built from dotted overrides alone."""
        config = load_config(None, {"command": "check-balance", "params": HARDY})
        assert config.command is Command.CHECK_BALANCE
        assert config.params.beta == 1.5
        assert config.format == "json"

    def test_flags_win(self, tmp_path):
        """Test that overrides replace file values."""
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps({"command": "envelope", "quad": {"seed": 3, "samples": 100}})
        )
        config = load_config(path, {"quad.seed": 7, "quad.samples": None})
        assert config.quad.seed == 7
        assert config.quad.samples == 100

    def test_lambda_alias(self):
        """Test that the lambda key reaches the constants section."""
        config = load_config(None, {"command": "estimate-constant", "constants.lambda": 0.25})
        assert config.constants.lam == 0.25
        assert config.dump()["constants"]["lambda"] == 0.25

    def test_missing_params(self):
        """Test that balance checks need a params section."""
        with pytest.raises(ValidationError):
            load_config(None, {"command": "check-balance"})

    def test_missing_exponent(self):
        """Test that the mixed kind needs r in a balance check."""
        with pytest.raises(MissingExponentError) as exc_info:
            load_config(
                None, {"command": "check-balance", "kind": "mixed", "params": HARDY}
            )
        assert exc_info.value.exponent == "r"

    def test_unknown_field(self):
        """Test that unknown keys are rejected."""
        with pytest.raises(ValidationError):
            load_config(None, {"command": "envelope", "quad.sample": 10})

    def test_unreadable_file(self, tmp_path):
        """Test missing and malformed files."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json", {})
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(bad, {})


class TestSections:
    """Test section builders."""

    def test_quad_defaults_from_settings(self, quick_env):
        """Test that unset quadrature fields come from HSLAB_ settings."""
        quad = QuadConfig(seed=0, tol=1e-6).build(Settings(_env_file=None))
        assert quad.mc.seed == 0
        assert quad.mc.n_samples == 4096
        assert quad.mc.block_size == 1024
        assert quad.inner_samples == 64
        assert quad.tol == 1e-6

    def test_function_options(self):
        """Test dilation, amplitude and shift options."""
        u = FunctionConfig(family="smooth_bump", theta=2.0, amplitude=3.0).build()
        assert u.support_radius == pytest.approx(2.0)
        assert u.amplitude == 3.0
        shifted = FunctionConfig(family="linear_ramp", shift=1.0).build()
        assert not shifted.vanishes_at_infinity

    def test_product_needs_two_factors(self):
        """Test the factor count of products."""
        config = FunctionConfig(family="product", factors=[FunctionConfig()])
        with pytest.raises(ConfigError):
            config.build()
        pair = FunctionConfig(family="product", factors=[FunctionConfig()] * 2).build()
        assert pair.d == 2

    def test_domain(self):
        """Test domain construction and required fields."""
        assert DomainConfig(kind=DomainKind.BOX, lo=0.0, hi=1.0).build(1).kind is (
            DomainKind.BOX
        )
        with pytest.raises(ConfigError):
            DomainConfig(kind=DomainKind.BALL).build(1)

    def test_tabulated_weight(self):
        """Test log-log interpolation of weight tables."""
        weight = WeightConfig(kind="table", radius=[1.0, 2.0], values=[1.0, 0.5]).build()
        assert float(weight(1.5)) == pytest.approx(1.0 / 1.5)
        with pytest.raises(ConfigError):
            WeightConfig(kind="table", radius=[1.0], values=[1.0]).build()
        with pytest.raises(ConfigError):
            WeightConfig(kind="table", radius=[1.0, 2.0], values=[1.0, 0.0]).build()

    def test_psi(self):
        """Test ψ construction."""
        assert isinstance(PsiConfig(kind="degenerate", r=3.0).build(), DegeneratePsi)
        upper = PsiConfig.model_validate(
            {"kind": "upper", "lambda": 0.5, "base": {"a": 1.0, "b": 1.8}}
        ).build()
        assert isinstance(upper, ScaledPsi)
        with pytest.raises(ConfigError):
            PsiConfig(kind="upper").build()
