"""Unit tests for the semi-analytic log-cusp integrals."""

import math

import pytest

from hslab.exceptions import DivergentIntegralError
from hslab.model import Domain, InequalityParams
from hslab.norms import NormKind, NormSpec, gagliardo_seminorm
from hslab.oracles import (
    angular_integral,
    blowup_radial_factor,
    configure_oracle_cache,
    gagliardo_oracle_applies,
    log_cusp_gagliardo_power,
    log_cusp_target_power,
    oracle_cache,
    tail_integral,
)
from hslab.quad.settings import MethodChoice, QuadSettings
from hslab.trialfuncs import dilate, log_cusp, smooth_bump


class TestLogCuspOracle:
    """Test the log-cusp reductions."""

    def test_target_closed_form(self):
        """Test ω₀ Γ(q+1)/(1 - mu)^{q+1} for q = 2, mu = 1/2."""
        assert log_cusp_target_power(2.0, 0.5).value == pytest.approx(32.0)

    def test_angular_divergence(self):
        """Test the convergence conditions of the angular integral."""
        with pytest.raises(DivergentIntegralError):
            angular_integral(2.0, 0.5, -1.0)
        with pytest.raises(DivergentIntegralError):
            angular_integral(1.0, 2.5, 0.0)

    def test_tail_needs_decay(self):
        """Test that the exterior part needs beta - alpha > 1."""
        with pytest.raises(DivergentIntegralError):
            tail_integral(2.0, 0.5, 0.0, 0.0)

    def test_finite_near_threshold(self):
        """Test finiteness at beta = 1 + λp for λ = 1/2, p = 3/2."""
        result = log_cusp_gagliardo_power(1.5, 1.75)
        assert math.isfinite(result.value)
        assert result.value > 0.0

    def test_square_part_matches_nested_quadrature(self):
        """Test the reduction against direct nested quadrature on (-1, 1)²."""
        oracle = log_cusp_gagliardo_power(2.0, 0.5, include_tail=False).value
        spec = NormSpec(
            kind=NormKind.GAGLIARDO,
            params=InequalityParams(d=1, p=2.0, beta=0.5),
            settings=QuadSettings(tol=1e-8, method=MethodChoice.NESTED),
        )
        nested = gagliardo_seminorm(log_cusp(1), spec, Domain.ball(1, 1.0))
        assert nested.value**2 == pytest.approx(oracle, rel=1e-5)

    def test_cached(self):
        """Test that repeated exponent tuples hit the cache."""
        before = oracle_cache().get_stats()
        first = log_cusp_gagliardo_power(1.25, 1.6)
        second = log_cusp_gagliardo_power(1.25, 1.6)
        after = oracle_cache().get_stats()
        assert first is second
        assert after.hits == before.hits + 1

    def test_resize(self):
        """Test that resizing replaces the shared cache."""
        configure_oracle_cache(8)
        try:
            assert oracle_cache().max_size == 8
            assert oracle_cache().get_stats().size == 0
        finally:
            configure_oracle_cache(256)
        assert oracle_cache().max_size == 256

    def test_applies(self):
        """Test the coverage of the reduction."""
        assert gagliardo_oracle_applies(log_cusp(1), Domain.whole_space(1))
        assert gagliardo_oracle_applies(dilate(log_cusp(1), 2.0), Domain.ball(1, 2.0))
        assert not gagliardo_oracle_applies(log_cusp(1), Domain.ball(1, 2.0))
        assert not gagliardo_oracle_applies(smooth_bump(1), Domain.whole_space(1))


class TestBlowupRadialFactor:
    """Test the radial factor of the blow-up family."""

    def test_matches_general_factor(self):
        """Test 1/(2 + alpha - beta) at beta = 1 + λp."""
        lam, p = 0.5, 1.5
        assert blowup_radial_factor(lam, p) == pytest.approx(1.0 / (2.0 - (1 + lam * p)))

    def test_grows_like_inverse_gap(self):
        """Test growth like 1/|1 - λp| towards p = 1/λ."""
        gaps = [0.1, 0.01, 0.001]
        values = [blowup_radial_factor(0.5, 2.0 - 2.0 * g) for g in gaps]
        for gap, value in zip(gaps, values, strict=True):
            assert value * gap == pytest.approx(1.0)

    def test_divergent(self):
        """Test the divergence at λp >= 1."""
        with pytest.raises(DivergentIntegralError) as exc_info:
            blowup_radial_factor(0.5, 2.0)
        assert exc_info.value.abscissa == 2.0
