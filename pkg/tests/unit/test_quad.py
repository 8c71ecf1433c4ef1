"""Unit tests for the quadrature engine."""

import math

import numpy as np
import pytest

from hslab.exceptions import ConfigError, ParameterError
from hslab.model import Domain, InequalityParams
from hslab.quad import (
    McConfig,
    QuadFlag,
    QuadMethod,
    QuadratureResult,
    combine_sum,
    integrate_1d_singular,
    integrate_radial,
    mc_double_integral,
    mc_nested_integral,
    mc_single_integral,
)
from hslab.quad.rng import block_generator, block_sizes, sphere_area


class TestAdaptive:
    """Test graded adaptive quadrature."""

    def test_endpoint_singularity(self):
        """Test ∫₀¹ x^{-1/2} dx = 2."""
        result = integrate_1d_singular(lambda x: x**-0.5, 0.0, 1.0, (0.0,), 1e-12)
        assert result.value == pytest.approx(2.0, rel=1e-10)
        assert result.method is QuadMethod.ADAPTIVE_1D
        assert not result.flags

    def test_interior_singularity(self):
        """Test a log singularity inside the interval."""
        result = integrate_1d_singular(
            lambda x: np.abs(np.log(np.abs(x))), -1.0, 1.0, (0.0,), 1e-12
        )
        assert result.value == pytest.approx(2.0, rel=1e-10)

    def test_infinite_upper_limit(self):
        """Test ∫₀^∞ e^{-x} dx = 1."""
        result = integrate_1d_singular(lambda x: np.exp(-x), 0.0, math.inf)
        assert result.value == pytest.approx(1.0, rel=1e-9)

    def test_invalid_limits(self):
        """Test rejection of reversed or infinite lower limits."""
        with pytest.raises(ParameterError):
            integrate_1d_singular(np.ones_like, 1.0, 0.0)
        with pytest.raises(ParameterError):
            integrate_1d_singular(np.ones_like, -math.inf, 0.0)

    def test_radial_volume(self):
        """Test the area of the unit disc."""
        result = integrate_radial(np.ones_like, 2, 1.0)
        assert result.value == pytest.approx(math.pi, rel=1e-12)
        assert result.method is QuadMethod.POLAR_RADIAL

    def test_radial_origin_tail(self):
        """Test that the excluded ball is restored from the local power law."""
        result = integrate_radial(
            lambda rho: rho**-0.75, 1, 1.0, 1e-12, origin_exclusion=1e-3
        )
        # 2 ∫₀¹ ρ^{-3/4} dρ
        assert result.value == pytest.approx(8.0, rel=1e-9)

    def test_radial_explicit_tail(self):
        """Test that a supplied tail replaces the extrapolation."""
        result = integrate_radial(
            np.ones_like,
            1,
            1.0,
            origin_exclusion=0.5,
            origin_tail=lambda eps: eps,
        )
        assert result.value == pytest.approx(2.0, rel=1e-12)


class TestResult:
    """Test error propagation of quadrature results."""

    def test_power(self):
        """Test first-order propagation through a power."""
        r = QuadratureResult(4.0, 0.4, QuadMethod.MC_PAIRS, 100)
        half = r.power(0.5)
        assert half.value == pytest.approx(2.0)
        assert half.error_estimate == pytest.approx(0.1)

    def test_power_of_infinity(self):
        """Test that infinite values stay infinite."""
        r = QuadratureResult(math.inf, 0.0, QuadMethod.CLOSED_FORM, 1)
        assert r.power(0.5).value == math.inf

    def test_combine_sum(self):
        """Test that sums add values, errors and flags."""
        a = QuadratureResult(1.0, 0.1, QuadMethod.ADAPTIVE_1D, 10, flags=("x",))
        b = QuadratureResult(2.0, 0.2, QuadMethod.ADAPTIVE_1D, 20, flags=("x", "y"))
        total = combine_sum([a, b], QuadMethod.ADAPTIVE_1D)
        assert total.value == pytest.approx(3.0)
        assert total.error_estimate == pytest.approx(0.3)
        assert total.evaluations == 30
        assert total.flags == ("x", "y")


class TestRandomStreams:
    """Test counter-based streams."""

    def test_block_streams_are_reproducible(self):
        """Test that a block stream depends on seed and index only."""
        a = block_generator(5, 3).random(4)
        b = block_generator(5, 3).random(4)
        c = block_generator(5, 4).random(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_block_sizes(self):
        """Test splitting of the sample budget."""
        assert block_sizes(10, 4) == [4, 4, 2]

    def test_sphere_area(self):
        """Test ω₀ = 2 and ω₂ = 4π."""
        assert sphere_area(1) == pytest.approx(2.0)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi)


class TestMonteCarlo:
    """Test importance-sampled Monte Carlo."""

    def test_single_constant(self):
        """Test that a uniform proposal integrates constants exactly."""
        cfg = McConfig(n_samples=1000, seed=3)
        result = mc_single_integral(
            lambda x: np.ones(len(x)), Domain.ball(2, 1.0), cfg
        )
        assert result.value == pytest.approx(math.pi, rel=1e-12)
        assert result.seed == 3

    def test_double_box(self):
        """Test ∫∫_{[0,1]²} dx dy = 1 within five standard errors."""
        cfg = McConfig(n_samples=20000, seed=1)
        params = InequalityParams(d=1, p=2.0)
        result = mc_double_integral(
            lambda x, y: np.ones(len(x)), params, Domain.box(1, 0.0, 1.0), cfg
        )
        assert abs(result.value - 1.0) < 5 * result.error_estimate
        assert result.method is QuadMethod.MC_PAIRS

    def test_workers_do_not_change_results(self):
        """Test that results are identical for any number of workers."""
        params = InequalityParams(d=2, p=2.0, beta=1.0)
        domain = Domain.ball(2, 1.0)

        def kernel(x, y):
            return np.linalg.norm(x - y, axis=1) ** -1.0

        serial = mc_double_integral(
            kernel, params, domain, McConfig(n_samples=8000, seed=9, block_size=1000)
        )
        threaded = mc_double_integral(
            kernel,
            params,
            domain,
            McConfig(n_samples=8000, seed=9, block_size=1000, workers=4),
        )
        assert serial.value == threaded.value
        assert serial.error_estimate == threaded.error_estimate

    def test_divergent_double_integral(self):
        """Test rejection of 2d + alpha - beta <= 0."""
        params = InequalityParams(d=1, beta=2.0)
        with pytest.raises(ParameterError):
            mc_double_integral(
                lambda x, y: np.ones(len(x)),
                params,
                Domain.box(1, 0.0, 1.0),
                McConfig(),
            )

    def test_invalid_proposal_exponent(self):
        """Test that proposal exponents must lie in [0, d)."""
        params = InequalityParams(d=1)
        with pytest.raises(ConfigError):
            mc_double_integral(
                lambda x, y: np.ones(len(x)),
                params,
                Domain.box(1, 0.0, 1.0),
                McConfig(pair_exponent=1.0),
            )

    def test_nested_inner_budget(self):
        """Test the minimum inner sample budget."""
        with pytest.raises(ConfigError):
            mc_nested_integral(
                lambda x, y: np.ones(len(x)),
                lambda y: np.ones(len(y)),
                1.0,
                Domain.box(1, 0.0, 1.0),
                McConfig(),
                inner_samples=8,
            )

    def test_nonfinite_samples_flag(self):
        """Test that infinite sample weights are dropped and flagged."""
        cfg = McConfig(n_samples=1000, seed=2)
        result = mc_single_integral(
            lambda x: np.where(x[:, 0] > 0.5, np.inf, 1.0), Domain.box(1, 0.0, 1.0), cfg
        )
        assert QuadFlag.NONFINITE_SAMPLES.value in result.flags
        assert math.isfinite(result.value)
