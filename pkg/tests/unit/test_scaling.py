"""Unit tests for dilation experiments, balance checks and envelopes."""

import math

import numpy as np
import pytest

from hslab.exceptions import DomainError, ParameterError, ScalingAbortedError
from hslab.model import Domain, InequalityParams, WeightSpec
from hslab.norms import NormKind, NormSpec
from hslab.scaling import (
    Direction,
    EnvelopeRole,
    EnvelopeSpec,
    FunctionalKind,
    Regime,
    check_necessary_condition,
    check_weighted_conditions,
    default_theta_grid,
    fit_scaling,
    predicted_exponent,
    weight_envelope,
)
from hslab.trialfuncs import smooth_bump

PARAMS = InequalityParams(
    d=2, p=2.0, q=4.0, r=3.0, s=2.0, alpha1=0.5, alpha2=0.25, beta=1.5, mu=1.0
)


class TestPredictedExponent:
    """Test closed-form homogeneity exponents."""

    @pytest.mark.parametrize(
        "kind,expected",
        [
            (FunctionalKind.TARGET, (2 - 1.0) / 4.0),
            (FunctionalKind.MIXED_TARGET, (2 - 1.0) / 3.0),
            (FunctionalKind.GAGLIARDO, (4 + 0.75 - 1.5) / 2.0),
            (FunctionalKind.MIXED, (2 + 0.25 - 1.5) / 2.0 + (2 + 0.5) / 4.0),
            (FunctionalKind.GRADIENT, (2 - 1.0) / 2.0 - 1.0),
        ],
    )
    def test_exponents(self, kind, expected):
        """Test each functional's exponent."""
        assert predicted_exponent(kind, PARAMS) == pytest.approx(expected)

    def test_surface(self):
        """Test (m - mu)/q for surfaces."""
        params = InequalityParams(d=3, q=2.0, mu=0.5)
        assert predicted_exponent("surface", params, m=2) == pytest.approx(0.75)
        with pytest.raises(DomainError):
            predicted_exponent("surface", params, m=3)

    def test_unknown_kind(self):
        """Test rejection of unknown functionals."""
        with pytest.raises(ParameterError):
            predicted_exponent("bgls", PARAMS)


class TestFitScaling:
    """Test dilation experiments."""

    def test_target_slope(self, quad_settings):
        """Test the fitted target slope of a bump on the line."""
        params = InequalityParams(d=1, q=2.0, mu=0.5)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad_settings)
        report = fit_scaling("target", smooth_bump(1), spec, Domain.whole_space(1))
        assert report.predicted_slope == pytest.approx(0.25)
        assert abs(report.residual) < 1e-6
        assert report.r_squared == pytest.approx(1.0)
        assert report.accepted
        assert len(report.values) == len(default_theta_grid())

    def test_bounded_domain(self, quad_settings):
        """Test that bounded domains are refused."""
        params = InequalityParams(d=1, q=2.0)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad_settings)
        with pytest.raises(DomainError):
            fit_scaling("target", smooth_bump(1), spec, Domain.ball(1, 1.0))

    @pytest.mark.parametrize(
        "grid", [[1.0, 8.0], [1.0, 4.0, 2.0, 16.0], [1.0, 2.0, 4.0], [0.0, 1.0, 8.0]]
    )
    def test_invalid_grid(self, quad_settings, grid):
        """Test grid validation."""
        params = InequalityParams(d=1, q=2.0)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad_settings)
        with pytest.raises(ParameterError):
            fit_scaling("target", smooth_bump(1), spec, Domain.whole_space(1), grid)

    def test_degenerate_data(self, quad_settings):
        """Test that an identically zero functional is flagged, not fitted."""
        params = InequalityParams(d=1, q=2.0)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad_settings)
        u = smooth_bump(1).scaled(0.0)
        report = fit_scaling("target", u, spec, Domain.whole_space(1))
        assert "degenerate_data" in report.flags
        assert not report.accepted
        assert math.isnan(report.fitted_slope)

    def test_aborted_with_partial_report(self, quad_settings):
        """Test that a failing evaluation aborts with the partial report."""
        params = InequalityParams(d=1, q=2.0, mu=1.5)
        spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad_settings)
        with pytest.raises(ScalingAbortedError) as exc_info:
            fit_scaling("target", smooth_bump(1), spec, Domain.whole_space(1))
        assert exc_info.value.partial.values == []
        assert "theta" in str(exc_info.value)


class TestNecessaryCondition:
    """Test the balance check."""

    def test_holds(self, hardy_params):
        """Test a balanced tuple."""
        condition = check_necessary_condition("ordinary", hardy_params)
        assert condition.holds
        assert condition.residual == 0.0
        assert condition.lhs_exponent == condition.rhs_exponent == 0.25

    def test_fails(self):
        """Test an unbalanced tuple."""
        params = InequalityParams(d=1, p=2.0, q=2.0, beta=1.25, mu=0.5)
        condition = check_necessary_condition("ordinary", params)
        assert not condition.holds
        assert condition.residual == pytest.approx(0.25 - 0.375)


class TestEnvelope:
    """Test weight envelopes."""

    @pytest.mark.parametrize("regime", list(Regime))
    @pytest.mark.parametrize("role", list(EnvelopeRole))
    def test_power_weight_is_its_own_envelope(self, regime, role):
        """Test that pure powers are invariant under their own normalisation."""
        exponent = 0.5
        weight = WeightSpec.power(-exponent if role is EnvelopeRole.PAIR else exponent)
        spec = EnvelopeSpec(weight, exponent, regime, role)
        z = [0.25, 1.0, 4.0]
        table = weight_envelope(spec, z)
        np.testing.assert_allclose(table.values, weight(np.asarray(z)), rtol=1e-12)
        assert not table.flags

    def test_direction_defaults(self):
        """Test that pair envelopes default to sup and the others to inf."""
        weight = WeightSpec.power(0.5)
        assert EnvelopeSpec(weight, 0.5, role=EnvelopeRole.PAIR).resolved_direction is (
            Direction.SUP
        )
        assert EnvelopeSpec(weight, 0.5).resolved_direction is Direction.INF

    def test_identically_zero(self):
        """Test the identically zero flag."""
        spec = EnvelopeSpec(WeightSpec.tabulated(np.zeros_like), 0.5)
        table = weight_envelope(spec, [0.5, 1.0])
        assert "identically_zero" in table.flags

    def test_non_integrable(self):
        """Test the flag for envelopes decaying like |z|^{-d} or faster."""
        spec = EnvelopeSpec(WeightSpec.power(1.5), 1.5, d=1)
        table = weight_envelope(spec, [0.5, 1.0])
        assert "non_integrable" in table.flags

    def test_rows(self):
        """Test the tabular payload."""
        spec = EnvelopeSpec(WeightSpec.power(0.5), 0.5)
        payload = weight_envelope(spec, [1.0]).to_dict()
        assert payload["table"] == [{"z": 1.0, "value": pytest.approx(1.0)}]

    def test_grid_outside_regime(self):
        """Test that explicit grids must stay in their regime."""
        with pytest.raises(ParameterError):
            EnvelopeSpec(WeightSpec.power(0.5), 0.5, theta_grid=(0.5, 2.0))

    def test_invalid_points(self):
        """Test that envelope points must be positive."""
        spec = EnvelopeSpec(WeightSpec.power(0.5), 0.5)
        with pytest.raises(ParameterError):
            weight_envelope(spec, [0.0, 1.0])


class TestWeightedConditions:
    """Test the sufficient conditions for general weights."""

    def test_power_case_is_equality(self):
        """Test that matched exponents give two equalities."""
        params = InequalityParams(d=1, p=2.0, q=2.0)
        result = check_weighted_conditions(0.5, 0.5, 0.0, 0.0, 0.5, 0.5, params)
        assert result.cond_a and result.cond_b
        assert result.residual_a == result.residual_b == 0.0
        assert result.equality_case

    def test_strict_inequalities(self):
        """Test a heavier weight at infinity."""
        params = InequalityParams(d=1, p=2.0, q=2.0)
        result = check_weighted_conditions(0.5, 0.75, 0.0, 0.0, 0.5, 0.5, params)
        assert result.cond_a and result.cond_b
        assert result.residual_b == pytest.approx(-0.125)
        assert not result.equality_case

    def test_infinity_rhs(self):
        """Test that the flag selects the exponents at infinity."""
        params = InequalityParams(d=1, p=2.0, q=2.0)
        near = check_weighted_conditions(0.5, 0.5, 0.0, 0.0, 0.5, 0.0, params)
        far = check_weighted_conditions(
            0.5, 0.5, 0.0, 0.0, 0.5, 0.0, params, use_infinity_rhs=True
        )
        assert near.residual_b == 0.0
        assert far.residual_b == pytest.approx(-0.25)
        assert far.cond_b
