"""Integration tests for the acceptance criteria of verify-all."""

import pytest

from hslab.cli.acceptance import (
    balance_equivalence,
    blowup_rate,
    bgls_recovery,
    closed_form_oracle,
    dilation_invariance,
    envelope_corollary,
    factorization,
    remark_threshold_check,
    weak_sharpness,
)


class TestExactCriteria:
    """Criteria checked against exact or closed-form oracles."""

    def test_closed_form_oracle(self, quad_settings):
        """Test adaptive quadrature against the Gamma closed form."""
        outcome = closed_form_oracle(quad_settings)
        assert outcome.passed, outcome.detail

    def test_balance_equivalence(self):
        """Test that holds agrees with exact exponent equality."""
        outcome = balance_equivalence(samples=100, seed=5)
        assert outcome.passed
        assert outcome.detail["balanced"] >= 50

    def test_envelope_corollary(self):
        """Test that power weights are their own envelopes."""
        outcome = envelope_corollary()
        assert outcome.passed, outcome.detail
        assert outcome.to_dict()["criterion"] == 10


@pytest.mark.slow
class TestNumericalCriteria:
    """Criteria that need full quadrature runs."""

    def test_dilation_invariance(self, quad_settings):
        """Test invariance of the quotient under dilation."""
        assert dilation_invariance(quad_settings).passed

    def test_blowup_rate(self, quad_settings):
        """Test the fitted blow-up rate of the log cusp."""
        outcome = blowup_rate(quad_settings)
        assert outcome.passed, outcome.detail["fitted_rate"]

    def test_remark_threshold(self, quad_settings):
        """Test the shifted threshold with a nonzero pair weight."""
        assert remark_threshold_check(quad_settings).passed

    def test_bgls_recovery(self, quad_settings):
        """Test that degenerate and natural ψ recover their norms."""
        assert bgls_recovery(quad_settings).passed

    def test_factorization(self, quad_settings):
        """Test factorisation and order dependence of mixed norms."""
        assert factorization(quad_settings).passed

    def test_weak_sharpness(self, quad_settings):
        """Test growth of the ratio towards 1/λ."""
        assert weak_sharpness(quad_settings, grid_size=8).passed
