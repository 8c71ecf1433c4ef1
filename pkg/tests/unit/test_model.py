"""Unit tests for inequality parameters, weights and domains."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from hslab.exceptions import DomainError, MissingExponentError
from hslab.model import (
    Domain,
    DomainKind,
    InequalityKind,
    InequalityParams,
    ValidationMode,
    WeightSpec,
    WeightTriple,
    balance_condition,
    exact_predicted_exponents,
    validate_params,
)


class TestInequalityParams:
    """Test exponent validation."""

    def test_lambda_alias(self):
        """Test that lambda is accepted under its JSON name."""
        params = InequalityParams.model_validate({"d": 1, "lambda": 0.25})
        assert params.lam == 0.25

    @pytest.mark.parametrize("field", ["p", "q", "r", "s"])
    def test_exponent_below_one(self, field):
        """Test rejection of exponents below 1."""
        with pytest.raises(ValidationError):
            InequalityParams(d=1, **{field: 0.5})

    def test_non_finite_weight(self):
        """Test rejection of infinite weight exponents."""
        with pytest.raises(ValidationError):
            InequalityParams(d=1, beta=math.inf)

    def test_unknown_field(self):
        """Test that unknown keys are rejected."""
        with pytest.raises(ValidationError):
            InequalityParams.model_validate({"d": 1, "gamma": 1.0})

    def test_require_names_missing_exponent(self):
        """Test that the missing exponent is named."""
        params = InequalityParams(d=1, p=2.0)
        with pytest.raises(MissingExponentError) as exc_info:
            params.require(InequalityKind.ORDINARY)
        assert exc_info.value.exponent == "q"
        assert "'q'" in str(exc_info.value)

    def test_alpha_total(self):
        """Test the total pair exponent."""
        assert InequalityParams(d=1, alpha1=0.25, alpha2=0.5).alpha == 0.75


class TestValidateParams:
    """Test admissibility constraints."""

    def test_admissible(self, hardy_params):
        """Test a tuple satisfying the permissive constraints."""
        assert validate_params(hardy_params, ValidationMode.PERMISSIVE) == []

    def test_strict_kernel_bound(self, hardy_params):
        """Test that strict mode enforces beta < 1."""
        violations = validate_params(hardy_params, ValidationMode.STRICT)
        assert violations == ["beta < 1", "alpha1 + alpha2 - beta > -d"]

    def test_strict_order(self):
        """Test that violations come in a fixed order."""
        params = InequalityParams(d=1, mu=2.0, alpha1=-2.0, beta=2.0)
        violations = validate_params(params, "strict")
        assert violations[:3] == ["mu < d", "alpha1 > -d", "beta < 1"]

    def test_strict_lambda(self):
        """Test the lambda range of strict mode."""
        params = InequalityParams(d=2, lam=0.5)
        assert "lambda < 1/(2d - 1)" in validate_params(params, "strict")

    def test_permissive_integrability(self):
        """Test the permissive double-integral constraint."""
        params = InequalityParams(d=1, beta=2.5)
        assert validate_params(params, "permissive") == ["2d + alpha1 + alpha2 - beta > 0"]

    def test_missing_exponent_for_kind(self):
        """Test kind-dependent exponent requirements."""
        with pytest.raises(MissingExponentError):
            validate_params(InequalityParams(d=1, p=2.0, q=2.0), "strict", "mixed")

    def test_params_not_mutated(self, hardy_params):
        """Test that validation leaves the tuple untouched."""
        before = hardy_params.model_dump()
        validate_params(hardy_params, "strict", "ordinary")
        assert hardy_params.model_dump() == before


class TestBalance:
    """Test balance identities."""

    def test_ordinary_balanced(self, hardy_params):
        """Test an exactly balanced ordinary tuple."""
        assert balance_condition(hardy_params, "ordinary") == 0.0

    def test_ordinary_residual(self):
        """Test the sign and size of an unbalanced residual."""
        params = InequalityParams(d=1, p=2.0, q=2.0, beta=1.0, mu=0.5)
        # (1 - 0.5)/2 - (2 - 1)/2
        assert balance_condition(params, "ordinary") == pytest.approx(-0.25)

    def test_mixed(self):
        """Test the mixed identity."""
        params = InequalityParams(d=1, p=2.0, q=2.0, r=2.0, beta=0.5, mu=-0.5)
        lhs, rhs = exact_predicted_exponents(params, "mixed")
        assert lhs == rhs == 0.75

    def test_derivative(self):
        """Test the derivative identity with its shift by one."""
        params = InequalityParams(d=1, p=2.0, s=2.0, beta=1.5, mu=-1.5)
        assert balance_condition(params, "derivative") == 0.0

    def test_surface_dimension(self):
        """Test the surface dimension range."""
        params = InequalityParams(d=2, p=2.0, q=2.0)
        with pytest.raises(DomainError):
            balance_condition(params, "surface", m=2)
        assert exact_predicted_exponents(params, "surface", m=1)[0] == 0.5


class TestWeights:
    """Test weight evaluation."""

    def test_power(self):
        """Test |z|^-e."""
        np.testing.assert_allclose(
            WeightSpec.power(2.0)(np.array([0.5, 2.0])), [4.0, 0.25]
        )

    def test_zero_exponent(self):
        """Test that the zero power is identically one, also at the origin."""
        assert WeightSpec.power(0.0)(np.array([0.0]))[0] == 1.0

    def test_triple_from_params(self):
        """Test the pair weight |x|^a1 |y|^a2."""
        params = InequalityParams(d=1, alpha1=1.0, alpha2=2.0, beta=0.5, mu=0.25)
        triple = WeightTriple.from_params(params)
        x, y = np.array([[2.0]]), np.array([[3.0]])
        assert triple.pair(x, y)[0] == pytest.approx(2.0 * 9.0)
        assert triple.kernel(np.array([4.0]))[0] == pytest.approx(0.5)
        assert triple.is_power


class TestDomain:
    """Test domain construction."""

    def test_invalid_ball(self):
        """Test that a non-positive radius is rejected."""
        with pytest.raises(DomainError):
            Domain.ball(2, 0.0)

    def test_invalid_box(self):
        """Test that an empty box is rejected."""
        with pytest.raises(DomainError):
            Domain.box(1, 1.0, 0.0)

    def test_surface_trace(self):
        """Test the domain carried by a surface."""
        surface = Domain.surface(3, 2, radius=1.5)
        trace = surface.trace()
        assert trace.kind is DomainKind.BALL
        assert trace.d == 2
        assert trace.radius == 1.5

    def test_whole_space_region_needs_window(self):
        """Test that whole-space sampling needs a window."""
        with pytest.raises(DomainError):
            Domain.whole_space(2).region()

    def test_box_membership(self):
        """Test box membership of sample points."""
        region = Domain.box(2, 0.0, 1.0).region()
        inside = region.contains(np.array([[0.5, 0.5], [1.5, 0.5]]))
        assert inside.tolist() == [True, False]
