"""Unit tests for coefficient fields, polynomial rings and printing."""

import pytest

from diffalg.engine.core import (
    CoefficientField,
    format_polynomial,
    homogeneous_components,
    partial_derivative,
    polynomial_ring,
    weights_of,
)
from diffalg.errors import DiffalgError, FieldError, InhomogeneousError, UnitIdealError
from diffalg.scenario.expressions import parse_polynomial

from tests.conftest import make_ring


class TestCoefficientField:
    """Tests for reading coefficient fields."""

    @pytest.mark.parametrize("text", ["Q", "QQ", "0"])
    def test_rationals(self, text):
        assert CoefficientField.parse(text).characteristic == 0

    @pytest.mark.parametrize("text,p", [("F2", 2), ("F_3", 3), ("GF(5)", 5), ("7", 7)])
    def test_prime_fields(self, text, p):
        assert CoefficientField.parse(text).characteristic == p

    @pytest.mark.parametrize("text", ["F4", "GF(9)", "R"])
    def test_rejects_non_prime_fields(self, text):
        with pytest.raises(FieldError):
            CoefficientField.parse(text)

    def test_str(self):
        assert str(CoefficientField(0)) == "Q"
        assert str(CoefficientField(2)) == "F2"


class TestPolynomialRing:
    """Tests for the weighted ambient ring."""

    def test_weights_default_to_one(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        assert weights_of(S) == (1, 1)

    def test_rejects_duplicate_names(self):
        with pytest.raises(DiffalgError):
            polynomial_ring(["X", "X"], CoefficientField(0))

    def test_rejects_wrong_number_of_weights(self):
        with pytest.raises(DiffalgError):
            polynomial_ring("X, Y", CoefficientField(0), (1, 2, 3))

    def test_homogeneous_components_use_weights(self):
        S = polynomial_ring("X, Y, Z", CoefficientField(2), (4, 5, 6))
        f = parse_polynomial("X*Z + Y^2 + X", S)
        components = homogeneous_components(f)
        assert set(components) == {4, 10}
        assert format_polynomial(components[4]) == "X"

    def test_partial_derivative(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        f = parse_polynomial("X^2*Y + Y", S)
        assert partial_derivative(f, "X") == parse_polynomial("2*X*Y", S)
        assert partial_derivative(f, 1) == parse_polynomial("X^2 + 1", S)


class TestFormatting:
    """Tests for the canonical printed form."""

    def test_terms_in_decreasing_order(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        assert format_polynomial(parse_polynomial("1 - 3*Y + Y*X^2", S)) == "X^2*Y - 3*Y + 1"

    def test_rational_coefficients(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        assert format_polynomial(parse_polynomial("X/2", S)) == "1/2*X"

    def test_zero(self):
        S = polynomial_ring("X", CoefficientField(0))
        assert format_polynomial(S.zero) == "0"

    def test_coefficients_reduce_mod_p(self):
        S = polynomial_ring("X, Y", CoefficientField(2))
        assert format_polynomial(parse_polynomial("3*X + 2*Y", S)) == "X"


class TestQuotientRing:
    """Tests for S/I."""

    def test_artinian_length_and_top_degree(self, squares_f2):
        assert squares_f2.is_artinian
        assert squares_f2.length == 4
        assert squares_f2.top_degree == 2

    def test_hilbert_function(self, staircase_f2):
        assert [staircase_f2.dim(d) for d in range(6)] == [1, 2, 3, 4, 2, 0]

    def test_krull_dimension(self, node_q, semigroup_456, embedded_point_f2):
        assert node_q.krull_dimension == 1
        assert semigroup_456.krull_dimension == 1
        assert embedded_point_f2.krull_dimension == 1
        assert not node_q.is_artinian

    def test_weighted_basis(self, semigroup_456):
        assert semigroup_456.dim(4) == 1
        assert semigroup_456.dim(7) == 0
        assert semigroup_456.dim(10) == 1

    def test_rejects_inhomogeneous_relations(self):
        with pytest.raises(InhomogeneousError):
            make_ring("Q", "X, Y", "X^2 + Y")

    def test_rejects_unit_ideal(self):
        with pytest.raises(UnitIdealError):
            make_ring("Q", "X", "X - X + 1")
