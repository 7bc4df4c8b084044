"""Unit tests for Gröbner bases and ideal arithmetic."""

from diffalg.engine.core import CoefficientField, polynomial_ring
from diffalg.engine.groebner import (
    IdealBasis,
    buchberger,
    colon_annihilator,
    ideals_equal,
    intersect,
    minimal_generators,
    normal_form,
    quotient_length,
)
from diffalg.scenario.expressions import parse_polynomials

from tests.conftest import poly


def _ideal(S, text):
    return parse_polynomials(text, S)


class TestBuchberger:
    """Tests for the Buchberger algorithm."""

    def test_unit_ideal(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        assert buchberger(_ideal(S, "X, X - 1"), S).is_unit

    def test_normal_form_modulo_squares(self):
        S = polynomial_ring("X, Y", CoefficientField(2))
        gb = buchberger(_ideal(S, "X^2, Y^2"), S)
        assert normal_form(_ideal(S, "X^2*Y + X")[0], gb) == S.gens[0]

    def test_reduced_basis_is_canonical(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        first = buchberger(_ideal(S, "X^2 - Y^2, X*Y"), S)
        second = buchberger(_ideal(S, "X*Y, X^2 - Y^2, X^3"), S)
        assert first.elements == second.elements

    def test_basis_reduces_s_polynomials(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        gb = buchberger(_ideal(S, "X^2 - Y^2, X*Y"), S)
        assert normal_form(_ideal(S, "Y^3")[0], gb) == S.zero


class TestIdealArithmetic:
    """Tests for minimal generators, colengths, intersections and annihilators."""

    def test_minimal_generators_modulo_relations(self, squares_f2):
        ideal = IdealBasis.of(squares_f2.ambient, _ideal(squares_f2.ambient, "X, X*Y, Y^2"))
        assert minimal_generators(ideal, squares_f2.gb) == (squares_f2.variables[0],)

    def test_ideals_equal(self, squares_f2):
        S = squares_f2.ambient
        assert ideals_equal(squares_f2.gb, _ideal(S, "X, Y"), _ideal(S, "X + Y, Y"))
        assert not ideals_equal(squares_f2.gb, _ideal(S, "X"), _ideal(S, "Y"))

    def test_quotient_length(self, squares_f2):
        assert quotient_length(squares_f2.gb, _ideal(squares_f2.ambient, "X")) == 2

    def test_intersection_of_coordinate_ideals(self):
        S = polynomial_ring("X, Y", CoefficientField(0))
        gens = intersect(_ideal(S, "X"), _ideal(S, "Y"), S)
        assert ideals_equal(buchberger([], S), gens, _ideal(S, "X*Y"))

    def test_annihilator_in_artinian_ring(self, square_maximal_f2):
        ann = colon_annihilator(square_maximal_f2.gb, poly(square_maximal_f2, "X"))
        assert ideals_equal(square_maximal_f2.gb, ann.generators, square_maximal_f2.variables)

    def test_annihilator_in_positive_dimension(self, node_q):
        ann = colon_annihilator(node_q.gb, poly(node_q, "X"))
        assert ideals_equal(node_q.gb, ann.generators, (poly(node_q, "Y"),))

    def test_annihilator_of_a_nonzerodivisor_is_zero(self, node_q):
        assert colon_annihilator(node_q.gb, poly(node_q, "X + Y")).generators == ()
