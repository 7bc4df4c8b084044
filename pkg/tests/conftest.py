"""Shared rings for the engine tests."""

import pytest

from diffalg.engine.core import CoefficientField, polynomial_ring
from diffalg.engine.rings import QuotientRing
from diffalg.scenario.expressions import parse_polynomials


def make_ring(field, names, relations, weights=None, domain=False):
    """QuotientRing from text, e.g. make_ring("F2", "X, Y", "X^2, Y^2")."""
    ambient = polynomial_ring(names, CoefficientField.parse(field), weights)
    return QuotientRing(ambient, parse_polynomials(relations, ambient), is_domain=domain)


def poly(ring, text):
    """One element of the ambient ring of ``ring``, reduced to normal form."""
    return ring.nf(parse_polynomials(text, ring.ambient)[0])


@pytest.fixture
def squares_f2():
    """F2[X,Y]/(X^2, Y^2)."""
    return make_ring("F2", "X, Y", "X^2, Y^2")


@pytest.fixture
def cubes_f3():
    """F3[X1,X2]/(X1^3, X2^3)."""
    return make_ring("F3", "X1, X2", "X1^3, X2^3")


@pytest.fixture
def square_maximal_f2():
    """F2[X,Y]/(X,Y)^2."""
    return make_ring("F2", "X, Y", "X^2, X*Y, Y^2")


@pytest.fixture
def square_maximal_q():
    """Q[X,Y]/(X,Y)^2."""
    return make_ring("Q", "X, Y", "X^2, X*Y, Y^2")


@pytest.fixture
def node_q():
    """Q[X,Y]/(XY), a one-dimensional reduced ring of depth one."""
    return make_ring("Q", "X, Y", "X*Y")


@pytest.fixture
def semigroup_456():
    """k[T^4, T^5, T^6] over F2, a graded complete intersection domain."""
    return make_ring("F2", "X, Y, Z", '"X*Z + Y^2", "X^3 + Z^2"', weights=(4, 5, 6), domain=True)


@pytest.fixture
def monomial_curve_345():
    """k[T^3, T^4, T^5] over Q, an almost complete intersection."""
    return make_ring(
        "Q", "X, Y, Z", '"X^2*Y - Z^2", "X*Z - Y^2", "Y*Z - X^3"', weights=(3, 4, 5), domain=True
    )


@pytest.fixture
def staircase_f2():
    """F2[X,Y]/(X^4, X^2*Y^2, Y^4), length 12."""
    return make_ring("F2", "X, Y", "X^4, X^2*Y^2, Y^4")


@pytest.fixture
def embedded_point_f2():
    """F2[X,Y]/(X^2, X*Y^2), one-dimensional of depth zero."""
    return make_ring("F2", "X, Y", "X^2, X*Y^2")
