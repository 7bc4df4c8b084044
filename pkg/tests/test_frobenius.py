"""Unit tests for the Frobenius functor on matrices and complexes."""

import pytest

from diffalg.engine.complexes import identity_complex, koszul_complex
from diffalg.engine.frobenius import acyclicity_report, frobenius_power, frobenius_twist_matrix
from diffalg.engine.modules import maximal_ideal
from diffalg.errors import CharacteristicZeroError, IndexRangeError

from tests.conftest import make_ring, poly


@pytest.fixture
def dual_numbers_f2():
    return make_ring("F2", "X", "X^2")


class TestFrobeniusPower:
    """Tests for iterated p-th powers."""

    def test_additive_in_characteristic_p(self, squares_f2):
        assert frobenius_power(squares_f2, poly(squares_f2, "X + Y"), 1) == squares_f2.zero

    def test_iterates(self, semigroup_456):
        assert frobenius_power(semigroup_456, poly(semigroup_456, "X"), 1) == poly(semigroup_456, "X^2")

    def test_characteristic_zero(self, node_q):
        with pytest.raises(CharacteristicZeroError):
            frobenius_power(node_q, poly(node_q, "X"), 1)


class TestTwists:
    """Tests for twisted matrices and complexes."""

    def test_twist_of_koszul_map(self, dual_numbers_f2):
        complex_ = koszul_complex(dual_numbers_f2, poly(dual_numbers_f2, "X"))
        twist = frobenius_twist_matrix(complex_.maps[1], 1)
        assert twist.q == 2
        assert twist.twisted.columns == ((dual_numbers_f2.zero,),)
        assert twist.twisted.source.degrees == (2,)

    def test_negative_exponent(self, dual_numbers_f2):
        complex_ = koszul_complex(dual_numbers_f2, poly(dual_numbers_f2, "X"))
        with pytest.raises(IndexRangeError):
            frobenius_twist_matrix(complex_.maps[1], -1)

    def test_koszul_complex_is_not_rigid(self, dual_numbers_f2):
        complex_ = koszul_complex(dual_numbers_f2, poly(dual_numbers_f2, "X"))
        report = acyclicity_report(complex_, 2)
        assert report.homology[1] == {1: 2}
        assert not report.acyclic
        assert report.first_failure() == (1, 1)

    def test_identity_stays_exact(self, squares_f2):
        report = acyclicity_report(identity_complex(maximal_ideal(squares_f2)), 3)
        assert report.acyclic
        assert report.exact
        assert report.first_failure() is None
