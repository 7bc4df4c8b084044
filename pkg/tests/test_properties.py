"""Seeded randomized checks of the engine, plus brute-force cross-checks on small rings."""

import random
from itertools import product

import pytest
from sympy.polys.matrices import DomainMatrix

from diffalg.engine.classify import is_complete_intersection_ideal, socle
from diffalg.engine.complexes import MinimalResolution
from diffalg.engine.core import (
    CoefficientField,
    MonomialOrder,
    format_polynomial,
    leading_term,
    partial_derivative,
    polynomial_ring,
)
from diffalg.engine.derivations import (
    Derivation,
    apply_derivation,
    check_well_defined,
    derivation_space,
    is_differential_ideal,
    maximally_differential_ideal,
)
from diffalg.engine.frobenius import frobenius_power, frobenius_twist_matrix, frobenius_twist_module
from diffalg.engine.groebner import (
    buchberger,
    is_zero_dimensional,
    normal_form,
    quotient_length,
    staircase_basis,
)
from diffalg.engine.homology import biduality_is_iso, ext_module, syzygy_module, tor_dim
from diffalg.engine.kaehler import der_module, omega_presentation
from diffalg.engine.linalg import nullspace, rank
from diffalg.engine.modules import (
    GradedFree,
    GradedMap,
    PresentedModule,
    cyclic_module,
    k_realize,
    kernel_generators,
    maximal_ideal,
    residue_field,
)
from diffalg.scenario.expressions import parse_polynomial
from diffalg.scenario.parser import load_scenario
from diffalg.scenario.runner import corpus_paths

from tests.conftest import make_ring

SEED = 20240611


def _random_element(rng, ring, basis):
    K = ring.domain
    p = ring.characteristic
    return ring.ambient.from_dict({m: K(rng.randrange(p)) for m in basis if rng.random() < 0.5})


def _random_coefficient(rng, K):
    if K.characteristic() == 0:
        return K(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))
    return K(rng.randrange(1, K.characteristic()))


def _random_polynomial(rng, S, terms, max_exponent):
    K = S.domain
    monomials = {tuple(rng.randint(0, max_exponent) for _ in range(S.ngens)) for _ in range(terms)}
    return S.from_dict({m: _random_coefficient(rng, K) for m in monomials})


def _random_homogeneous(rng, ring, degree):
    K = ring.domain
    terms = {u: _random_coefficient(rng, K) for u in ring.basis(degree) if rng.random() < 0.6}
    return ring.ambient.from_dict(terms) if terms else ring.zero


def _random_map(rng, ring, source_degrees, target_degrees):
    columns = tuple(
        tuple(_random_homogeneous(rng, ring, s - t) for t in target_degrees) for s in source_degrees
    )
    return GradedMap(GradedFree(ring, tuple(source_degrees)), GradedFree(ring, tuple(target_degrees)), columns)


def _s_polynomial(f, g):
    S = f.ring
    lcm = S.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(S.monomial_div(lcm, f.LM)) - g.mul_monom(S.monomial_div(lcm, g.LM))


@pytest.fixture(scope="module")
def ring():
    return make_ring("F3", "X1, X2", "X1^3, X2^3")


@pytest.fixture(scope="module")
def space(ring):
    return derivation_space(ring).all()


@pytest.fixture(scope="module")
def ambient_f5():
    return polynomial_ring("X, Y, Z", CoefficientField.parse("F5"))


@pytest.fixture(scope="module")
def quartics_f2():
    """F2[X,Y]/(X^4, Y^4), where the Frobenius does not kill the maximal ideal."""
    return make_ring("F2", "X, Y", "X^4, Y^4")


@pytest.mark.slow
class TestRandomDerivations:
    """Properties that hold for every derivation of F3[X1,X2]/(X1^3, X2^3)."""

    def test_leibniz_rule(self, ring, space):
        rng = random.Random(SEED)
        basis = ring.full_basis()
        for _ in range(1000):
            D = rng.choice(space)
            f = _random_element(rng, ring, basis)
            g = _random_element(rng, ring, basis)
            lhs = apply_derivation(D, f * g)
            rhs = ring.nf(f * apply_derivation(D, g) + g * apply_derivation(D, f))
            assert lhs == rhs

    def test_maximal_differential_ideal_is_differential(self, ring, space):
        rng = random.Random(SEED + 1)
        K = ring.domain
        for _ in range(200):
            picked = rng.sample(space, 3)
            coefficients = [K(rng.randrange(1, 3)) for _ in picked]
            images = [
                ring.nf(sum((c * D.images[i] for c, D in zip(coefficients, picked)), ring.zero))
                for i in range(ring.ngens)
            ]
            D = check_well_defined(images, ring, "random")
            assert isinstance(D, Derivation)
            result = maximally_differential_ideal(ring, [D], mode="fixpoint")
            assert is_differential_ideal(result.generators, [D], ring)
            assert quotient_length(ring.gb, result.generators) >= 1
            assert list(result.steps) == sorted(result.steps, reverse=True)


@pytest.mark.slow
class TestRandomGroebnerBases:
    """Buchberger output on random ideals of F5[X,Y,Z]."""

    @pytest.fixture(scope="class")
    def cases(self, ambient_f5):
        rng = random.Random(SEED + 2)
        found = []
        for _ in range(80):
            gens = [_random_polynomial(rng, ambient_f5, rng.randint(2, 4), 2) for _ in range(rng.randint(2, 3))]
            gens = [g for g in gens if g]
            if gens:
                found.append((gens, buchberger(gens, ambient_f5)))
        return found

    def test_generators_reduce_to_zero(self, cases):
        for gens, gb in cases:
            assert all(not normal_form(g, gb) for g in gens)

    def test_s_polynomials_reduce_to_zero(self, cases):
        for _, gb in cases:
            elements = list(gb.elements)
            for i, f in enumerate(elements):
                for g in elements[i + 1:]:
                    assert not _s_polynomial(f, g).rem(elements)

    def test_bases_are_reduced(self, cases):
        for _, gb in cases:
            S = gb.ring
            for g in gb.elements:
                assert g.LC == S.domain.one
                assert leading_term(g)[0] == g.LM
                others = [h.LM for h in gb.elements if h != g]
                assert not any(S.monomial_div(m, lm) for m in g.keys() for lm in others)

    def test_generator_order_does_not_matter(self, cases):
        rng = random.Random(SEED + 3)
        for gens, gb in cases:
            shuffled = list(gens)
            rng.shuffle(shuffled)
            assert buchberger(shuffled + [gens[0] * gens[-1]], gb.ring).elements == gb.elements

    def test_staircase_counts_standard_monomials(self, cases):
        for _, gb in cases:
            if gb.is_unit or not is_zero_dimensional(gb):
                continue
            S = gb.ring
            bounds = [max(m[i] for m in gb.leading_monomials if sum(m) == m[i] and m[i]) for i in range(S.ngens)]
            standard = [
                m
                for m in product(*(range(b) for b in bounds))
                if not any(S.monomial_div(m, lm) for lm in gb.leading_monomials)
            ]
            assert staircase_basis(gb).length == len(standard)

    def test_normal_form_is_idempotent_and_linear(self, cases, ambient_f5):
        rng = random.Random(SEED + 4)
        K = ambient_f5.domain
        for _, gb in cases:
            f = _random_polynomial(rng, ambient_f5, 5, 3)
            g = _random_polynomial(rng, ambient_f5, 5, 3)
            a, b = K(rng.randrange(5)), K(rng.randrange(5))
            nf_f, nf_g = normal_form(f, gb), normal_form(g, gb)
            assert normal_form(nf_f, gb) == nf_f
            assert normal_form(a * f + b * g, gb) == a * nf_f + b * nf_g


@pytest.mark.slow
class TestRingArithmetic:
    """Arithmetic of normal forms in F3[X1,X2]/(X1^3, X2^3)."""

    def test_ring_axioms(self, ring):
        rng = random.Random(SEED + 5)
        S = ring.ambient
        for _ in range(300):
            f, g, h = (_random_polynomial(rng, S, 4, 4) for _ in range(3))
            assert ring.nf(f * g) == ring.nf(ring.nf(f) * ring.nf(g))
            assert ring.nf(ring.nf(f * g) * h) == ring.nf(f * ring.nf(g * h))
            assert ring.nf(f * (g + h)) == ring.nf(ring.nf(f * g) + ring.nf(f * h))
            assert ring.nf(f + g) == ring.nf(g) + ring.nf(f)

    def test_derivatives_of_p_th_powers_vanish(self, ring):
        rng = random.Random(SEED + 6)
        S = ring.ambient
        for _ in range(200):
            f = _random_polynomial(rng, S, 4, 3)
            assert all(not partial_derivative(f**3, i) for i in range(S.ngens))


@pytest.mark.slow
class TestMonomialOrders:
    """Monomial orders are total, multiplicative and global."""

    @pytest.mark.parametrize(
        "order",
        [MonomialOrder("grevlex", (1, 2, 3)), MonomialOrder("grevlex", (1, 1, 1)), MonomialOrder("lex")],
        ids=str,
    )
    def test_axioms(self, order):
        rng = random.Random(SEED + 7)
        one = (0, 0, 0)
        for _ in range(500):
            a, b, c = (tuple(rng.randint(0, 4) for _ in range(3)) for _ in range(3))
            assert (order(a) == order(b)) == (a == b)
            if order(a) < order(b):
                shifted_a = tuple(x + y for x, y in zip(a, c))
                shifted_b = tuple(x + y for x, y in zip(b, c))
                assert order(shifted_a) < order(shifted_b)
            if a != one:
                assert order(one) < order(a)
            multiple = tuple(x + y for x, y in zip(a, c))
            if multiple != a:
                assert order(a) < order(multiple)


@pytest.mark.slow
class TestFrobeniusFunctor:
    """Frobenius twists of random homogeneous matrices over F2[X,Y]/(X^4, Y^4)."""

    def _pair(self, rng, ring):
        t = [rng.randint(0, 1) for _ in range(rng.randint(1, 2))]
        s = [max(t) + rng.randint(1, 2) for _ in range(rng.randint(1, 3))]
        u = [max(s) + rng.randint(1, 2) for _ in range(rng.randint(1, 2))]
        return _random_map(rng, ring, s, t), _random_map(rng, ring, u, s)

    def test_twist_is_functorial(self, quartics_f2):
        rng = random.Random(SEED + 8)
        for _ in range(40):
            A, B = self._pair(rng, quartics_f2)
            for n in (1, 2):
                whole = frobenius_twist_matrix(A.compose(B), n).twisted
                parts = frobenius_twist_matrix(A, n).twisted.compose(frobenius_twist_matrix(B, n).twisted)
                assert whole.columns == parts.columns

    def test_zeroth_twist_is_the_identity(self, quartics_f2):
        rng = random.Random(SEED + 9)
        for _ in range(20):
            A, _ = self._pair(rng, quartics_f2)
            twist = frobenius_twist_matrix(A, 0)
            assert twist.q == 1
            assert twist.twisted.columns == A.columns
            assert twist.twisted.source.degrees == A.source.degrees

    def test_composable_pairs_stay_composable(self, quartics_f2):
        rng = random.Random(SEED + 10)
        for _ in range(30):
            A, _ = self._pair(rng, quartics_f2)
            kernel = kernel_generators(A)
            assert A.compose(kernel).is_zero
            for n in (1, 2):
                twisted = frobenius_twist_matrix(A, n).twisted
                assert twisted.compose(frobenius_twist_matrix(kernel, n).twisted).is_zero

    def test_twisted_cyclic_modules(self, quartics_f2):
        rng = random.Random(SEED + 11)
        for _ in range(20):
            gens = [g for g in (_random_homogeneous(rng, quartics_f2, rng.randint(1, 3)) for _ in range(2)) if g]
            twisted = frobenius_twist_module(cyclic_module(quartics_f2, gens), 1)
            powers = [h for h in (frobenius_power(quartics_f2, g, 1) for g in gens) if h]
            assert k_realize(twisted).dimension == quotient_length(quartics_f2.gb, powers)


@pytest.mark.slow
class TestBiduality:
    """Free modules are reflexive whatever their generator degrees."""

    @pytest.mark.parametrize("name", ["squares_f2", "square_maximal_q", "node_q"])
    def test_random_free_modules(self, name, request):
        ring = request.getfixturevalue(name)
        rng = random.Random(SEED + 12)
        for _ in range(6):
            degrees = tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 3)))
            assert biduality_is_iso(PresentedModule.free_module(ring, degrees)).iso


def _dual_rank(ring, d, index):
    """Rank over k of phi -> phi o d on Hom(F_(i-1), R) = R^r, from multiplication tables."""
    K = ring.domain
    L = len(index)
    r_source, r_target = d.source.rank, d.target.rank
    if not r_source or not r_target:
        return 0
    rows = [[K.zero] * (r_target * L) for _ in range(r_source * L)]
    for j in range(r_target):
        for u, col in index.items():
            for c in range(r_source):
                image = ring.nf(d.columns[c][j] * ring.monomial(u))
                for m, coeff in image.items():
                    rows[c * L + index[m]][j * L + col] = coeff
    return DomainMatrix(rows, (r_source * L, r_target * L), K).rank()


def _brute_force_ext(ring, module, upto):
    index = {m: i for i, m in enumerate(ring.full_basis())}
    L = len(index)
    resolution = MinimalResolution(module).extend_to(upto + 1)
    ranks = resolution.ranks(upto + 1)
    dual = [0] + [_dual_rank(ring, resolution.differential(i), index) for i in range(1, upto + 2)]
    return [ranks[i] * L - dual[i + 1] - dual[i] for i in range(upto + 1)]


@pytest.mark.slow
class TestArtinianExt:
    """Ext^i(M, R) against dual complexes built from k-linear multiplication tables."""

    @pytest.mark.parametrize("name", ["squares_f2", "staircase_f2", "square_maximal_f2"])
    @pytest.mark.parametrize("which", ["k", "m", "omega"])
    def test_ext_dimensions(self, name, which, request):
        ring = request.getfixturevalue(name)
        module = {"k": residue_field, "m": maximal_ideal, "omega": omega_presentation}[which](ring)
        expected = _brute_force_ext(ring, module, 3)
        assert [ext_module(module, i).dimension for i in range(4)] == expected

    def test_hom_into_ring_is_the_socle(self, square_maximal_f2):
        assert _brute_force_ext(square_maximal_f2, residue_field(square_maximal_f2), 0) == [
            socle(square_maximal_f2).dimension
        ]

    @pytest.mark.parametrize("name", ["squares_f2", "square_maximal_f2"])
    def test_tor_of_residue_fields_counts_betti_numbers(self, name, request):
        ring = request.getfixturevalue(name)
        k = residue_field(ring)
        ranks = MinimalResolution(k).ranks(3)
        assert [tor_dim(k, k, i)[1] for i in range(4)] == ranks


@pytest.mark.slow
class TestDerivationRoutes:
    """Hom(Omega, R) and the derivation space agree degree by degree on every shipped scenario."""

    @pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
    def test_routes_agree(self, path):
        ring = load_scenario(path).ring
        der = der_module(ring)
        assert der.dims_by_degree == derivation_space(ring).dims_by_degree()


def _matmul(A, B, K):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), K.zero) for j in range(n)] for i in range(n)]


@pytest.mark.slow
class TestRealizations:
    """k-linear realizations of modules over artinian rings."""

    @pytest.mark.parametrize("name", ["squares_f2", "staircase_f2", "square_maximal_q", "cubes_f3"])
    def test_multiplication_tables_of_the_ring(self, name, request):
        ring = request.getfixturevalue(name)
        realization = k_realize(PresentedModule.free_module(ring, (0,)))
        n = realization.dimension
        K = ring.domain
        assert n == ring.length
        tables = [[list(row) for row in M] for M in realization.multiplication]
        for M in tables:
            assert rank(M, n, K) + len(nullspace(M, n, K)) == n
        for A in tables:
            for B in tables:
                assert _matmul(A, B, K) == _matmul(B, A, K)
        stacked = [row for M in tables for row in M]
        assert n - rank(stacked, n, K) == socle(ring).dimension

    @pytest.mark.parametrize("name", ["squares_f2", "staircase_f2", "square_maximal_q"])
    def test_euler_characteristic_of_resolutions(self, name, request):
        ring = request.getfixturevalue(name)
        rng = random.Random(SEED + 13)
        L = ring.length
        for _ in range(6):
            gens = [g for g in (_random_homogeneous(rng, ring, rng.randint(1, 2)) for _ in range(2)) if g]
            module = cyclic_module(ring, gens)
            dimension = k_realize(module).dimension
            assert dimension == quotient_length(ring.gb, gens)
            ranks = MinimalResolution(module).ranks(3)
            for d in (1, 2, 3):
                alternating = sum((-1) ** j * ranks[j] * L for j in range(d))
                tail = k_realize(syzygy_module(module, d)).dimension
                assert dimension == alternating + (-1) ** d * tail


@pytest.mark.slow
class TestCompleteIntersectionVerdicts:
    """The verdict depends on the ideal, not on how its generators are listed."""

    @pytest.mark.parametrize(
        "name,degrees",
        [("node_q", (1, 2)), ("semigroup_456", (4, 5, 6, 8))],
    )
    def test_generator_order_and_redundancy(self, name, degrees, request):
        ring = request.getfixturevalue(name)
        rng = random.Random(SEED + 14)
        for _ in range(8):
            gens = [_random_homogeneous(rng, ring, rng.choice(degrees)) for _ in range(rng.randint(1, 2))]
            gens = [g for g in gens if g]
            verdict = is_complete_intersection_ideal(gens, ring)
            shuffled = list(reversed(gens))
            if gens:
                shuffled.append(ring.nf(gens[0] * ring.variables[0]))
            assert is_complete_intersection_ideal(shuffled, ring).ci == verdict.ci


@pytest.mark.slow
class TestPrintedForms:
    """Printed polynomials read back as the same element."""

    @pytest.mark.parametrize("field,names", [("Q", "X, Y, Z"), ("F7", "X, Y"), ("F2", "A, B, C")])
    def test_round_trip(self, field, names):
        S = polynomial_ring(names, CoefficientField.parse(field))
        rng = random.Random(SEED + 15)
        for _ in range(300):
            f = _random_polynomial(rng, S, rng.randint(0, 5), 4)
            assert parse_polynomial(format_polynomial(f), S) == f
