"""Buchberger's algorithm, normal forms, staircases and ideal-level queries."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import structlog
from sympy.polys.rings import PolyElement, PolyRing

from diffalg.engine.core import (
    Monomial,
    MonomialOrder,
    degree_of,
    is_homogeneous,
    monomials_of_degree,
    weighted_degree,
    weights_of,
)
from diffalg.engine.linalg import nullspace
from diffalg.errors import (
    AmbientMismatchError,
    DiffalgError,
    InfiniteStaircaseError,
    InhomogeneousError,
    UnitIdealError,
)
from diffalg.metrics import groebner_runs_total

logger = structlog.get_logger()


@dataclass(frozen=True)
class IdealBasis:
    """Nonzero generators of an ideal of ``ring``."""

    ring: PolyRing
    generators: tuple[PolyElement, ...]

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.ring != self.ring:
                raise AmbientMismatchError(f"generator {g} does not live in {self.ring}")

    @classmethod
    def of(cls, ring: PolyRing, generators: Sequence[PolyElement]) -> "IdealBasis":
        return cls(ring, tuple(g for g in generators if g))

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Gröbner basis, sorted increasingly by leading monomial."""

    ring: PolyRing
    elements: tuple[PolyElement, ...]

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    @property
    def is_unit(self) -> bool:
        return self.elements == (self.ring.one,)

    @property
    def is_zero(self) -> bool:
        return not self.elements

    @property
    def leading_monomials(self) -> tuple[Monomial, ...]:
        return tuple(g.LM for g in self.elements)

    def max_degree(self) -> int:
        weights = weights_of(self.ring)
        return max((weighted_degree(m, weights) for g in self.elements for m in g.keys()), default=0)


def _spoly(f: PolyElement, g: PolyElement) -> PolyElement:
    ring = f.ring
    lcm = ring.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(ring.monomial_div(lcm, f.LM)) - g.mul_monom(ring.monomial_div(lcm, g.LM))


def _update(G: list, P: set, f: PolyElement) -> tuple[list, set]:
    """Add f to G, pruning pairs with the Gebauer-Möller criteria."""
    ring = f.ring
    lcm, mul, div = ring.monomial_lcm, ring.monomial_mul, ring.monomial_div
    lmf = f.LM
    lmG = [g.LM for g in G]

    P = {
        (i, j)
        for (i, j) in P
        if not div(lcm(lmG[i], lmG[j]), lmf)
        or lcm(lmG[i], lmG[j]) == lcm(lmG[i], lmf)
        or lcm(lmG[i], lmG[j]) == lcm(lmG[j], lmf)
    }
    by_lcm: dict[Monomial, list[int]] = {}
    for i in range(len(G)):
        by_lcm.setdefault(lcm(lmG[i], lmf), []).append(i)
    minimal: list[Monomial] = []
    for L in sorted(by_lcm, key=ring.order):
        if all(not div(L, L_) for L_ in minimal):
            minimal.append(L)
    new = set()
    for L in minimal:
        if not any(lcm(lmG[i], lmf) == mul(lmG[i], lmf) for i in by_lcm[L]):
            new.add((min(by_lcm[L]), len(G)))
    return G + [f], P | new


def _minimalize(G: list) -> list:
    ring = G[0].ring
    kept: list = []
    for f in sorted(G, key=lambda h: ring.order(h.LM)):
        if all(not ring.monomial_div(f.LM, g.LM) for g in kept):
            kept.append(f)
    return kept


def _interreduce(G: list) -> list:
    return [G[i].rem(G[:i] + G[i + 1:]).monic() for i in range(len(G))]


def buchberger(ideal: IdealBasis | Sequence[PolyElement], ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal in the order of its ring."""
    if not isinstance(ideal, IdealBasis):
        gens = list(ideal)
        if ring is None:
            if not gens:
                raise DiffalgError("cannot infer the ring of an empty generator list")
            ring = gens[0].ring
        ideal = IdealBasis.of(ring, gens)
    ring = ideal.ring
    groebner_runs_total.inc()

    G: list = []
    P: set = set()
    for f in ideal.generators:
        G, P = _update(G, P, f.monic())

    while P:
        lcm = ring.monomial_lcm
        i, j = min(P, key=lambda p: (ring.order(lcm(G[p[0]].LM, G[p[1]].LM)), p))
        P.remove((i, j))
        r = _spoly(G[i], G[j]).rem(G)
        if r:
            G, P = _update(G, P, r.monic())

    reduced = _interreduce(_minimalize(G)) if G else []
    reduced.sort(key=lambda g: ring.order(g.LM))
    logger.debug("groebner_basis", ring=str(ring.symbols), generators=len(ideal), size=len(reduced))
    return GroebnerBasis(ring, tuple(reduced))


def normal_form(f: PolyElement, gb: GroebnerBasis) -> PolyElement:
    if f.ring != gb.ring:
        raise AmbientMismatchError(f"{f} is not an element of {gb.ring}")
    if not gb.elements or not f:
        return f
    return f.rem(list(gb.elements))


def contains(gb: GroebnerBasis, f: PolyElement) -> bool:
    return not normal_form(f, gb)


# Staircases and dimension


@dataclass(frozen=True)
class Staircase:
    """Standard monomials of S/I by increasing degree.

    ``finite`` is true when the whole (finite) staircase is listed; a truncated
    listing of an infinite staircase keeps ``degree_bound``.
    """

    monomials: tuple[Monomial, ...]
    finite: bool
    degree_bound: int | None
    weights: tuple[int, ...]

    @property
    def length(self) -> int:
        if not self.finite:
            raise InfiniteStaircaseError("the quotient has infinite length")
        return len(self.monomials)

    def degrees(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for m in self.monomials:
            d = weighted_degree(m, self.weights)
            counts[d] = counts.get(d, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self.monomials)


def is_zero_dimensional(gb: GroebnerBasis) -> bool:
    """Every variable has a pure power among the leading monomials."""
    n = gb.ring.ngens
    if gb.is_unit:
        return True
    pure = set()
    for m in gb.leading_monomials:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            pure.add(support[0])
    return len(pure) == n


def _pure_power_exponents(gb: GroebnerBasis) -> list[int]:
    exponents = [None] * gb.ring.ngens
    for m in gb.leading_monomials:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            i = support[0]
            exponents[i] = m[i] if exponents[i] is None else min(exponents[i], m[i])
    return exponents


def standard_monomials(gb: GroebnerBasis, degree: int) -> tuple[Monomial, ...]:
    """Monomials of the given weighted degree outside the leading-term ideal, decreasing."""
    ring = gb.ring
    lms = gb.leading_monomials
    div = ring.monomial_div
    found = [m for m in monomials_of_degree(weights_of(ring), degree) if not any(div(m, lm) for lm in lms)]
    found.sort(key=ring.order, reverse=True)
    return tuple(found)


def top_degree(gb: GroebnerBasis) -> int | None:
    """Largest degree of a standard monomial when the staircase is finite."""
    if gb.is_unit:
        return -1
    if not is_zero_dimensional(gb):
        return None
    weights = weights_of(gb.ring)
    bound = sum((a - 1) * w for a, w in zip(_pure_power_exponents(gb), weights))
    for d in range(bound, -1, -1):
        if standard_monomials(gb, d):
            return d
    return -1


def staircase_basis(gb: GroebnerBasis, degree_bound: int | None = None) -> Staircase:
    weights = weights_of(gb.ring)
    top = top_degree(gb)
    if top is None and degree_bound is None:
        raise InfiniteStaircaseError("the quotient is not artinian; supply a degree bound")
    last = top if top is not None else degree_bound
    finite = top is not None
    if degree_bound is not None and degree_bound < last:
        last, finite = degree_bound, False
    monomials: list[Monomial] = []
    for d in range(0, last + 1):
        monomials.extend(standard_monomials(gb, d))
    return Staircase(tuple(monomials), finite, None if finite else last, weights)


def hilbert_function(gb: GroebnerBasis, bound: int) -> list[int]:
    return [len(standard_monomials(gb, d)) for d in range(bound + 1)]


def krull_dimension(gb: GroebnerBasis) -> int:
    """Size of a maximal independent set of variables modulo the leading-term ideal."""
    if gb.is_unit:
        raise UnitIdealError("the unit ideal has no dimension")
    n = gb.ring.ngens
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            chosen = frozenset(subset)
            if not any(s <= chosen for s in supports):
                return size
    return 0


# Ideal arithmetic


def minimal_generators(ideal: IdealBasis, modulo: GroebnerBasis | None = None) -> tuple[PolyElement, ...]:
    """Minimal homogeneous generators of (ideal + I)/I, greedily by degree.

    The result consists of normal forms modulo ``modulo`` and its size is
    dim_k J/mJ for the graded maximal ideal m.
    """
    ring = ideal.ring
    weights = weights_of(ring)
    base = modulo or GroebnerBasis(ring, ())
    if base.ring != ring:
        raise AmbientMismatchError("ideal and quotient live in different rings")
    for g in base.elements:
        if not is_homogeneous(g, weights):
            raise InhomogeneousError("the ambient ideal is not homogeneous")
    candidates = []
    for g in ideal.generators:
        if not is_homogeneous(g, weights):
            raise InhomogeneousError(f"generator {g} is not homogeneous")
        r = normal_form(g, base)
        if r:
            if degree_of(r, weights) == 0:
                raise DiffalgError("ideal is not contained in the irrelevant ideal")
            candidates.append(r)
    candidates.sort(key=lambda g: degree_of(g, weights))

    kept: list[PolyElement] = []
    current = base
    for g in candidates:
        if normal_form(g, current):
            kept.append(g)
            current = buchberger(list(base.elements) + kept, ring)
    return tuple(kept)


def ideals_equal(gb: GroebnerBasis, first: Sequence[PolyElement], second: Sequence[PolyElement]) -> bool:
    """Equality of (I + J1)/I and (I + J2)/I."""
    ring = gb.ring
    a = buchberger(list(gb.elements) + list(first), ring)
    b = buchberger(list(gb.elements) + list(second), ring)
    return a.elements == b.elements


def quotient_length(gb: GroebnerBasis, extra: Sequence[PolyElement]) -> int:
    return staircase_basis(buchberger(list(gb.elements) + list(extra), gb.ring)).length


def _elimination_ring(ring: PolyRing) -> PolyRing:
    names = ["_t"] + [str(s) for s in ring.symbols]
    return PolyRing(names, ring.domain, MonomialOrder("lex"))


def _lift(f: PolyElement, target: PolyRing) -> PolyElement:
    return target.from_dict({(0,) + m: c for m, c in f.items()})


def _drop(f: PolyElement, target: PolyRing) -> PolyElement:
    return target.from_dict({m[1:]: c for m, c in f.items()})


def intersect(first: Sequence[PolyElement], second: Sequence[PolyElement], ring: PolyRing) -> list[PolyElement]:
    """Generators of the intersection of two ideals of S by eliminating a tag variable."""
    T = _elimination_ring(ring)
    t = T.gens[0]
    gens = [t * _lift(f, T) for f in first if f] + [(1 - t) * _lift(g, T) for g in second if g]
    if not gens:
        return []
    gb = buchberger(gens, T)
    return [_drop(h, ring) for h in gb.elements if all(m[0] == 0 for m in h.keys())]


def _colon_by_elimination(gb: GroebnerBasis, f: PolyElement) -> list[PolyElement]:
    ring = gb.ring
    quotients = []
    for h in intersect(gb.elements, [f], ring):
        q, r = h.div(f)
        if r:
            raise DiffalgError("elimination produced an element outside (f)")
        quotients.append(q)
    return quotients


def _colon_by_linear_algebra(gb: GroebnerBasis, elements: Sequence[PolyElement]) -> list[PolyElement]:
    ring = gb.ring
    K = ring.domain
    weights = weights_of(ring)
    top = top_degree(gb)
    homogeneous = all(is_homogeneous(f, weights) for f in elements)
    blocks = [range(top + 1)] if not homogeneous else [[d] for d in range(top + 1)]
    found: list[PolyElement] = []
    for degrees in blocks:
        basis = [m for d in degrees for m in standard_monomials(gb, d)]
        if not basis:
            continue
        images = []
        for m in basis:
            u = ring.from_dict({m: K.one})
            images.append([normal_form(u * f, gb) for f in elements])
        support = sorted({mono for row in images for p in row for mono in p.keys()}, key=ring.order)
        rows = []
        for k in range(len(elements)):
            for mono in support:
                rows.append([images[c][k].get(mono, K.zero) for c in range(len(basis))])
        for vector in nullspace(rows, len(basis), K):
            found.append(ring.from_dict({basis[c]: vector[c] for c in range(len(basis)) if vector[c]}))
    return found


def colon_annihilator(gb: GroebnerBasis, f: PolyElement | Sequence[PolyElement]) -> IdealBasis:
    """Generators of (0 :_R f) in R = S/I; a tuple f gives the annihilator of the vector."""
    ring = gb.ring
    elements = [f] if isinstance(f, PolyElement) else list(f)
    elements = [normal_form(e, gb) for e in elements]
    if not any(elements):
        return IdealBasis(ring, (ring.one,))
    elements = [e for e in elements if e]
    if gb.is_zero:
        return IdealBasis(ring, ())

    if is_zero_dimensional(gb):
        gens = _colon_by_linear_algebra(gb, elements)
    else:
        gens = _colon_by_elimination(gb, elements[0])
        for e in elements[1:]:
            gens = intersect(gens, _colon_by_elimination(gb, e), ring)
    gens = [normal_form(g, gb) for g in gens]
    gens = [g for g in gens if g]
    weights = weights_of(ring)
    if gens and all(is_homogeneous(e, weights) for e in elements) and all(is_homogeneous(g, weights) for g in gens):
        if any(degree_of(g, weights) == 0 for g in gens):
            return IdealBasis(ring, (ring.one,))
        gens = list(minimal_generators(IdealBasis(ring, tuple(gens)), gb))
    for g in gens:
        for e in elements:
            if normal_form(g * e, gb):
                raise DiffalgError("annihilator verification failed")
    return IdealBasis(ring, tuple(gens))
