"""Derivations of quotient rings and maximally differential ideals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import structlog
from sympy.polys.rings import PolyElement

from diffalg.engine.core import constant_term, format_polynomial, homogeneous_components, partial_derivative
from diffalg.engine.groebner import IdealBasis, buchberger, minimal_generators, normal_form
from diffalg.engine.linalg import Span, nullspace
from diffalg.engine.rings import QuotientRing
from diffalg.errors import (
    CandidateError,
    DiffalgError,
    NotArtinianError,
    UnknownVariableError,
    UnverifiedDerivationError,
)

logger = structlog.get_logger()


@dataclass(frozen=True)
class Derivation:
    """A k-derivation given by the images of the variables (lifts in S)."""

    ring: QuotientRing
    images: tuple[PolyElement, ...]
    name: str = "D"
    verified: bool = False

    def describe(self) -> str:
        terms = []
        for name, image in zip(self.ring.names, self.images):
            if image:
                terms.append(f"({format_polynomial(image)})*d/d{name}")
        return " + ".join(terms) or "0"

    def on(self, ring: QuotientRing) -> "Derivation":
        """The same variable images read in another quotient of the ambient ring, unverified."""
        return Derivation(ring, tuple(ring.nf(g) for g in self.images), self.name)


@dataclass(frozen=True)
class WellDefinednessFailure:
    """D(f) is not in I for the relation ``generator``; ``residue`` is its normal form."""

    name: str
    generator: PolyElement
    residue: PolyElement

    @property
    def verified(self) -> bool:
        return False

    def describe(self) -> str:
        return f"{self.name}({format_polynomial(self.generator)}) = {format_polynomial(self.residue)} is not in the ideal"


def images_from_mapping(ring: QuotientRing, images: Mapping[str, PolyElement]) -> tuple[PolyElement, ...]:
    for name in images:
        if name not in ring.names:
            raise UnknownVariableError(name)
    return tuple(images.get(name, ring.zero) for name in ring.names)


def leibniz(images: Sequence[PolyElement], f: PolyElement) -> PolyElement:
    """sum_i (df/dX_i) * images_i in the ambient ring."""
    total = f.ring.zero
    for i, image in enumerate(images):
        if image:
            total += partial_derivative(f, i) * image
    return total


def check_well_defined(
    images: Sequence[PolyElement] | Mapping[str, PolyElement],
    ring: QuotientRing,
    name: str = "D",
) -> Derivation | WellDefinednessFailure:
    if isinstance(images, Mapping):
        images = images_from_mapping(ring, images)
    images = tuple(ring.with_ambient_element(g) for g in images)
    if len(images) != ring.ngens:
        raise DiffalgError(f"expected {ring.ngens} variable images, got {len(images)}")
    for f in ring.relations:
        residue = ring.nf(leibniz(images, f))
        if residue:
            logger.debug("derivation_not_well_defined", derivation=name, relation=format_polynomial(f))
            return WellDefinednessFailure(name, f, residue)
    return Derivation(ring, tuple(ring.nf(g) for g in images), name, verified=True)


def apply_derivation(D: Derivation, f: PolyElement) -> PolyElement:
    if not D.verified:
        raise UnverifiedDerivationError(f"derivation {D.name} has not been verified on {D.ring!r}")
    return D.ring.nf(leibniz(D.images, D.ring.with_ambient_element(f)))


def differential_witness(
    generators: Sequence[PolyElement], derivations: Sequence[Derivation], ring: QuotientRing
) -> tuple[Derivation, PolyElement] | None:
    """A pair (D, g) with D(g) outside J + I, if any."""
    gb = buchberger(list(ring.gb.elements) + list(generators), ring.ambient)
    for D in derivations:
        if not D.verified:
            raise UnverifiedDerivationError(f"derivation {D.name} has not been verified")
        for g in generators:
            if normal_form(leibniz(D.images, g), gb):
                return D, g
    return None


def is_differential_ideal(
    generators: Sequence[PolyElement], derivations: Sequence[Derivation], ring: QuotientRing
) -> bool:
    return differential_witness(generators, derivations, ring) is None


# Maximally differential ideals


@dataclass(frozen=True)
class MaximalDifferentialIdeal:
    """B for a set of derivations; ``steps`` are the dimensions of the fixpoint iterates."""

    generators: tuple[PolyElement, ...]
    mode: str
    certified: bool = True
    steps: tuple[int, ...] = ()
    quotient_length: int | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)


def _full_coords(f: PolyElement, index: Mapping, K) -> list:
    v = [K.zero] * len(index)
    for m, c in f.items():
        v[index[m]] = c
    return v


def _operator(ring: QuotientRing, basis, index, fn) -> list[list]:
    """Columns of a k-linear operator on R given on monomials."""
    return [_full_coords(ring.nf(fn(ring.monomial(m))), index, ring.domain) for m in basis]


def _apply(columns: Sequence[Sequence], v: Sequence, K) -> list:
    out = [K.zero] * len(v)
    for c, coeff in enumerate(v):
        if coeff:
            for r, entry in enumerate(columns[c]):
                if entry:
                    out[r] += coeff * entry
    return out


def stable_subspace(ring: QuotientRing, derivations: Sequence[Derivation]) -> tuple[list[PolyElement], tuple[int, ...]]:
    """Largest subspace of m stable under the derivations and multiplication by the variables.

    Works on the whole k-basis of the artinian ring, graded or not.
    """
    if not ring.is_artinian:
        raise NotArtinianError(f"{ring!r} is not artinian")
    K = ring.domain
    basis = ring.full_basis()
    index = {m: i for i, m in enumerate(basis)}
    n = len(basis)
    operators = [_operator(ring, basis, index, lambda u, x=x: x * u) for x in ring.ambient.gens]
    operators += [_operator(ring, basis, index, lambda u, D=D: leibniz(D.images, u)) for D in derivations]

    one = (0,) * ring.ngens
    start = [[K.one if i == c else K.zero for i in range(n)] for c, m in enumerate(basis) if m != one]
    W = Span(K, n, start)
    steps = [len(W)]
    while len(W):
        rows = W.rows
        functionals = nullspace(rows, n, K)
        equations = []
        for T in operators:
            images = [_apply(T, row, K) for row in rows]
            for lam in functionals:
                equations.append([sum((a * b for a, b in zip(lam, img) if a and b), K.zero) for img in images])
        coefficients = nullspace(equations, len(rows), K)
        shrunk = Span(K, n, [_combine(c, rows, K) for c in coefficients])
        steps.append(len(shrunk))
        if len(shrunk) == len(W):
            break
        W = shrunk
    polys = [ring.ambient.from_dict({basis[i]: c for i, c in enumerate(row) if c}) for row in W.rows]
    return polys, tuple(steps)


def _combine(coefficients: Sequence, rows: Sequence[Sequence], K) -> list:
    out = [K.zero] * len(rows[0])
    for c, row in zip(coefficients, rows):
        if c:
            out = [a + c * b for a, b in zip(out, row)]
    return out


def ideal_generators_of_subspace(ring: QuotientRing, vectors: Sequence[PolyElement]) -> tuple[PolyElement, ...]:
    """Generators of an ideal of R given as a k-subspace closed under the variables."""
    if not vectors:
        return ()
    K = ring.domain
    basis = ring.full_basis()
    index = {m: i for i, m in enumerate(basis)}
    span = Span(K, len(basis), [_full_coords(v, index, K) for v in vectors])
    components = [part for v in vectors for part in homogeneous_components(v).values()]
    if all(span.contains(_full_coords(p, index, K)) for p in components):
        return minimal_generators(IdealBasis.of(ring.ambient, components), ring.gb)
    lower = Span(K, len(basis))
    for v in vectors:
        for x in ring.ambient.gens:
            lower.add(_full_coords(ring.nf(x * v), index, K))
    return tuple(v for v in vectors if lower.add(_full_coords(v, index, K)))


def shortcut_applies(derivations: Sequence[Derivation]) -> bool:
    """Every D maps each variable into m."""
    return all(not constant_term(D.ring.nf(image)) for D in derivations for image in D.images)


def _maximal_ideal_generators(ring: QuotientRing) -> tuple[PolyElement, ...]:
    return minimal_generators(IdealBasis.of(ring.ambient, list(ring.ambient.gens)), ring.gb)


def maximally_differential_ideal(
    ring: QuotientRing,
    derivations: Sequence[Derivation],
    mode: str = "auto",
    candidate: Sequence[PolyElement] | None = None,
) -> MaximalDifferentialIdeal:
    if not derivations:
        raise DiffalgError("at least one derivation is required")
    for D in derivations:
        if not D.verified:
            raise UnverifiedDerivationError(f"derivation {D.name} has not been verified")
    if mode not in {"auto", "shortcut", "fixpoint", "verify"}:
        raise DiffalgError(f"unknown mode {mode}")

    if mode in {"auto", "shortcut"} and shortcut_applies(derivations):
        logger.info("max_differential", mode="shortcut")
        return MaximalDifferentialIdeal(_maximal_ideal_generators(ring), "shortcut")
    if mode == "shortcut":
        raise DiffalgError("some derivation moves a variable outside the maximal ideal")

    if mode == "fixpoint" or (mode == "auto" and ring.is_artinian and candidate is None):
        vectors, steps = stable_subspace(ring, derivations)
        logger.info("max_differential", mode="fixpoint", steps=list(steps))
        return MaximalDifferentialIdeal(ideal_generators_of_subspace(ring, vectors), "fixpoint", True, steps)

    if candidate is None:
        raise NotArtinianError(f"{ring!r} is not artinian; supply a candidate ideal")
    return _verify_candidate(ring, derivations, list(candidate))


def _verify_candidate(
    ring: QuotientRing, derivations: Sequence[Derivation], candidate: list[PolyElement]
) -> MaximalDifferentialIdeal:
    witness = differential_witness(candidate, derivations, ring)
    if witness is not None:
        D, g = witness
        raise CandidateError(f"candidate is not differential: {D.name}({format_polynomial(g)}) leaves it")
    quotient = ring.quotient(candidate, name=f"{ring.name}/B")
    if not quotient.is_artinian:
        raise CandidateError("candidate ideal does not have finite colength")
    induced = []
    for D in derivations:
        result = check_well_defined(D.images, quotient, D.name)
        if not isinstance(result, Derivation):
            raise CandidateError(result.describe())
        induced.append(result)
    vectors, steps = stable_subspace(quotient, induced)
    length = quotient.length
    logger.info("max_differential", mode="verify", steps=list(steps), length=length)
    if not vectors:
        gens = minimal_generators(IdealBasis.of(ring.ambient, candidate), ring.gb)
        return MaximalDifferentialIdeal(gens, "verify", True, steps, length)
    gens = minimal_generators(IdealBasis.of(ring.ambient, candidate + list(ideal_generators_of_subspace(quotient, vectors))), ring.gb)
    return MaximalDifferentialIdeal(
        gens, "verify", False, steps, length, ("the candidate is strictly contained in the maximal differential ideal",)
    )


# The graded space of derivations


@dataclass(frozen=True)
class DerivationSpace:
    """Homogeneous k-basis of Der_k(R), keyed by degree."""

    by_degree: Mapping[int, tuple[Derivation, ...]]
    exact: bool

    def dims_by_degree(self) -> dict[int, int]:
        return {d: len(ds) for d, ds in self.by_degree.items() if ds}

    @property
    def dimension(self) -> int:
        return sum(len(ds) for ds in self.by_degree.values())

    def all(self) -> list[Derivation]:
        return [D for d in sorted(self.by_degree) for D in self.by_degree[d]]


def derivation_space(ring: QuotientRing, bound: int | None = None) -> DerivationSpace:
    """Derivations u*d/dX_i of each degree, cut out by D(f_j) = 0 in R."""
    K = ring.domain
    weights = ring.weights
    lo = -max(weights)
    if ring.is_artinian:
        hi, exact = ring.top_degree - min(weights), True
    else:
        hi, exact = ring.window_span(bound) - min(weights), False
    relations = [f for f in ring.relations]
    partials = [[partial_derivative(f, i) for i in range(ring.ngens)] for f in relations]

    by_degree: dict[int, tuple[Derivation, ...]] = {}
    for delta in range(lo, hi + 1):
        candidates = [(i, u) for i, w in enumerate(weights) for u in ring.basis(w + delta)]
        if not candidates:
            continue
        columns = []
        for i, u in candidates:
            column = []
            for f, row in zip(relations, partials):
                value = ring.nf(row[i] * ring.monomial(u))
                column.extend(ring.coords(value, ring.degree(f) + delta))
            columns.append(column)
        height = len(columns[0])
        rows = [[col[r] for col in columns] for r in range(height)]
        found = []
        for vector in nullspace(rows, len(candidates), K):
            images = [ring.zero] * ring.ngens
            for (i, u), c in zip(candidates, vector):
                if c:
                    images[i] = images[i] + ring.monomial(u).mul_ground(c)
            found.append(Derivation(ring, tuple(images), f"D[{delta}]", verified=True))
        if found:
            by_degree[delta] = tuple(found)
    return DerivationSpace(by_degree, exact)
