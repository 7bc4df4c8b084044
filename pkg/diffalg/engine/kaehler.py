"""Kähler differentials, the module of derivations, rank and freeness."""

from __future__ import annotations

from dataclasses import dataclass

import structlog
from sympy.polys.rings import PolyElement

from diffalg.engine.core import constant_term, partial_derivative
from diffalg.engine.derivations import DerivationSpace, derivation_space
from diffalg.engine.homology import HomDual, hom_dual
from diffalg.engine.linalg import nullspace, rank
from diffalg.engine.modules import GradedMap, PresentedModule
from diffalg.engine.rings import QuotientRing
from diffalg.errors import RouteDisagreementError, UnsupportedRingError

logger = structlog.get_logger()


@dataclass(frozen=True)
class JacobianMatrix:
    """Entry (j, i) is the partial derivative of relation j by variable i, in S."""

    generators: tuple[PolyElement, ...]
    entries: tuple[tuple[PolyElement, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0]) if self.entries else 0

    def over(self, ring: QuotientRing) -> tuple[tuple[PolyElement, ...], ...]:
        return tuple(tuple(ring.nf(e) for e in row) for row in self.entries)

    def is_zero_over(self, ring: QuotientRing) -> bool:
        return not any(e for row in self.over(ring) for e in row)


def jacobian_matrix(ring: QuotientRing) -> JacobianMatrix:
    gens = ring.relations
    entries = tuple(tuple(partial_derivative(f, i) for i in range(ring.ngens)) for f in gens)
    return JacobianMatrix(gens, entries)


def omega_presentation(ring: QuotientRing) -> PresentedModule:
    """Omega_{R/k}: generators dX_i in degree w_i, one relation df_j per defining relation."""
    jacobian = jacobian_matrix(ring)
    columns = jacobian.over(ring)
    degrees = [ring.degree(f) for f in jacobian.generators]
    return PresentedModule.from_columns(ring, ring.weights, columns, degrees, name="Omega")


@dataclass(frozen=True)
class DerModule:
    """Der_k(R) as Hom(Omega, R), cross-checked against the derivation space."""

    dual: HomDual
    space: DerivationSpace
    dims_by_degree: dict[int, int]
    exact: bool

    @property
    def module(self) -> PresentedModule:
        return self.dual.module

    @property
    def embedding(self) -> GradedMap:
        return self.dual.embedding

    @property
    def dimension(self) -> int:
        return sum(self.dims_by_degree.values())


def der_module(ring: QuotientRing, bound: int | None = None) -> DerModule:
    omega = omega_presentation(ring)
    dual = hom_dual(omega, bound)
    transposed = omega.relations.transpose()
    K = ring.domain
    window = transposed.source.window(bound)
    dims_a = {}
    for d in window.degrees():
        size = transposed.source.dim(d)
        if size:
            n = len(nullspace(transposed.piece(d), size, K))
            if n:
                dims_a[d] = n
    space = derivation_space(ring, bound)
    dims_b = space.dims_by_degree()
    if dims_a != dims_b:
        logger.error("der_route_disagreement", hom_dual=dims_a, derivation_space=dims_b)
        raise RouteDisagreementError(f"Hom(Omega, R) has dimensions {dims_a} but derivations give {dims_b}")
    return DerModule(HomDual(dual.module.rename("Der"), dual.embedding), space, dims_a, window.exact)


@dataclass(frozen=True)
class DerCokernel:
    module: PresentedModule
    dimension: int
    killed_by_maximal_ideal: bool


def der_cokernel(ring: QuotientRing, bound: int | None = None) -> DerCokernel:
    """coker(Der_k(R) -> R^n), the inclusion sending D to (D(x_1), ..., D(x_n))."""
    der = der_module(ring, bound)
    C = der.embedding
    module = PresentedModule(C.target, C, "coker(Der)")
    killed = True
    for j, a in enumerate(module.degrees):
        e = module.free.unit(j)
        for k, w in enumerate(ring.weights):
            image = module.free.multiply(e, ring.ambient.gens[k])
            if any(image) and not module.contains(image, a + w):
                killed = False
    return DerCokernel(module, module.total_dimension(bound), killed)


def minimal_number_of_generators(module: PresentedModule) -> int:
    """mu(M) = g - rank_k of the constant part of the presentation matrix."""
    K = module.ring.domain
    rows = [[constant_term(e) for e in row] for row in module.relations.rows()]
    return module.ngens - rank(rows, module.relations.source.rank, K)


def module_rank(module: PresentedModule) -> int:
    """Rank over the fraction field of a domain, by fraction-free elimination."""
    ring = module.ring
    if not ring.is_domain:
        raise UnsupportedRingError("module rank needs a ring asserted to be a domain")
    rows = [list(row) for row in module.relations.rows()]
    ncols = module.relations.source.rank
    pivots = 0
    for c in range(ncols):
        pivot = next((r for r in range(pivots, len(rows)) if rows[r][c]), None)
        if pivot is None:
            continue
        rows[pivots], rows[pivot] = rows[pivot], rows[pivots]
        p_row = rows[pivots]
        for r in range(pivots + 1, len(rows)):
            a = rows[r][c]
            if a:
                rows[r] = [ring.nf(p_row[c] * x - a * y) for x, y in zip(rows[r], p_row)]
        pivots += 1
    return module.ngens - pivots


@dataclass(frozen=True)
class FreenessCertificate:
    free: bool
    mu: int
    reason: str
    rank: int | None = None


def is_free(module: PresentedModule, bound: int | None = None) -> FreenessCertificate:
    ring = module.ring
    mu = minimal_number_of_generators(module)
    if ring.is_artinian:
        dim = module.total_dimension()
        expected = mu * ring.length
        ok = dim == expected
        relation = "=" if ok else "!="
        return FreenessCertificate(ok, mu, f"dim {dim} {relation} mu*length = {mu}*{ring.length}", mu if ok else None)
    if ring.is_domain:
        r = module_rank(module)
        ok = mu == r
        relation = "=" if ok else "!="
        return FreenessCertificate(ok, mu, f"mu {mu} {relation} rank {r}", r)
    raise UnsupportedRingError("freeness is decided only over artinian rings and graded domains")


def omega_is_free(ring: QuotientRing) -> FreenessCertificate:
    return is_free(omega_presentation(ring))

