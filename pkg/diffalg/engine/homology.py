"""Duals, Ext, Tor and the biduality map for graded presented modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import structlog

from diffalg.engine.complexes import (
    HomologyResult,
    MinimalResolution,
    PresentedComplex,
    homology_of_complex,
)
from diffalg.engine.linalg import Span, nullspace, rank
from diffalg.engine.modules import (
    GradedFree,
    GradedMap,
    PresentedModule,
    kernel_generators,
)
from diffalg.errors import IndexRangeError

logger = structlog.get_logger()


@dataclass(frozen=True)
class HomDual:
    """Hom(M, R) presented on the generators of ker(P^T), with their embedding in F0*."""

    module: PresentedModule
    embedding: GradedMap


def hom_dual(module: PresentedModule, bound: int | None = None) -> HomDual:
    transposed = module.relations.transpose()
    generators = kernel_generators(transposed, bound, what=f"generators of {module.name}*")
    relations = kernel_generators(generators, bound, what=f"relations of {module.name}*")
    logger.debug("hom_dual", module=module.name, generators=generators.source.rank)
    return HomDual(PresentedModule(generators.source, relations, f"{module.name}*"), generators)


def ext_module(
    module: PresentedModule,
    i: int,
    bound: int | None = None,
    resolution: MinimalResolution | None = None,
    with_module: bool = True,
) -> HomologyResult:
    """Ext^i(M, R) as the homology of the dualized minimal resolution."""
    if i < 0:
        raise IndexRangeError(f"Ext index must be nonnegative, got {i}")
    resolution = resolution or MinimalResolution(module, bound)
    dual = resolution.complex(i + 1).dual()
    logger.debug("ext", module=module.name, index=i)
    return homology_of_complex(dual, -i, bound, with_module=with_module)


def ext_dim(module: PresentedModule, i: int, bound: int | None = None) -> tuple[PresentedModule | None, int]:
    result = ext_module(module, i, bound)
    return result.module, result.dimension


def ext_dims(module: PresentedModule, upto: int, bound: int | None = None) -> list[int]:
    """dim_k Ext^i(M, R) for 1 <= i <= upto, from one resolution."""
    resolution = MinimalResolution(module, bound)
    return [ext_module(module, i, bound, resolution, with_module=False).dimension for i in range(1, upto + 1)]


def _tensor_term(F: GradedFree, N: PresentedModule, name: str) -> PresentedModule:
    """F tensor N as a direct sum of shifted copies of N."""
    ring = N.ring
    g = N.ngens
    degrees = tuple(b + a for b in F.degrees for a in N.degrees)
    free = GradedFree(ring, degrees)
    columns = []
    relation_degrees = []
    zero = ring.zero
    for block, b in enumerate(F.degrees):
        for column, s in zip(N.relations.columns, N.relations.source.degrees):
            full = [zero] * (F.rank * g)
            full[block * g:(block + 1) * g] = column
            columns.append(tuple(full))
            relation_degrees.append(b + s)
    source = GradedFree(ring, tuple(relation_degrees))
    return PresentedModule(free, GradedMap(source, free, tuple(columns)), name)


def _tensor_map(A: GradedMap, N: PresentedModule, source: PresentedModule, target: PresentedModule) -> GradedMap:
    ring = N.ring
    g = N.ngens
    columns = []
    for i in range(A.source.rank):
        for m in range(g):
            full = [ring.zero] * (A.target.rank * g)
            for l in range(A.target.rank):
                full[l * g + m] = A.columns[i][l]
            columns.append(tuple(full))
    return GradedMap(source.free, target.free, tuple(columns))


def tor_module(
    module: PresentedModule,
    other: PresentedModule,
    i: int,
    bound: int | None = None,
    with_module: bool = False,
) -> HomologyResult:
    """Tor_i(M, N) as the homology of F tensor N for a minimal resolution F of M."""
    if i < 0:
        raise IndexRangeError(f"Tor index must be nonnegative, got {i}")
    complex_ = MinimalResolution(module, bound).complex(i + 1)
    terms = {j: _tensor_term(F, other, f"F{j}({other.name})") for j, F in complex_.terms.items()}
    maps = {j: _tensor_map(A, other, terms[j], terms[j - 1]) for j, A in complex_.maps.items()}
    tensored = PresentedComplex(module.ring, terms, maps)
    logger.debug("tor", module=module.name, other=other.name, index=i)
    return homology_of_complex(tensored, i, bound, with_module=with_module)


def tor_dim(module: PresentedModule, other: PresentedModule, i: int, bound: int | None = None) -> tuple[PresentedModule | None, int]:
    result = tor_module(module, other, i, bound, with_module=True)
    return result.module, result.dimension


def syzygy_module(module: PresentedModule, d: int, bound: int | None = None) -> PresentedModule:
    """Syz_d(M) = coker(d_(d+1)) of the minimal resolution; Syz_0(M) = M."""
    if d < 0:
        raise IndexRangeError(f"syzygy index must be nonnegative, got {d}")
    resolution = MinimalResolution(module, bound)
    if d == 0:
        return resolution.module
    return PresentedModule(resolution.free(d), resolution.differential(d + 1), f"Syz{d}({module.name})")


@dataclass(frozen=True)
class BidualityResult:
    """Whether M -> M** is bijective, degree by degree."""

    iso: bool
    evaluation: GradedMap
    failures: tuple[tuple[int, int, int, int], ...]
    exact: bool
    dual: HomDual | None = field(default=None, compare=False)

    @property
    def injective(self) -> bool:
        return all(rank_ == dim_m for _, dim_m, rank_, _ in self.failures)

    @property
    def surjective(self) -> bool:
        return all(rank_ == dim_bidual for _, _, rank_, dim_bidual in self.failures)


def biduality_is_iso(module: PresentedModule, bound: int | None = None) -> BidualityResult:
    """Test M -> M**, m -> (phi -> phi(m)), in every degree of the window.

    With C the generators of M* inside F0*, the evaluation map sends the j-th
    generator of M to row j of C, an element of the dual of the free module on
    the generators of M*; M** is the kernel of the transposed relations of M*.
    """
    ring = module.ring
    K = ring.domain
    dual = hom_dual(module, bound)
    C = dual.embedding
    evaluation = C.transpose()
    bidual_equations = dual.module.relations.transpose()
    E_star = evaluation.target

    window = module.window(bound).union(E_star.window(bound))
    failures = []
    for d in window.degrees():
        size = module.free.dim(d)
        dim_m = module.dim(d)
        image = Span(K, E_star.dim(d), evaluation.image_vectors(d)) if size else Span(K, E_star.dim(d))
        dim_bidual = len(nullspace(bidual_equations.piece(d), E_star.dim(d), K)) if E_star.dim(d) else 0
        if not (len(image) == dim_m == dim_bidual):
            failures.append((d, dim_m, len(image), dim_bidual))
    logger.debug("biduality", module=module.name, failures=len(failures))
    return BidualityResult(not failures, evaluation, tuple(failures), window.exact, dual)


def module_is_zero(module: PresentedModule, bound: int | None = None) -> bool:
    return module.total_dimension(bound) == 0


def rank_of_piece(A: GradedMap, d: int) -> int:
    return rank(A.piece(d), A.source.dim(d), A.ring.domain)
