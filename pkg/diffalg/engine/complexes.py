"""Complexes of free and presented modules, minimal resolutions and homology."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import structlog

from diffalg.engine.linalg import Span, nullspace
from diffalg.engine.modules import (
    GradedFree,
    GradedMap,
    PresentedModule,
    Window,
    generators_from_pieces,
    kernel_generators,
    minimal_presentation,
    relative_kernel_generators,
    zero_map,
)
from diffalg.engine.rings import QuotientRing
from diffalg.errors import ComplexError

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class PresentedComplex:
    """Modules ``terms[i]`` with maps ``maps[i]: terms[i] -> terms[i-1]`` given on generators."""

    ring: QuotientRing
    terms: Mapping[int, PresentedModule]
    maps: Mapping[int, GradedMap]

    def __post_init__(self) -> None:
        for i, A in self.maps.items():
            if i not in self.terms or i - 1 not in self.terms:
                raise ComplexError(f"map at position {i} has no source or target")
            if A.source.degrees != self.terms[i].degrees or A.target.degrees != self.terms[i - 1].degrees:
                raise ComplexError(f"map at position {i} does not match the generators of its terms")
            target = self.terms[i - 1]
            for column, d in zip(A.compose(self.terms[i].relations).columns, self.terms[i].relations.source.degrees):
                if any(column) and not target.contains(column, d):
                    raise ComplexError(f"map at position {i} does not respect relations")
            if i - 1 in self.maps:
                composite = self.maps[i - 1].compose(A)
                below = self.terms[i - 2]
                for column, d in zip(composite.columns, A.source.degrees):
                    if any(column) and not below.contains(column, d):
                        raise ComplexError(f"d o d is not zero at position {i}")

    @property
    def positions(self) -> list[int]:
        return sorted(self.terms)


@dataclass(frozen=True, eq=False)
class FreeComplex:
    """Graded free modules ``terms[i]`` with differentials ``maps[i]: terms[i] -> terms[i-1]``."""

    ring: QuotientRing
    terms: Mapping[int, GradedFree]
    maps: Mapping[int, GradedMap]

    def __post_init__(self) -> None:
        for i, A in self.maps.items():
            if A.source.degrees != self.terms[i].degrees or A.target.degrees != self.terms[i - 1].degrees:
                raise ComplexError(f"differential at position {i} has the wrong shape")
        if (position := self.first_nonzero_square()) is not None:
            raise ComplexError(f"d o d is not zero at position {position}")

    def first_nonzero_square(self) -> int | None:
        """Smallest i with d_(i-1) o d_i != 0 in R, or None."""
        for i in sorted(self.maps):
            if i - 1 in self.maps and not self.maps[i - 1].compose(self.maps[i]).is_zero:
                return i
        return None

    @property
    def ranks(self) -> list[int]:
        return [self.terms[i].rank for i in sorted(self.terms)]

    def presented(self) -> PresentedComplex:
        terms = {
            i: PresentedModule(F, zero_map(GradedFree(self.ring, ()), F), f"F{i}") for i, F in self.terms.items()
        }
        return PresentedComplex(self.ring, terms, dict(self.maps))

    def dual(self) -> PresentedComplex:
        """Hom(-, R) of the complex, position i moved to -i."""
        terms = {
            -i: PresentedModule.free_module(self.ring, F.dual().degrees, f"F{i}*") for i, F in self.terms.items()
        }
        maps = {-(i - 1): A.transpose() for i, A in self.maps.items()}
        return PresentedComplex(self.ring, terms, maps)


class MinimalResolution:
    """Minimal graded free resolution of a module, extended on demand."""

    def __init__(self, module: PresentedModule, bound: int | None = None):
        self.module = minimal_presentation(module)
        self.ring = module.ring
        self.bound = bound
        self.differentials: list[GradedMap] = [self.module.relations]

    def extend_to(self, length: int) -> "MinimalResolution":
        while len(self.differentials) < length:
            last = self.differentials[-1]
            step = len(self.differentials) + 1
            if last.source.rank == 0:
                nxt = zero_map(GradedFree(self.ring, ()), last.source)
            else:
                nxt = kernel_generators(last, self.bound, what=f"syzygies of {self.module.name} at step {step}")
            self.differentials.append(nxt)
            logger.debug("resolution_step", module=self.module.name, step=step, rank=nxt.source.rank)
        return self

    def free(self, i: int) -> GradedFree:
        if i == 0:
            return self.module.free
        return self.differential(i).source

    def differential(self, i: int) -> GradedMap:
        """d_i: F_i -> F_(i-1), for i >= 1."""
        self.extend_to(i)
        return self.differentials[i - 1]

    def ranks(self, length: int) -> list[int]:
        self.extend_to(length)
        return [self.free(i).rank for i in range(length + 1)]

    def complex(self, length: int) -> FreeComplex:
        self.extend_to(length)
        terms = {i: self.free(i) for i in range(length + 1)}
        maps = {i: self.differential(i) for i in range(1, length + 1)}
        return FreeComplex(self.ring, terms, maps)


def free_resolution(module: PresentedModule, length: int, bound: int | None = None) -> FreeComplex:
    logger.info("free_resolution", module=module.name, length=length)
    return MinimalResolution(module, bound).complex(length)


@dataclass(frozen=True)
class HomologyResult:
    """dim_k of a homology module, degree by degree, with an optional presentation."""

    dimension: int
    by_degree: Mapping[int, int]
    exact: bool
    module: PresentedModule | None = field(default=None, compare=False)

    @property
    def is_zero(self) -> bool:
        return self.dimension == 0


def _cycle_piece(complex_: PresentedComplex, i: int, d: int) -> list[list]:
    K = complex_.ring.domain
    F = complex_.terms[i].free
    size = F.dim(d)
    if size == 0:
        return []
    A = complex_.maps.get(i)
    if A is None:
        return [[K.one if r == c else K.zero for r in range(size)] for c in range(size)]
    below = complex_.terms[i - 1].relations
    n_r = below.source.dim(d)
    rows = [ra + rr for ra, rr in zip(A.piece(d), below.piece(d))]
    return [v[:size] for v in nullspace(rows, size + n_r, K) if any(v[:size])]


def _boundary_map(complex_: PresentedComplex, i: int) -> GradedMap:
    """Everything that is zero in H_i: images from position i+1 and the relations at i."""
    term = complex_.terms[i]
    F = term.free
    columns = list(term.relations.columns)
    degrees = list(term.relations.source.degrees)
    incoming = complex_.maps.get(i + 1)
    if incoming is not None:
        columns += list(incoming.columns)
        degrees += list(incoming.source.degrees)
    return GradedMap(GradedFree(complex_.ring, tuple(degrees)), F, tuple(columns))


def homology_of_complex(
    complex_: PresentedComplex | FreeComplex,
    i: int,
    bound: int | None = None,
    with_module: bool = False,
    window: Window | None = None,
) -> HomologyResult:
    """H_i = ker(d_i) / im(d_(i+1)), computed degree by degree."""
    if isinstance(complex_, FreeComplex):
        complex_ = complex_.presented()
    if i not in complex_.terms:
        return HomologyResult(0, {}, True)
    ring = complex_.ring
    K = ring.domain
    F = complex_.terms[i].free
    window = window or F.window(bound)
    boundaries = _boundary_map(complex_, i)

    by_degree: dict[int, int] = {}
    for d in window.degrees():
        cycles = Span(K, F.dim(d), _cycle_piece(complex_, i, d))
        if not len(cycles):
            continue
        image = Span(K, F.dim(d), boundaries.image_vectors(d))
        n = len(cycles) - len(image)
        if n < 0:
            raise ComplexError(f"boundaries exceed cycles in degree {d} at position {i}")
        if n:
            by_degree[d] = n

    module = None
    if with_module:
        found = generators_from_pieces(F, window, lambda d: _cycle_piece(complex_, i, d), what=f"cycles at {i}")
        E = GradedFree(ring, tuple(d for _, d in found))
        Z = GradedMap(E, F, tuple(c for c, _ in found))
        relations = relative_kernel_generators(Z, boundaries, bound, what=f"homology relations at {i}")
        module = minimal_presentation(PresentedModule(E, relations, f"H{i}"))
    return HomologyResult(sum(by_degree.values()), by_degree, window.exact, module)


def identity_complex(module: PresentedModule) -> PresentedComplex:
    """0 -> M -> M -> 0 with the identity map, in positions 1 and 0."""
    F = module.free
    identity = GradedMap(F, F, tuple(F.unit(j) for j in range(F.rank)))
    return PresentedComplex(module.ring, {1: module, 0: module}, {1: identity})


def koszul_complex(ring: QuotientRing, f) -> FreeComplex:
    """0 -> R(-deg f) -> R -> 0 given by multiplication with f."""
    f = ring.nf(f)
    d = ring.degree(f) if f else 0
    source = GradedFree(ring, (d,))
    target = GradedFree(ring, (0,))
    return FreeComplex(ring, {1: source, 0: target}, {1: GradedMap(source, target, ((f,),))})
