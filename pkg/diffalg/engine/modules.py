"""Graded free modules, homogeneous maps and finitely presented modules.

All module computations run degree by degree: the piece of degree d of a
graded free module F = R(-a_1) + ... + R(-a_g) has the basis of pairs (j, u)
with u a standard monomial of degree d - a_j. On artinian rings every
computation is exact; otherwise it runs in a degree window and any generator
found too close to the top of the window raises TruncationError.

A map F -> G is given by its columns: column i is the image of the i-th
generator of F, so that entry (j, i) has degree deg F_i - deg G_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import structlog
from sympy.polys.rings import PolyElement

from diffalg.engine.core import Monomial, format_polynomial
from diffalg.engine.groebner import IdealBasis, minimal_generators
from diffalg.engine.linalg import Span, columns_to_rows, nullspace
from diffalg.engine.rings import QuotientRing
from diffalg.errors import (
    ComplexError,
    DiffalgError,
    InfiniteStaircaseError,
    InhomogeneousError,
    TruncationError,
)

logger = structlog.get_logger()

Column = tuple[PolyElement, ...]


@dataclass(frozen=True)
class Window:
    """Degrees [lo, hi] in which a graded computation runs."""

    lo: int
    hi: int
    exact: bool
    margin: int = 0

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def certify(self, degree: int, what: str) -> None:
        if not self.exact and degree > self.hi - self.margin:
            raise TruncationError(degree, self.hi, what)

    def union(self, other: "Window") -> "Window":
        if other.lo > other.hi:
            return self
        if self.lo > self.hi:
            return other
        return Window(min(self.lo, other.lo), max(self.hi, other.hi), self.exact and other.exact, max(self.margin, other.margin))


def window_for(ring: QuotientRing, degrees: Sequence[int], bound: int | None = None) -> Window:
    if not degrees:
        return Window(0, -1, True)
    lo, top = min(degrees), max(degrees)
    if ring.is_artinian:
        return Window(lo, top + ring.top_degree, True)
    return Window(lo, top + ring.window_span(bound), False, ring.margin)


@dataclass(frozen=True, eq=False)
class GradedFree:
    """R(-a_1) + ... + R(-a_g), generator j in degree a_j."""

    ring: QuotientRing
    degrees: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def basis(self, degree: int) -> list[tuple[int, Monomial]]:
        return [(j, u) for j, a in enumerate(self.degrees) for u in self.ring.basis(degree - a)]

    def dim(self, degree: int) -> int:
        return sum(self.ring.dim(degree - a) for a in self.degrees)

    def zero(self) -> Column:
        return tuple(self.ring.zero for _ in self.degrees)

    def unit(self, j: int) -> Column:
        return tuple(self.ring.one if k == j else self.ring.zero for k in range(self.rank))

    def basis_element(self, degree: int, index: int) -> Column:
        j, u = self.basis(degree)[index]
        column = list(self.zero())
        column[j] = self.ring.monomial(u)
        return tuple(column)

    def coords(self, column: Column, degree: int) -> list:
        out: list = []
        for entry, a in zip(column, self.degrees):
            out.extend(self.ring.coords(entry, degree - a))
        return out

    def element(self, vector: Sequence, degree: int) -> Column:
        entries = []
        start = 0
        for a in self.degrees:
            size = self.ring.dim(degree - a)
            entries.append(self.ring.from_coords(vector[start:start + size], degree - a))
            start += size
        return tuple(entries)

    def multiply(self, column: Column, f: PolyElement) -> Column:
        return tuple(self.ring.nf(f * c) if c else c for c in column)

    def add(self, first: Column, second: Column) -> Column:
        return tuple(a + b for a, b in zip(first, second))

    def column_degree(self, column: Column) -> int | None:
        for entry, a in zip(column, self.degrees):
            if entry:
                return self.ring.degree(entry) + a
        return None

    def dual(self) -> "GradedFree":
        return GradedFree(self.ring, tuple(-a for a in self.degrees))

    def shift(self, s: int) -> "GradedFree":
        return GradedFree(self.ring, tuple(a + s for a in self.degrees))

    def window(self, bound: int | None = None) -> Window:
        return window_for(self.ring, self.degrees, bound)


@dataclass(frozen=True, eq=False)
class GradedMap:
    """Homogeneous R-linear map of degree zero between graded free modules."""

    source: GradedFree
    target: GradedFree
    columns: tuple[Column, ...]
    _pieces: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        ring = self.source.ring
        if len(self.columns) != self.source.rank:
            raise ComplexError(f"map has {len(self.columns)} columns for a source of rank {self.source.rank}")
        normal = []
        for i, column in enumerate(self.columns):
            if len(column) != self.target.rank:
                raise ComplexError(f"column {i} has {len(column)} entries for a target of rank {self.target.rank}")
            column = tuple(ring.nf(entry) for entry in column)
            for j, entry in enumerate(column):
                if entry and (
                    not ring.is_homogeneous(entry)
                    or ring.degree(entry) != self.source.degrees[i] - self.target.degrees[j]
                ):
                    raise InhomogeneousError(
                        f"entry ({j},{i}) = {format_polynomial(entry)} does not have degree "
                        f"{self.source.degrees[i] - self.target.degrees[j]}"
                    )
            normal.append(column)
        object.__setattr__(self, "columns", tuple(normal))

    @property
    def ring(self) -> QuotientRing:
        return self.source.ring

    def entry(self, j: int, i: int) -> PolyElement:
        return self.columns[i][j]

    def rows(self) -> list[list[PolyElement]]:
        return [[self.columns[i][j] for i in range(self.source.rank)] for j in range(self.target.rank)]

    @property
    def is_zero(self) -> bool:
        return not any(entry for column in self.columns for entry in column)

    def apply(self, column: Column) -> Column:
        out = list(self.target.zero())
        for coeff, image in zip(column, self.columns):
            if coeff:
                for j, entry in enumerate(image):
                    if entry:
                        out[j] = out[j] + coeff * entry
        return tuple(self.ring.nf(e) for e in out)

    def image_vectors(self, degree: int) -> list[list]:
        """Coordinates in target_degree of the images of the basis of source_degree."""
        if degree not in self._pieces:
            ring = self.ring
            vectors = []
            for j, u in self.source.basis(degree):
                image = self.target.multiply(self.columns[j], ring.monomial(u))
                vectors.append(self.target.coords(image, degree))
            self._pieces[degree] = vectors
        return self._pieces[degree]

    def piece(self, degree: int) -> list[list]:
        """Matrix of the map source_degree -> target_degree, as rows."""
        return columns_to_rows(self.image_vectors(degree), self.target.dim(degree), self.ring.domain)

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self o inner."""
        return GradedMap(inner.source, self.target, tuple(self.apply(c) for c in inner.columns))

    def transpose(self) -> "GradedMap":
        """The dual map Hom(target, R) -> Hom(source, R)."""
        columns = tuple(
            tuple(self.columns[i][j] for i in range(self.source.rank)) for j in range(self.target.rank)
        )
        return GradedMap(self.target.dual(), self.source.dual(), columns)

    def restrict(self, keep: Sequence[int]) -> "GradedMap":
        source = GradedFree(self.ring, tuple(self.source.degrees[i] for i in keep))
        return GradedMap(source, self.target, tuple(self.columns[i] for i in keep))


def zero_map(source: GradedFree, target: GradedFree) -> GradedMap:
    return GradedMap(source, target, tuple(target.zero() for _ in range(source.rank)))


@dataclass(frozen=True, eq=False)
class PresentedModule:
    """M = coker(relations: F1 -> F0), generated in the degrees of F0."""

    free: GradedFree
    relations: GradedMap
    name: str = "M"
    _quotients: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.relations.target is not self.free and self.relations.target.degrees != self.free.degrees:
            raise ComplexError("relations do not land in the generators of the module")

    @classmethod
    def from_columns(
        cls,
        ring: QuotientRing,
        degrees: Sequence[int],
        columns: Sequence[Column],
        relation_degrees: Sequence[int] | None = None,
        name: str = "M",
    ) -> "PresentedModule":
        """Presentation from relation columns; zero columns need explicit degrees or are dropped."""
        free = GradedFree(ring, tuple(degrees))
        columns = [tuple(ring.nf(e) for e in c) for c in columns]
        if relation_degrees is None:
            kept = [(c, free.column_degree(c)) for c in columns]
            kept = [(c, d) for c, d in kept if d is not None]
        else:
            kept = list(zip(columns, relation_degrees))
        source = GradedFree(ring, tuple(d for _, d in kept))
        return cls(free, GradedMap(source, free, tuple(c for c, _ in kept)), name)

    @classmethod
    def free_module(cls, ring: QuotientRing, degrees: Sequence[int], name: str = "F") -> "PresentedModule":
        free = GradedFree(ring, tuple(degrees))
        return cls(free, zero_map(GradedFree(ring, ()), free), name)

    @property
    def ring(self) -> QuotientRing:
        return self.free.ring

    @property
    def ngens(self) -> int:
        return self.free.rank

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.free.degrees

    def relation_span(self, degree: int) -> Span:
        """Span of the relations inside the degree piece of the generators."""
        if degree not in self._quotients:
            self._quotients[degree] = Span(
                self.ring.domain, self.free.dim(degree), self.relations.image_vectors(degree)
            )
        return self._quotients[degree]

    def dim(self, degree: int) -> int:
        return self.free.dim(degree) - len(self.relation_span(degree))

    def window(self, bound: int | None = None) -> Window:
        return self.free.window(bound)

    def dims_by_degree(self, bound: int | None = None) -> dict[int, int]:
        out = {}
        for d in self.window(bound).degrees():
            n = self.dim(d)
            if n:
                out[d] = n
        return out

    def total_dimension(self, bound: int | None = None) -> int:
        return sum(self.dims_by_degree(bound).values())

    def contains(self, column: Column, degree: int) -> bool:
        """Whether a homogeneous column of F0 maps to zero in M."""
        return self.relation_span(degree).contains(self.free.coords(column, degree))

    def rename(self, name: str) -> "PresentedModule":
        return PresentedModule(self.free, self.relations, name)


@dataclass(frozen=True)
class KRealization:
    """A k-basis of a module with the matrices of multiplication by each variable."""

    degrees: tuple[int, ...]
    multiplication: tuple[tuple[tuple, ...], ...]
    exact: bool

    @property
    def dimension(self) -> int:
        return len(self.degrees)

    def dims_by_degree(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for d in self.degrees:
            counts[d] = counts.get(d, 0) + 1
        return counts


def k_realize(module: PresentedModule, degree_bound: int | None = None) -> KRealization:
    ring = module.ring
    if not ring.is_artinian and degree_bound is None:
        raise InfiniteStaircaseError(f"{module.name} is infinite-dimensional; supply a degree bound")
    K = ring.domain
    window = module.window(degree_bound)
    free = module.free
    offsets: dict[int, int] = {}
    degrees: list[int] = []
    for d in window.degrees():
        offsets[d] = len(degrees)
        degrees.extend([d] * module.dim(d))
    n = len(degrees)

    matrices = []
    for k, w in enumerate(ring.weights):
        x = ring.ambient.gens[k]
        rows = [[K.zero] * n for _ in range(n)]
        for d in window.degrees():
            target = d + w
            if target > window.hi:
                continue
            span = module.relation_span(d)
            target_span = module.relation_span(target)
            for local, c in enumerate(span.complement()):
                image = free.multiply(free.basis_element(d, c), x)
                coords = target_span.quotient_coordinates(free.coords(image, target))
                column = offsets[d] + local
                for r, value in enumerate(coords):
                    if value:
                        rows[offsets[target] + r][column] = value
        matrices.append(tuple(tuple(r) for r in rows))
    return KRealization(tuple(degrees), tuple(matrices), window.exact)


# Minimal generators of graded submodules


def generators_from_pieces(
    free: GradedFree,
    window: Window,
    piece: Callable[[int], Sequence[Sequence]],
    what: str,
) -> list[tuple[Column, int]]:
    """Minimal homogeneous generators of a graded submodule N of ``free``.

    ``piece(d)`` spans N_d. A vector of N_d is a new generator when it is not
    in (mN)_d + (generators chosen so far).
    """
    ring = free.ring
    K = ring.domain
    stored: dict[int, list[Column]] = {}
    found: list[tuple[Column, int]] = []
    for d in window.degrees():
        size = free.dim(d)
        if size == 0:
            continue
        vectors = piece(d)
        if not vectors:
            continue
        full = Span(K, size, vectors)
        if not len(full):
            continue
        lower = Span(K, size)
        for k, w in enumerate(ring.weights):
            x = ring.ambient.gens[k]
            for column in stored.get(d - w, ()):
                lower.add(free.coords(free.multiply(column, x), d))
        for vector in full.rows:
            if lower.add(vector):
                found.append((free.element(vector, d), d))
        stored[d] = [free.element(v, d) for v in full.rows]
    for _, d in found:
        window.certify(d, what)
    return found


def minimal_columns(free: GradedFree, columns: Sequence[Column], degrees: Sequence[int]) -> list[int]:
    """Indices of a minimal subset of homogeneous columns generating the same submodule."""
    ring = free.ring
    K = ring.domain
    live = [i for i, c in enumerate(columns) if any(c)]
    kept: list[int] = []
    for d in sorted({degrees[i] for i in live}):
        span = Span(K, free.dim(d))
        for i in live:
            e = d - degrees[i]
            if e <= 0:
                continue
            for u in ring.basis(e):
                span.add(free.coords(free.multiply(columns[i], ring.monomial(u)), d))
        for i in live:
            if degrees[i] == d and span.add(free.coords(columns[i], d)):
                kept.append(i)
    return kept


def kernel_generators(A: GradedMap, bound: int | None = None, what: str = "kernel") -> GradedMap:
    """Minimal generators of ker A, as a map E -> source."""
    ring = A.ring
    K = ring.domain
    window = A.source.window(bound)

    def piece(d: int) -> list[list]:
        size = A.source.dim(d)
        if size == 0:
            return []
        return nullspace(A.piece(d), size, K)

    found = generators_from_pieces(A.source, window, piece, what)
    E = GradedFree(ring, tuple(d for _, d in found))
    return GradedMap(E, A.source, tuple(c for c, _ in found))


def relative_kernel_generators(
    A: GradedMap, relations: GradedMap, bound: int | None = None, what: str = "kernel"
) -> GradedMap:
    """Minimal generators of {v : A v in im(relations)}, as a map E -> A.source."""
    ring = A.ring
    K = ring.domain
    window = A.source.window(bound)

    def piece(d: int) -> list[list]:
        n_a = A.source.dim(d)
        if n_a == 0:
            return []
        n_r = relations.source.dim(d)
        rows = [ra + rr for ra, rr in zip(A.piece(d), relations.piece(d))]
        return [v[:n_a] for v in nullspace(rows, n_a + n_r, K) if any(v[:n_a])]

    found = generators_from_pieces(A.source, window, piece, what)
    E = GradedFree(ring, tuple(d for _, d in found))
    return GradedMap(E, A.source, tuple(c for c, _ in found))


def minimal_presentation(module: PresentedModule) -> PresentedModule:
    """Remove unit entries, then redundant relations."""
    ring = module.ring
    degrees = list(module.degrees)
    columns = [list(c) for c in module.relations.columns]
    relation_degrees = list(module.relations.source.degrees)

    while True:
        pivot = None
        for i, column in enumerate(columns):
            for j, entry in enumerate(column):
                if entry and entry.is_ground:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        unit = columns[i][j]
        inverse = ring.domain.quo(ring.domain.one, unit.LC)
        reduced = []
        for k, column in enumerate(columns):
            if k == i:
                continue
            factor = column[j]
            if factor:
                scale = factor.mul_ground(inverse)
                column = [ring.nf(a - scale * b) for a, b in zip(column, columns[i])]
            reduced.append((column[:j] + column[j + 1:], relation_degrees[k]))
        columns = [c for c, _ in reduced]
        relation_degrees = [d for _, d in reduced]
        degrees.pop(j)

    free = GradedFree(ring, tuple(degrees))
    tuples = [tuple(c) for c in columns]
    keep = minimal_columns(free, tuples, relation_degrees)
    source = GradedFree(ring, tuple(relation_degrees[i] for i in keep))
    return PresentedModule(free, GradedMap(source, free, tuple(tuples[i] for i in keep)), module.name)


def syzygies(module: PresentedModule, bound: int | None = None) -> PresentedModule:
    """ker(F0 -> M) for the generators M is given with.

    Redundant relations are dropped first, so the kernel presentation has no
    unit entries. For Syz_d of a minimal resolution use ``syzygy_module``.
    """
    P = module.relations
    keep = minimal_columns(P.target, P.columns, P.source.degrees)
    source = GradedFree(module.ring, tuple(P.source.degrees[i] for i in keep))
    generators = GradedMap(source, P.target, tuple(P.columns[i] for i in keep))
    if source.rank == 0:
        relations = zero_map(GradedFree(module.ring, ()), source)
    else:
        relations = kernel_generators(generators, bound, what=f"syzygies of {module.name}")
    return PresentedModule(source, relations, f"Syz1({module.name})")


# Constructors


def free_module(ring: QuotientRing, rank: int = 1, name: str | None = None) -> PresentedModule:
    return PresentedModule.free_module(ring, (0,) * rank, name or (f"R^{rank}" if rank != 1 else "R"))


def cyclic_module(ring: QuotientRing, generators: Sequence[PolyElement], name: str = "R/J") -> PresentedModule:
    """R/J presented by one generator in degree 0."""
    columns = [(ring.nf(g),) for g in generators]
    return PresentedModule.from_columns(ring, (0,), columns, name=name)


def residue_field(ring: QuotientRing) -> PresentedModule:
    return cyclic_module(ring, ring.ambient.gens, name="k")


def ideal_module(
    ring: QuotientRing,
    generators: Sequence[PolyElement],
    bound: int | None = None,
    name: str = "J",
) -> PresentedModule:
    """The ideal J of R as a module on its minimal generators."""
    gens = minimal_generators(IdealBasis.of(ring.ambient, list(generators)), ring.gb)
    if not gens:
        return PresentedModule.free_module(ring, (), name)
    source = GradedFree(ring, tuple(ring.degree(g) for g in gens))
    inclusion = GradedMap(source, GradedFree(ring, (0,)), tuple((g,) for g in gens))
    relations = kernel_generators(inclusion, bound, what=f"relations of {name}")
    return PresentedModule(source, relations, name)


def maximal_ideal(ring: QuotientRing, bound: int | None = None) -> PresentedModule:
    return ideal_module(ring, ring.ambient.gens, bound, name="m")


def direct_sum(first: PresentedModule, second: PresentedModule, name: str | None = None) -> PresentedModule:
    ring = first.ring
    if second.ring is not ring:
        raise DiffalgError("direct sum of modules over different rings")
    g1, g2 = first.ngens, second.ngens
    free = GradedFree(ring, first.degrees + second.degrees)
    zero = ring.zero
    columns = [tuple(c) + (zero,) * g2 for c in first.relations.columns]
    columns += [(zero,) * g1 + tuple(c) for c in second.relations.columns]
    source = GradedFree(ring, first.relations.source.degrees + second.relations.source.degrees)
    return PresentedModule(free, GradedMap(source, free, tuple(columns)), name or f"{first.name}+{second.name}")
