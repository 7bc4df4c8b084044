"""Socle, Gorenstein and complete-intersection verdicts, depth and G-dimension evidence."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Sequence

import structlog
from sympy.polys.rings import PolyElement

from diffalg.engine.complexes import MinimalResolution
from diffalg.engine.core import format_polynomial
from diffalg.engine.groebner import IdealBasis, buchberger, colon_annihilator, minimal_generators, normal_form
from diffalg.engine.homology import biduality_is_iso, ext_module, syzygy_module
from diffalg.engine.kaehler import omega_presentation
from diffalg.engine.linalg import columns_to_rows, nullspace, rank
from diffalg.engine.modules import GradedFree, GradedMap, PresentedModule, cyclic_module, free_module
from diffalg.engine.rings import QuotientRing
from diffalg.errors import DepthInconclusiveError, DiffalgError, NotArtinianError

logger = structlog.get_logger()

MAX_ENUMERATED_CANDIDATES = 256


@dataclass(frozen=True)
class Socle:
    generators: tuple[PolyElement, ...]

    @property
    def dimension(self) -> int:
        return len(self.generators)


def socle(ring: QuotientRing) -> Socle:
    """k-basis of (0 :_R m), degree by degree."""
    if not ring.is_artinian:
        raise NotArtinianError(f"{ring!r} is not artinian")
    K = ring.domain
    found = []
    for d in range(ring.top_degree + 1):
        basis = ring.basis(d)
        if not basis:
            continue
        columns = []
        for u in basis:
            column = []
            for x, w in zip(ring.ambient.gens, ring.weights):
                column.extend(ring.coords(ring.nf(x * ring.monomial(u)), d + w))
            columns.append(column)
        rows = [[col[r] for col in columns] for r in range(len(columns[0]))]
        for vector in nullspace(rows, len(basis), K):
            found.append(ring.from_coords(vector, d))
    return Socle(tuple(found))


def is_gorenstein_artinian(ring: QuotientRing) -> bool:
    return socle(ring).dimension == 1


def embedding_dimension(ring: QuotientRing) -> int:
    return len(minimal_generators(IdealBasis.of(ring.ambient, list(ring.ambient.gens)), ring.gb))


def fact41_check(ring: QuotientRing) -> bool:
    """Whether embdim R = dim R + 1."""
    return embedding_dimension(ring) == ring.krull_dimension + 1


# Depth


@dataclass(frozen=True)
class DepthResult:
    value: int
    witness: str
    certified: bool


def _module_socle_element(module: PresentedModule, bound: int | None) -> tuple[int, list] | None:
    """A nonzero homogeneous element killed by every variable, searched in the window."""
    ring = module.ring
    K = ring.domain
    window = module.window(bound)
    free = module.free
    top_weight = max(ring.weights)
    for d in window.degrees():
        if d + top_weight > window.hi and not window.exact:
            break
        span = module.relation_span(d)
        complement = span.complement()
        if not complement:
            continue
        rows: list[list] = []
        for x, w in zip(ring.ambient.gens, ring.weights):
            target = module.relation_span(d + w)
            images = [
                target.quotient_coordinates(free.coords(free.multiply(free.basis_element(d, c), x), d + w))
                for c in complement
            ]
            if images and images[0]:
                rows.extend([[img[r] for img in images] for r in range(len(images[0]))])
        kernel = nullspace(rows, len(complement), K)
        if kernel:
            vector = [K.zero] * free.dim(d)
            for c, value in zip(complement, kernel[0]):
                vector[c] = value
            return d, vector
    return None


def _is_nonzerodivisor(module: PresentedModule, f: PolyElement, bound: int | None) -> bool:
    ring = module.ring
    K = ring.domain
    e = ring.degree(f)
    window = module.window(bound)
    free = module.free
    for d in window.degrees():
        if d + e > window.hi:
            break
        span = module.relation_span(d)
        complement = span.complement()
        if not complement:
            continue
        target = module.relation_span(d + e)
        images = [
            target.quotient_coordinates(free.coords(free.multiply(free.basis_element(d, c), f), d + e))
            for c in complement
        ]
        width = len(images[0])
        if rank(columns_to_rows(images, width, K), len(complement), K) < len(complement):
            return False
    return True


def _candidates(ring: QuotientRing, degree: int):
    K = ring.domain
    basis = ring.basis(degree)
    if not basis:
        return
    seen = set()

    def emit(poly):
        key = tuple(sorted(poly.items()))
        if poly and key not in seen:
            seen.add(key)
            return poly
        return None

    for x, w in zip(ring.ambient.gens, ring.weights):
        if w == degree:
            p = emit(ring.nf(x))
            if p is not None:
                yield p
    p = emit(ring.nf(sum((ring.monomial(u) for u in basis), ring.zero)))
    if p is not None:
        yield p
    if ring.characteristic and ring.characteristic ** len(basis) <= MAX_ENUMERATED_CANDIDATES:
        values = [K(c) for c in range(ring.characteristic)]
    else:
        values = [K(0), K(1), K(-1), K(2)]
    if len(values) ** len(basis) > MAX_ENUMERATED_CANDIDATES:
        values = values[:3]
    if len(values) ** len(basis) > MAX_ENUMERATED_CANDIDATES:
        return
    for coefficients in product(values, repeat=len(basis)):
        poly = ring.ambient.from_dict({u: c for u, c in zip(basis, coefficients) if c})
        p = emit(poly)
        if p is not None:
            yield p


def find_nonzerodivisor(module: PresentedModule, bound: int | None = None) -> PolyElement | None:
    ring = module.ring
    for degree in range(1, 2 * max(ring.weights) + 1):
        for f in _candidates(ring, degree):
            if _is_nonzerodivisor(module, f, bound):
                return f
    return None


def _quotient_by_element(module: PresentedModule, f: PolyElement) -> PresentedModule:
    """M/fM = coker([P | f*Id])."""
    ring = module.ring
    e = ring.degree(f)
    free = module.free
    columns = list(module.relations.columns) + [free.multiply(free.unit(j), f) for j in range(free.rank)]
    degrees = list(module.relations.source.degrees) + [a + e for a in free.degrees]
    relations = GradedMap(GradedFree(ring, tuple(degrees)), free, tuple(columns))
    return PresentedModule(free, relations, f"{module.name}/({format_polynomial(f)})")


def depth_graded(
    target: QuotientRing | PresentedModule, bound: int | None = None, cap: int | None = None
) -> DepthResult:
    """Depth of R or of a graded module, by socle torsion and homogeneous nonzerodivisors.

    The search never goes past ``cap``, which defaults to dim R.
    """
    if isinstance(target, QuotientRing):
        ring, module, is_ring = target, free_module(target), True
    else:
        ring, module, is_ring = target.ring, target, False
    if module.total_dimension(bound) == 0:
        raise DiffalgError("the zero module has no finite depth")
    cap = ring.krull_dimension if cap is None else cap
    if ring.is_artinian:
        return DepthResult(0, "artinian", True)
    torsion = _module_socle_element(module, bound)
    if torsion is not None:
        d, vector = torsion
        element = module.free.element(vector, d)
        text = format_polynomial(element[0]) if module.ngens == 1 else str([format_polynomial(e) for e in element])
        return DepthResult(0, f"{text} is killed by m", True)
    if cap == 0:
        return DepthResult(0, "dimension 0", False)
    if is_ring and ring.is_domain:
        f = ring.nf(ring.ambient.gens[0]) or ring.nf(ring.ambient.gens[-1])
    else:
        f = find_nonzerodivisor(module, bound)
    if not f:
        raise DepthInconclusiveError(ring.window_span(bound), "no homogeneous nonzerodivisor found")
    witness = f"{format_polynomial(f)} is a nonzerodivisor"
    if cap == 1:
        return DepthResult(1, witness, is_ring and ring.is_domain)
    rest = depth_graded(_quotient_by_element(module, f), bound, cap - 1)
    return DepthResult(1 + rest.value, f"{witness}; {rest.witness}", False)


# Regular sequences and complete intersections


def is_regular_sequence(sequence: Sequence[PolyElement], ring: QuotientRing) -> bool:
    """Each element is a nonzerodivisor modulo the previous ones, and the quotient is nonzero."""
    current = list(ring.gb.elements)
    for f in sequence:
        gb = buchberger(current, ring.ambient) if current else ring.gb
        if gb.is_unit or not normal_form(f, gb):
            return False
        if colon_annihilator(gb, f).generators:
            return False
        current = current + [f]
    return not buchberger(current, ring.ambient).is_unit if current else True


@dataclass(frozen=True)
class CIVerdict:
    ci: bool
    reason: str


def is_complete_intersection_ideal(
    generators: Sequence[PolyElement], ring: QuotientRing, bound: int | None = None
) -> CIVerdict:
    gens = minimal_generators(IdealBasis.of(ring.ambient, list(generators)), ring.gb)
    if not gens:
        return CIVerdict(True, "B = 0")
    depth = depth_graded(ring, bound).value
    if depth == 0:
        return CIVerdict(False, "depth 0, B ≠ 0")
    if len(gens) > depth:
        return CIVerdict(False, f"μ(B)={len(gens)} > depth={depth}")
    for ordering in permutations(gens):
        if is_regular_sequence(ordering, ring):
            return CIVerdict(True, f"generated by the regular sequence {', '.join(map(format_polynomial, ordering))}")
    return CIVerdict(False, "no ordering of the minimal generators is a regular sequence")


@dataclass(frozen=True)
class PresentationClass:
    kind: str
    mu: int
    height: int

    @property
    def almost_ci(self) -> bool:
        return self.mu <= self.height + 1

    @property
    def purely_almost_ci(self) -> bool:
        return self.mu == self.height + 1


def ci_presentation_check(ring: QuotientRing) -> PresentationClass:
    mu = len(minimal_generators(ring.ideal))
    height = ring.ngens - ring.krull_dimension
    if mu == height:
        kind = "complete_intersection"
    elif mu == height + 1:
        kind = "almost_ci"
    else:
        kind = "neither"
    return PresentationClass(kind, mu, height)


# Totally reflexive modules and G-dimension


@dataclass(frozen=True)
class TotallyReflexiveCertificate:
    """PASS(N) is a bounded claim: biduality plus vanishing Ext up to index N."""

    passed: bool
    bound: int
    failure: str | None = None
    failed_index: int | None = None
    ext: tuple[int, ...] = ()
    dual_ext: tuple[int, ...] = ()

    @property
    def verdict(self) -> str:
        return f"PASS({self.bound})" if self.passed else f"FAIL({self.failure})"


def totally_reflexive_check(module: PresentedModule, n: int, bound: int | None = None) -> TotallyReflexiveCertificate:
    if n < 1:
        raise DiffalgError("the Ext bound must be at least 1")
    biduality = biduality_is_iso(module, bound)
    if not biduality.iso:
        return TotallyReflexiveCertificate(False, n, "biduality", 0)
    ext = []
    resolution = MinimalResolution(module, bound)
    for i in range(1, n + 1):
        dim = ext_module(module, i, bound, resolution, with_module=False).dimension
        ext.append(dim)
        if dim:
            return TotallyReflexiveCertificate(False, n, f"Ext^{i}(M,R) ≠ 0", i, tuple(ext))
    dual = biduality.dual.module
    dual_ext = []
    resolution = MinimalResolution(dual, bound)
    for i in range(1, n + 1):
        dim = ext_module(dual, i, bound, resolution, with_module=False).dimension
        dual_ext.append(dim)
        if dim:
            return TotallyReflexiveCertificate(False, n, f"Ext^{i}(M*,R) ≠ 0", i, tuple(ext), tuple(dual_ext))
    logger.info("totally_reflexive", module=module.name, bound=n)
    return TotallyReflexiveCertificate(True, n, None, None, tuple(ext), tuple(dual_ext))


@dataclass(frozen=True)
class GdimEvidence:
    kind: str
    bound: int
    d: int | None = None
    index: int | None = None
    route: str = "direct"
    notes: tuple[str, ...] = field(default=(), compare=False)

    def describe(self) -> str:
        if self.kind == "zero":
            return f"zero({self.bound})"
        if self.kind == "at_most":
            return f"at_most({self.d},{self.bound})"
        return f"obstructed({self.index})"


def gdim_evidence(
    module: PresentedModule,
    n: int,
    bound: int | None = None,
    method: str = "direct",
    ideal: Sequence[PolyElement] | None = None,
) -> GdimEvidence:
    """Bounded evidence about the G-dimension of M; never claims it is infinite.

    ``method="ses"`` treats M as the ideal B given by ``ideal`` and reads it
    as the first syzygy of R/B.
    """
    ring = module.ring
    depth = depth_graded(ring, bound).value
    if method == "ses":
        if ideal is None:
            raise DiffalgError("the ses route needs the generators of the ideal")
        quotient = cyclic_module(ring, ideal, name="R/B")
        certificate = totally_reflexive_check(syzygy_module(quotient, 1, bound), n, bound)
        if certificate.passed:
            return GdimEvidence("zero", n, 0, route="ses", notes=("B = Syz1(R/B) is totally reflexive",))
        return GdimEvidence("obstructed", n, index=certificate.failed_index, route="ses")
    if method != "direct":
        raise DiffalgError(f"unknown route {method}")

    last = None
    for d in range(0, depth + 1):
        candidate = module if d == 0 else syzygy_module(module, d, bound)
        last = totally_reflexive_check(candidate, n, bound)
        if last.passed:
            return GdimEvidence("zero", n, 0) if d == 0 else GdimEvidence("at_most", n, d)
    resolution = MinimalResolution(module, bound)
    for i in range(depth + 1, n + 1):
        if ext_module(module, i, bound, resolution, with_module=False).dimension:
            return GdimEvidence("obstructed", n, index=i)
    return GdimEvidence("obstructed", n, index=last.failed_index if last else 0)


# Whole-ring summaries


@dataclass(frozen=True)
class RingVerdict:
    length: int | None
    dimension: int
    depth: int
    embdim: int
    socle: tuple[PolyElement, ...] | None
    gorenstein: bool | None
    presentation: PresentationClass
    regular: bool
    provenance: dict[str, str]

    @property
    def complete_intersection(self) -> bool:
        return self.presentation.kind == "complete_intersection"

    @property
    def socle_dimension(self) -> int | None:
        return len(self.socle) if self.socle is not None else None


def classify_ring(ring: QuotientRing, bound: int | None = None) -> RingVerdict:
    presentation = ci_presentation_check(ring)
    embdim = embedding_dimension(ring)
    dimension = ring.krull_dimension
    depth = depth_graded(ring, bound)
    provenance = {
        "presentation": f"μ(I)={presentation.mu}, height={presentation.height}",
        "depth": depth.witness,
        "regular": f"embdim {embdim} vs dim {dimension}",
    }
    if ring.is_artinian:
        soc = socle(ring)
        gorenstein = soc.dimension == 1
        provenance["gorenstein"] = f"socle dimension {soc.dimension}"
        length = ring.length
        generators = soc.generators
    else:
        generators, length = None, None
        if presentation.kind == "complete_intersection":
            gorenstein = True
            provenance["gorenstein"] = "complete intersection presentation"
        else:
            gorenstein = None
            provenance["gorenstein"] = "undecided"
    return RingVerdict(
        length, dimension, depth.value, embdim, generators, gorenstein, presentation, embdim == dimension, provenance
    )


def rigidity_check(ring: QuotientRing, upto: int = 4, bound: int | None = None) -> list[int]:
    """dim_k Ext^i(Omega, R) for 1 <= i <= upto."""
    omega = omega_presentation(ring)
    resolution = MinimalResolution(omega, bound)
    return [ext_module(omega, i, bound, resolution, with_module=False).dimension for i in range(1, upto + 1)]
