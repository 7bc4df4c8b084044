"""Base change along the iterated Frobenius, on matrices, presentations and complexes."""

from __future__ import annotations

from dataclasses import dataclass

import structlog
from opentelemetry import trace
from sympy.polys.rings import PolyElement

from diffalg.engine.complexes import FreeComplex, PresentedComplex, homology_of_complex
from diffalg.engine.modules import GradedFree, GradedMap, PresentedModule
from diffalg.engine.rings import QuotientRing
from diffalg.errors import CharacteristicZeroError, ComplexError, IndexRangeError

logger = structlog.get_logger()
tracer = trace.get_tracer(__name__)


def frobenius_power(ring: QuotientRing, f: PolyElement, n: int) -> PolyElement:
    """f^(p^n) in R, one p-th power at a time."""
    p = ring.characteristic
    if p == 0:
        raise CharacteristicZeroError("the Frobenius functor needs a prime characteristic")
    for _ in range(n):
        f = ring.nf(f**p) if f else f
    return f


@dataclass(frozen=True)
class FrobeniusTwist:
    n: int
    p: int
    source: GradedMap
    twisted: GradedMap

    @property
    def q(self) -> int:
        return self.p**self.n


def _scaled(free: GradedFree, q: int) -> GradedFree:
    return GradedFree(free.ring, tuple(q * a for a in free.degrees))


def frobenius_twist_matrix(A: GradedMap, n: int) -> FrobeniusTwist:
    """Entrywise p^n-th powers; generator degrees are multiplied by p^n."""
    ring = A.ring
    p = ring.characteristic
    if p == 0:
        raise CharacteristicZeroError("the Frobenius functor needs a prime characteristic")
    if n < 0:
        raise IndexRangeError(f"the Frobenius exponent must be nonnegative, got {n}")
    q = p**n
    columns = tuple(tuple(frobenius_power(ring, e, n) for e in column) for column in A.columns)
    twisted = GradedMap(_scaled(A.source, q), _scaled(A.target, q), columns)
    return FrobeniusTwist(n, p, A, twisted)


def frobenius_twist_module(module: PresentedModule, n: int) -> PresentedModule:
    """coker(P) goes to coker(P^[q]) for the presentation P the module was given with."""
    twist = frobenius_twist_matrix(module.relations, n).twisted
    return PresentedModule(twist.target, twist, f"F^{n}({module.name})")


def frobenius_complex(complex_: FreeComplex | PresentedComplex, n: int) -> FreeComplex | PresentedComplex:
    with tracer.start_as_current_span("frobenius_complex") as span:
        span.set_attribute("frobenius.n", n)
        try:
            if isinstance(complex_, FreeComplex):
                maps = {i: frobenius_twist_matrix(A, n).twisted for i, A in complex_.maps.items()}
                terms = {i: _scaled(F, complex_.ring.characteristic**n) for i, F in complex_.terms.items()}
                return FreeComplex(complex_.ring, terms, maps)
            terms = {i: frobenius_twist_module(M, n) for i, M in complex_.terms.items()}
            maps = {i: frobenius_twist_matrix(A, n).twisted for i, A in complex_.maps.items()}
            return PresentedComplex(complex_.ring, terms, maps)
        except ComplexError:
            logger.error("frobenius_twist_broke_complex", n=n)
            raise


@dataclass(frozen=True)
class AcyclicityReport:
    """dim_k H_i of the n-th twist for every n checked and every position above the bottom."""

    homology: dict[int, dict[int, int]]
    exact: bool

    @property
    def acyclic(self) -> bool:
        return all(dim == 0 for dims in self.homology.values() for dim in dims.values())

    def first_failure(self) -> tuple[int, int] | None:
        for n in sorted(self.homology):
            for i in sorted(self.homology[n]):
                if self.homology[n][i]:
                    return n, i
        return None


def acyclicity_report(
    complex_: FreeComplex | PresentedComplex, n_max: int, bound: int | None = None, start: int = 1
) -> AcyclicityReport:
    positions = sorted(complex_.terms)
    above = [i for i in positions if i > positions[0]]
    homology: dict[int, dict[int, int]] = {}
    exact = True
    for n in range(start, n_max + 1):
        twisted = frobenius_complex(complex_, n)
        dims = {}
        for i in above:
            result = homology_of_complex(twisted, i, bound)
            dims[i] = result.dimension
            exact = exact and result.exact
        homology[n] = dims
        logger.info("frobenius_twist", n=n, homology=dims)
    return AcyclicityReport(homology, exact)
