"""Graded quotient rings R = S/I with cached staircase data."""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

from sympy.polys.rings import PolyElement, PolyRing

from diffalg.config import get_settings
from diffalg.engine.core import (
    CoefficientField,
    Monomial,
    degree_of,
    field_of,
    format_polynomial,
    is_homogeneous,
    variable_names,
    weights_of,
)
from diffalg.engine.groebner import (
    GroebnerBasis,
    IdealBasis,
    Staircase,
    buchberger,
    is_zero_dimensional,
    krull_dimension,
    normal_form,
    standard_monomials,
    staircase_basis,
    top_degree,
)
from diffalg.errors import InhomogeneousError, NotArtinianError, UnitIdealError


class QuotientRing:
    """S/I for a homogeneous ideal I of a weighted polynomial ring S.

    Elements are represented by normal forms in S. ``is_domain`` is an
    assertion made by the caller and is never verified.
    """

    def __init__(
        self,
        ambient: PolyRing,
        relations: Sequence[PolyElement] = (),
        is_domain: bool = False,
        name: str = "R",
    ):
        self.ambient = ambient
        self.ideal = IdealBasis.of(ambient, relations)
        self.is_domain = is_domain
        self.name = name
        self.weights = weights_of(ambient)
        for f in self.ideal.generators:
            if not is_homogeneous(f, self.weights):
                raise InhomogeneousError(f"relation {format_polynomial(f)} is not homogeneous for weights {self.weights}")
        self.gb: GroebnerBasis = buchberger(self.ideal)
        if self.gb.is_unit:
            raise UnitIdealError("the defining ideal is the unit ideal")
        self._bases: dict[int, tuple[Monomial, ...]] = {}
        self._indexes: dict[int, dict[Monomial, int]] = {}

    def __repr__(self) -> str:
        rels = ", ".join(format_polynomial(f) for f in self.ideal.generators)
        return f"{self.field}[{','.join(self.names)}]/({rels})"

    @property
    def field(self) -> CoefficientField:
        return field_of(self.ambient)

    @property
    def domain(self):
        return self.ambient.domain

    @property
    def characteristic(self) -> int:
        return self.field.characteristic

    @property
    def names(self) -> tuple[str, ...]:
        return variable_names(self.ambient)

    @property
    def ngens(self) -> int:
        return self.ambient.ngens

    @property
    def relations(self) -> tuple[PolyElement, ...]:
        return self.ideal.generators

    @property
    def variables(self) -> tuple[PolyElement, ...]:
        return tuple(self.nf(x) for x in self.ambient.gens)

    @property
    def one(self) -> PolyElement:
        return self.ambient.one

    @property
    def zero(self) -> PolyElement:
        return self.ambient.zero

    @cached_property
    def is_artinian(self) -> bool:
        return is_zero_dimensional(self.gb)

    @cached_property
    def top_degree(self) -> int | None:
        """Largest degree with R_d nonzero, for artinian rings."""
        return top_degree(self.gb)

    @cached_property
    def krull_dimension(self) -> int:
        return krull_dimension(self.gb)

    @cached_property
    def margin(self) -> int:
        """Distance from the window top inside which a new generator is not trusted."""
        return self.gb.max_degree() + max(self.weights)

    def window_span(self, bound: int | None = None) -> int:
        bound = bound if bound is not None else get_settings().degree_bound
        return bound * max(self.weights)

    def staircase(self, degree_bound: int | None = None) -> Staircase:
        return staircase_basis(self.gb, degree_bound)

    @property
    def length(self) -> int:
        if not self.is_artinian:
            raise NotArtinianError(f"{self!r} has infinite length")
        return self.staircase().length

    def basis(self, degree: int) -> tuple[Monomial, ...]:
        """Standard monomials spanning R_degree."""
        if degree < 0:
            return ()
        if self.is_artinian and degree > self.top_degree:
            return ()
        if degree not in self._bases:
            self._bases[degree] = standard_monomials(self.gb, degree)
            self._indexes[degree] = {m: i for i, m in enumerate(self._bases[degree])}
        return self._bases[degree]

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def nf(self, f: PolyElement) -> PolyElement:
        return normal_form(f, self.gb)

    def is_zero(self, f: PolyElement) -> bool:
        return not self.nf(f)

    def degree(self, f: PolyElement) -> int:
        return degree_of(f, self.weights)

    def is_homogeneous(self, f: PolyElement) -> bool:
        return is_homogeneous(f, self.weights)

    def monomial(self, m: Monomial) -> PolyElement:
        return self.ambient.from_dict({m: self.domain.one})

    def coords(self, f: PolyElement, degree: int) -> list:
        """Coordinates of a normal form of the given degree in the monomial basis of R_degree."""
        basis = self.basis(degree)
        K = self.domain
        out = [K.zero] * len(basis)
        if not f:
            return out
        index = self._indexes[degree]
        for m, c in f.items():
            out[index[m]] = c
        return out

    def from_coords(self, vector: Sequence, degree: int) -> PolyElement:
        basis = self.basis(degree)
        return self.ambient.from_dict({m: c for m, c in zip(basis, vector) if c})

    def full_basis(self) -> tuple[Monomial, ...]:
        """All standard monomials, by increasing degree; artinian rings only."""
        if not self.is_artinian:
            raise NotArtinianError(f"{self!r} is not artinian")
        return tuple(m for d in range(self.top_degree + 1) for m in self.basis(d))

    def quotient(self, extra: Sequence[PolyElement], name: str | None = None) -> "QuotientRing":
        """R/J as a new quotient ring of the same ambient ring."""
        return QuotientRing(self.ambient, self.relations + tuple(extra), False, name or f"{self.name}/J")

    def with_ambient_element(self, f: PolyElement) -> PolyElement:
        if f.ring != self.ambient:
            return self.ambient.from_dict(dict(f.items()))
        return f
