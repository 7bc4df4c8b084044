"""Parsed scenario files."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from sympy.polys.rings import PolyElement, PolyRing

from diffalg.engine.core import CoefficientField
from diffalg.engine.rings import QuotientRing


@dataclass(frozen=True)
class TaskSpec:
    """One ``[task N]`` section: its kind, parameters and ``expect_*`` values."""

    index: int
    kind: str
    params: dict[str, str]
    expectations: dict[str, str]
    line: int = 0

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.params.get(key, default)


@dataclass
class Scenario:
    name: str
    field: CoefficientField
    ambient: PolyRing
    relations: tuple[PolyElement, ...]
    is_domain: bool = False
    derivations: dict[str, dict[str, PolyElement]] = field(default_factory=dict)
    tasks: list[TaskSpec] = field(default_factory=list)
    description: str = ""
    ring_name: str = "R"

    @cached_property
    def ring(self) -> QuotientRing:
        return QuotientRing(self.ambient, self.relations, self.is_domain, self.ring_name)
