"""Exact coefficient fields, monomial orders and sparse polynomials.

Polynomials are sympy ``PolyElement`` values of a ``PolyRing`` whose order is a
:class:`MonomialOrder`. The weights of the grading travel with the order, so a
``PolyRing`` is all the ambient information a polynomial needs. Every function
here returns a new element; inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from sympy import GF, QQ, isprime
from sympy.polys.orderings import MonomialOrder as _MonomialOrderBase
from sympy.polys.rings import PolyElement, PolyRing

from diffalg.errors import (
    AmbientMismatchError,
    DiffalgError,
    FieldError,
    InhomogeneousError,
    UnknownVariableError,
    ZeroPolynomialError,
)

Polynomial = PolyElement
Monomial = tuple[int, ...]

MAX_CHARACTERISTIC = 2**16


@dataclass(frozen=True)
class CoefficientField:
    """F_p for a small prime p, or the rationals when ``characteristic`` is 0."""

    characteristic: int

    def __post_init__(self) -> None:
        p = self.characteristic
        if p != 0 and (p > MAX_CHARACTERISTIC or not isprime(p)):
            raise FieldError(f"characteristic must be 0 or a prime below {MAX_CHARACTERISTIC}, got {p}")

    @classmethod
    def parse(cls, text: str) -> "CoefficientField":
        """Accept ``Q``, ``QQ``, ``0``, ``F2``, ``F_2``, ``GF(2)`` or a bare prime."""
        token = text.strip().upper().replace("_", "")
        if token in {"Q", "QQ", "0"}:
            return cls(0)
        for prefix in ("GF(", "GF", "F"):
            if token.startswith(prefix):
                token = token[len(prefix):].rstrip(")")
                break
        if not token.isdigit():
            raise FieldError(f"cannot read a coefficient field from {text!r}")
        return cls(int(token))

    @property
    def domain(self):
        return _domain(self.characteristic)

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0

    def __str__(self) -> str:
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"


@lru_cache(maxsize=None)
def _domain(characteristic: int):
    return QQ if characteristic == 0 else GF(characteristic)


class MonomialOrder(_MonomialOrderBase):
    """Weighted graded reverse lexicographic order, or lex, on exponent tuples.

    ``precedence`` lists variable indices from most to least significant.
    Weights only affect grevlex; lex is used for elimination and ignores them.
    """

    is_global = True
    is_default = False

    def __init__(
        self,
        kind: str = "grevlex",
        weights: Sequence[int] | None = None,
        precedence: Sequence[int] | None = None,
    ):
        if kind not in {"grevlex", "lex"}:
            raise DiffalgError(f"unknown monomial order {kind}")
        if weights is not None and any(w <= 0 for w in weights):
            raise DiffalgError("weights must be positive integers")
        self.kind = kind
        self.alias = kind
        self.weights = tuple(weights) if weights is not None else None
        self.precedence = tuple(precedence) if precedence is not None else None

    def _permuted(self, monomial: Monomial) -> Monomial:
        if self.precedence is None:
            return monomial
        return tuple(monomial[i] for i in self.precedence)

    def __call__(self, monomial: Monomial):
        exponents = self._permuted(monomial)
        if self.kind == "lex":
            return exponents
        return (weighted_degree(monomial, self.weights), tuple(reversed([-e for e in exponents])))

    def __repr__(self) -> str:
        return f"MonomialOrder({self.kind!r}, weights={self.weights}, precedence={self.precedence})"

    def __str__(self) -> str:
        return self.kind

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.weights == other.weights
            and self.precedence == other.precedence
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.kind, self.weights, self.precedence))


def polynomial_ring(
    names: str | Sequence[str],
    field: CoefficientField,
    weights: Sequence[int] | None = None,
    kind: str = "grevlex",
) -> PolyRing:
    """Build the ambient ring S = k[X1..Xn] with the declared grading."""
    if isinstance(names, str):
        names = [name.strip() for name in names.split(",") if name.strip()]
    names = list(names)
    if len(set(names)) != len(names):
        raise DiffalgError(f"duplicate variable names in {names}")
    if weights is not None and len(weights) != len(names):
        raise DiffalgError(f"expected {len(names)} weights, got {len(weights)}")
    order = MonomialOrder(kind, tuple(weights) if weights is not None else (1,) * len(names))
    return PolyRing(names, field.domain, order)


def weights_of(ring: PolyRing) -> tuple[int, ...]:
    weights = getattr(ring.order, "weights", None)
    return weights if weights is not None else (1,) * ring.ngens


def field_of(ring: PolyRing) -> CoefficientField:
    return CoefficientField(int(ring.domain.characteristic()))


def variable_names(ring: PolyRing) -> tuple[str, ...]:
    return tuple(str(s) for s in ring.symbols)


def weighted_degree(monomial: Monomial, weights: Sequence[int] | None = None) -> int:
    if weights is None:
        return sum(monomial)
    return sum(w * e for w, e in zip(weights, monomial))


@lru_cache(maxsize=4096)
def monomials_of_degree(weights: tuple[int, ...], degree: int) -> tuple[Monomial, ...]:
    """All exponent tuples of the given weighted degree, in lex order."""
    if degree < 0:
        return ()
    if not weights:
        return ((),) if degree == 0 else ()
    first, rest = weights[0], weights[1:]
    found = []
    for e in range(degree // first, -1, -1):
        for tail in monomials_of_degree(rest, degree - e * first):
            found.append((e,) + tail)
    return tuple(found)


def _check_same_ring(*polys: PolyElement) -> PolyRing:
    ring = polys[0].ring
    for p in polys[1:]:
        if p.ring != ring:
            raise AmbientMismatchError(f"polynomials live in different rings: {ring} and {p.ring}")
    return ring


def poly_arith(a: PolyElement, b: PolyElement | int, op: str) -> PolyElement:
    """Exact ``add``, ``sub``, ``mul`` or ``pow`` (with an integer ``b``)."""
    if op == "pow":
        if not isinstance(b, int) or b < 0:
            raise DiffalgError(f"exponent must be a nonnegative integer, got {b}")
        return a**b
    _check_same_ring(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise DiffalgError(f"unknown polynomial operation {op}")


def variable_index(ring: PolyRing, var: int | str | PolyElement) -> int:
    """Resolve a variable given by index, name or generator."""
    if isinstance(var, int):
        if 0 <= var < ring.ngens:
            return var
        raise UnknownVariableError(str(var))
    if isinstance(var, PolyElement):
        if var.ring == ring and var in ring.gens:
            return ring.gens.index(var)
        raise UnknownVariableError(str(var))
    names = variable_names(ring)
    if var in names:
        return names.index(var)
    raise UnknownVariableError(var)


def partial_derivative(f: PolyElement, var: int | str | PolyElement) -> PolyElement:
    """Formal derivative; coefficients are multiplied in the field, so p*c vanishes in char p."""
    ring = f.ring
    i = variable_index(ring, var)
    K = ring.domain
    terms = {}
    for monomial, coeff in f.items():
        e = monomial[i]
        if e == 0:
            continue
        c = coeff * K(e)
        if c:
            terms[monomial[:i] + (e - 1,) + monomial[i + 1:]] = c
    return ring.from_dict(terms) if terms else ring.zero


def leading_term(f: PolyElement, order: Callable | None = None) -> tuple[Monomial, object]:
    if not f:
        raise ZeroPolynomialError("the zero polynomial has no leading term")
    key = order or f.ring.order
    monomial = max(f.keys(), key=key)
    return monomial, f[monomial]


def is_homogeneous(f: PolyElement, weights: Sequence[int] | None = None) -> bool:
    weights = weights or weights_of(f.ring)
    return len({weighted_degree(m, weights) for m in f.keys()}) <= 1


def degree_of(f: PolyElement, weights: Sequence[int] | None = None) -> int:
    """Weighted degree of a nonzero homogeneous polynomial."""
    if not f:
        raise ZeroPolynomialError("the zero polynomial has no degree")
    weights = weights or weights_of(f.ring)
    degrees = {weighted_degree(m, weights) for m in f.keys()}
    if len(degrees) != 1:
        raise InhomogeneousError(f"{format_polynomial(f)} is not homogeneous for weights {tuple(weights)}")
    return degrees.pop()


def homogeneous_components(f: PolyElement) -> dict[int, PolyElement]:
    ring = f.ring
    weights = weights_of(ring)
    parts: dict[int, dict] = {}
    for monomial, coeff in f.items():
        parts.setdefault(weighted_degree(monomial, weights), {})[monomial] = coeff
    return {d: ring.from_dict(terms) for d, terms in sorted(parts.items())}


def monomial_element(ring: PolyRing, monomial: Monomial) -> PolyElement:
    return ring.from_dict({monomial: ring.domain.one})


def constant_term(f: PolyElement):
    zero = (0,) * f.ring.ngens
    return f.get(zero, f.ring.domain.zero)


def format_coefficient(ring: PolyRing, coeff) -> str:
    return str(ring.domain.to_sympy(coeff))


def format_monomial(names: Sequence[str], monomial: Monomial) -> str:
    factors = []
    for name, e in zip(names, monomial):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors)


def format_polynomial(f: PolyElement) -> str:
    """Canonical text, terms decreasing in the ring order: ``X^2*Y - 3*Y + 1``."""
    if not f:
        return "0"
    ring = f.ring
    names = variable_names(ring)
    pieces = []
    for monomial, coeff in sorted(f.items(), key=lambda t: ring.order(t[0]), reverse=True):
        text = format_coefficient(ring, coeff)
        negative = text.startswith("-")
        if negative:
            text = text[1:]
        mono = format_monomial(names, monomial)
        if mono and text == "1":
            term = mono
        elif mono:
            term = f"{text}*{mono}"
        else:
            term = text
        if not pieces:
            pieces.append(f"-{term}" if negative else term)
        else:
            pieces.append(f"- {term}" if negative else f"+ {term}")
    return " ".join(pieces)


def format_polynomials(polys: Iterable[PolyElement]) -> str:
    return ", ".join(format_polynomial(p) for p in polys)
