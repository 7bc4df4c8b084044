"""Task kinds of the scenario language and the engine calls behind them.

Every handler takes the run context and its task section and returns an
ordered mapping of fact names to values; the runner compares those facts
with the task's ``expect_*`` keys.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

import structlog
from sympy.polys.rings import PolyElement

from diffalg.config import get_settings
from diffalg.engine.classify import (
    ci_presentation_check,
    classify_ring,
    depth_graded,
    embedding_dimension,
    fact41_check,
    gdim_evidence,
    is_complete_intersection_ideal,
    is_gorenstein_artinian,
    is_regular_sequence,
    rigidity_check,
    socle,
    totally_reflexive_check,
)
from diffalg.engine.complexes import MinimalResolution, homology_of_complex, identity_complex, koszul_complex
from diffalg.engine.core import format_polynomial
from diffalg.engine.derivations import (
    Derivation,
    apply_derivation,
    check_well_defined,
    differential_witness,
    derivation_space,
    maximally_differential_ideal,
)
from diffalg.engine.frobenius import acyclicity_report
from diffalg.engine.groebner import IdealBasis, colon_annihilator, minimal_generators, quotient_length
from diffalg.engine.homology import biduality_is_iso, ext_module, hom_dual, tor_module
from diffalg.engine.kaehler import (
    der_cokernel,
    der_module,
    is_free,
    jacobian_matrix,
    minimal_number_of_generators,
    module_rank,
    omega_presentation,
)
from diffalg.engine.modules import (
    PresentedModule,
    cyclic_module,
    free_module,
    ideal_module,
    maximal_ideal,
    residue_field,
)
from diffalg.engine.rings import QuotientRing
from diffalg.errors import ScenarioError, UnverifiedDerivationError
from diffalg.scenario.expressions import parse_polynomials, split_list
from diffalg.scenario.models import Scenario, TaskSpec

logger = structlog.get_logger()

_CALL = re.compile(r"^(?P<head>\w+)\((?P<body>.*)\)$", re.DOTALL)
_POWER = re.compile(r"^R\^(?P<rank>\d+)$")


@dataclass(frozen=True)
class IdealFact:
    """Generators of an ideal of R; expectations compare the ideals, not the lists."""

    generators: tuple[PolyElement, ...]


@dataclass(frozen=True)
class ElementFact:
    """An element of R; expectations compare normal forms."""

    value: PolyElement


Facts = dict[str, Any]


@dataclass
class TaskContext:
    """State shared by the tasks of one scenario run."""

    scenario: Scenario
    bound: int | None = None
    ext_bound: int | None = None
    frobenius_max: int | None = None
    saved: dict[str, tuple[PolyElement, ...]] = field(default_factory=dict)
    cache: dict[str, Any] = field(default_factory=dict)

    @property
    def ring(self) -> QuotientRing:
        return self.scenario.ring

    def degree_bound(self, task: TaskSpec) -> int | None:
        return _int(task.get("bound"), "bound") if task.get("bound") else self.bound

    def ext_n(self, task: TaskSpec) -> int:
        if task.get("n"):
            return _int(task.get("n"), "n")
        if self.ext_bound is not None:
            return self.ext_bound
        settings = get_settings()
        return settings.ext_bound_artinian if self.ring.is_artinian else settings.ext_bound_graded

    def n_max(self, task: TaskSpec) -> int:
        if task.get("n_max"):
            return _int(task.get("n_max"), "n_max")
        return self.frobenius_max if self.frobenius_max is not None else get_settings().frobenius_max

    def polys(self, text: str | None) -> list[PolyElement]:
        return [self.ring.nf(f) for f in parse_polynomials(text or "", self.ring.ambient)]

    def ideal(self, text: str | None) -> tuple[PolyElement, ...]:
        """A saved ideal, ``m``, ``0``, or a list of expressions."""
        if text is None:
            raise ScenarioError("missing ideal")
        text = text.strip()
        if text in self.saved:
            return self.saved[text]
        if text == "m":
            return tuple(self.ring.variables)
        call = _CALL.match(text)
        if call and call.group("head") == "ideal":
            text = call.group("body")
        return tuple(f for f in self.polys(text) if f)

    def derivation(self, name: str) -> Derivation:
        name = name.strip()
        if name not in self.scenario.derivations:
            raise ScenarioError(f"unknown derivation {name}")
        result = check_well_defined(self.scenario.derivations[name], self.ring, name)
        if not isinstance(result, Derivation):
            raise UnverifiedDerivationError(result.describe())
        return result

    def derivations(self, text: str | None, bound: int | None = None) -> list[Derivation]:
        """Named derivations, or ``*`` for a homogeneous basis of all of Der_k(R)."""
        if (text or "").strip() == "*":
            return derivation_space(self.ring, bound).all()
        names = split_list(text or "")
        if not names:
            raise ScenarioError("no derivations named")
        return [self.derivation(name) for name in names]

    def module(self, text: str | None, bound: int | None = None) -> PresentedModule:
        """Resolve a module reference: R, R^n, k, m, omega, der, der_coker, ideal(..), quotient(..) or a saved ideal."""
        text = (text or "R").strip()
        ring = self.ring
        key = f"module:{text}:{bound}"
        if key in self.cache:
            return self.cache[key]
        if text == "R":
            module = free_module(ring)
        elif power := _POWER.match(text):
            module = free_module(ring, int(power.group("rank")))
        elif text == "k":
            module = residue_field(ring)
        elif text == "m":
            module = maximal_ideal(ring, bound)
        elif text == "omega":
            module = omega_presentation(ring)
        elif text == "der":
            module = der_module(ring, bound).module
        elif text == "der_coker":
            module = der_cokernel(ring, bound).module
        elif text in self.saved:
            module = ideal_module(ring, self.saved[text], bound, name=text)
        elif call := _CALL.match(text):
            head, body = call.group("head"), call.group("body").strip()
            gens = self.ideal(body)
            if head == "ideal":
                module = ideal_module(ring, gens, bound, name=f"({body})")
            elif head == "quotient":
                module = cyclic_module(ring, gens, name=f"R/({body})")
            else:
                raise ScenarioError(f"unknown module constructor {head}")
        else:
            raise ScenarioError(f"unknown module {text!r}")
        self.cache[key] = module
        return module

    def save(self, task: TaskSpec, generators: tuple[PolyElement, ...]) -> None:
        if name := task.get("save_as"):
            self.saved[name] = tuple(generators)


def _int(text: str | None, what: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{what} must be an integer, got {text!r}") from exc


def _flag(text: str | None, default: bool = False) -> bool:
    if text is None:
        return default
    return text.strip().lower() in {"true", "yes", "1", "on"}


# Derivations


def well_defined(ctx: TaskContext, task: TaskSpec) -> Facts:
    name = task.get("derivation", "D")
    if name not in ctx.scenario.derivations:
        raise ScenarioError(f"unknown derivation {name}")
    result = check_well_defined(ctx.scenario.derivations[name], ctx.ring, name)
    facts: Facts = {"verified": isinstance(result, Derivation)}
    if isinstance(result, Derivation):
        facts["images"] = IdealFact(result.images)
    else:
        facts["failure"] = result.describe()
    return facts


def apply(ctx: TaskContext, task: TaskSpec) -> Facts:
    D = ctx.derivation(task.get("derivation", "D"))
    elements = ctx.polys(task.get("element"))
    if len(elements) != 1:
        raise ScenarioError("apply needs exactly one element")
    return {"value": ElementFact(apply_derivation(D, elements[0]))}


def differential_ideal(ctx: TaskContext, task: TaskSpec) -> Facts:
    derivations = ctx.derivations(task.get("derivations") or task.get("derivation"))
    gens = ctx.ideal(task.get("ideal"))
    witness = differential_witness(gens, derivations, ctx.ring)
    facts: Facts = {"differential": witness is None}
    if witness is not None:
        D, g = witness
        facts["witness"] = f"{D.name}({format_polynomial(g)})"
    return facts


def max_differential(ctx: TaskContext, task: TaskSpec) -> Facts:
    derivations = ctx.derivations(task.get("derivations") or task.get("derivation"))
    candidate = ctx.ideal(task.get("candidate")) if task.get("candidate") else None
    result = maximally_differential_ideal(ctx.ring, derivations, task.get("mode", "auto"), candidate)
    ctx.save(task, result.generators)
    facts: Facts = {
        "generators": IdealFact(result.generators),
        "mu": len(result.generators),
        "mode": result.mode,
        "certified": result.certified,
    }
    if result.steps:
        facts["steps"] = tuple(result.steps)
    if result.quotient_length is not None:
        facts["quotient_length"] = result.quotient_length
    return facts


# Ring invariants


def socle_task(ctx: TaskContext, task: TaskSpec) -> Facts:
    result = socle(ctx.ring)
    return {"dimension": result.dimension, "generators": IdealFact(result.generators)}


def gorenstein(ctx: TaskContext, task: TaskSpec) -> Facts:
    return {"gorenstein": is_gorenstein_artinian(ctx.ring)}


def embdim(ctx: TaskContext, task: TaskSpec) -> Facts:
    ring = ctx.ring
    return {"embdim": embedding_dimension(ring), "dimension": ring.krull_dimension, "fact41": fact41_check(ring)}


def krull_dim(ctx: TaskContext, task: TaskSpec) -> Facts:
    return {"dimension": ctx.ring.krull_dimension}


def length(ctx: TaskContext, task: TaskSpec) -> Facts:
    ring = ctx.ring
    if task.get("ideal"):
        return {"length": quotient_length(ring.gb, ctx.ideal(task.get("ideal")))}
    return {"length": ring.length}


def depth(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    reference = task.get("module", "R")
    target = ctx.ring if reference == "R" else ctx.module(reference, bound)
    result = depth_graded(target, bound)
    return {"depth": result.value, "witness": result.witness, "certified": result.certified}


def regular_sequence(ctx: TaskContext, task: TaskSpec) -> Facts:
    return {"regular": is_regular_sequence(ctx.polys(task.get("elements")), ctx.ring)}


def ci_ideal(ctx: TaskContext, task: TaskSpec) -> Facts:
    verdict = is_complete_intersection_ideal(ctx.ideal(task.get("ideal")), ctx.ring, ctx.degree_bound(task))
    return {"ci": verdict.ci, "reason": verdict.reason}


def ci_presentation(ctx: TaskContext, task: TaskSpec) -> Facts:
    result = ci_presentation_check(ctx.ring)
    return {
        "kind": result.kind,
        "mu": result.mu,
        "height": result.height,
        "almost_ci": result.almost_ci,
        "purely_almost_ci": result.purely_almost_ci,
    }


def min_generators(ctx: TaskContext, task: TaskSpec) -> Facts:
    ring = ctx.ring
    if task.get("ideal"):
        gens = minimal_generators(IdealBasis.of(ring.ambient, list(ctx.ideal(task.get("ideal")))), ring.gb)
        ctx.save(task, gens)
        return {"mu": len(gens), "generators": IdealFact(gens)}
    module = ctx.module(task.get("module"), ctx.degree_bound(task))
    return {"mu": minimal_number_of_generators(module)}


def annihilator(ctx: TaskContext, task: TaskSpec) -> Facts:
    elements = tuple(ctx.polys(task.get("elements")))
    if not elements:
        raise ScenarioError("annihilator needs at least one element")
    gens = colon_annihilator(ctx.ring.gb, elements if len(elements) > 1 else elements[0]).generators
    ctx.save(task, gens)
    return {"generators": IdealFact(gens), "zero": not gens}


def classify(ctx: TaskContext, task: TaskSpec) -> Facts:
    verdict = classify_ring(ctx.ring, ctx.degree_bound(task))
    facts: Facts = {}
    if verdict.length is not None:
        facts["length"] = verdict.length
    facts.update(
        dimension=verdict.dimension,
        depth=verdict.depth,
        embdim=verdict.embdim,
        presentation=verdict.presentation.kind,
        almost_ci=verdict.presentation.almost_ci,
        purely_almost_ci=verdict.presentation.purely_almost_ci,
        regular=verdict.regular,
    )
    if verdict.socle is not None:
        facts["socle_dimension"] = verdict.socle_dimension
    if verdict.gorenstein is not None:
        facts["gorenstein"] = verdict.gorenstein
    return facts


# Differentials and derivation modules


def omega(ctx: TaskContext, task: TaskSpec) -> Facts:
    ring = ctx.ring
    module = omega_presentation(ring)
    facts: Facts = {
        "generators": module.ngens,
        "relations": module.relations.source.rank,
        "jacobian_zero": jacobian_matrix(ring).is_zero_over(ring),
        "mu": minimal_number_of_generators(module),
    }
    if ring.is_artinian or ring.is_domain:
        certificate = is_free(module)
        facts["free"] = certificate.free
        if certificate.rank is not None:
            facts["rank"] = certificate.rank
    return facts


def der(ctx: TaskContext, task: TaskSpec) -> Facts:
    ring = ctx.ring
    bound = ctx.degree_bound(task)
    result = der_module(ring, bound)
    facts: Facts = {
        "dimension": result.dimension,
        "dims": dict(sorted(result.dims_by_degree.items())),
        "generators": result.module.ngens,
        "exact": result.exact,
    }
    if ring.is_artinian:
        coker = der_cokernel(ring, bound)
        facts["coker_dimension"] = coker.dimension
        facts["coker_killed_by_m"] = coker.killed_by_maximal_ideal
    return facts


def module_rank_task(ctx: TaskContext, task: TaskSpec) -> Facts:
    return {"rank": module_rank(ctx.module(task.get("module"), ctx.degree_bound(task)))}


def is_free_task(ctx: TaskContext, task: TaskSpec) -> Facts:
    certificate = is_free(ctx.module(task.get("module"), ctx.degree_bound(task)))
    return {"free": certificate.free, "mu": certificate.mu, "reason": certificate.reason}


# Homological algebra


def resolution(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    module = ctx.module(task.get("module"), bound)
    steps = _int(task.get("length", "3"), "length")
    complex_ = MinimalResolution(module, bound).complex(steps)
    facts: Facts = {"ranks": tuple(complex_.ranks), "d2_zero": complex_.first_nonzero_square() is None}
    if _flag(task.get("check_exact")):
        homology = [homology_of_complex(complex_, i, bound).dimension for i in range(1, steps)]
        facts["exact"] = not any(homology)
    return facts


def hom_dual_task(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    dual = hom_dual(ctx.module(task.get("module"), bound), bound)
    return {
        "generators": dual.module.ngens,
        "dimension": dual.module.total_dimension(bound),
        "dims": dual.module.dims_by_degree(bound),
    }


def ext(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    module = ctx.module(task.get("module"), bound)
    if task.get("upto"):
        resolution_ = MinimalResolution(module, bound)
        upto = _int(task.get("upto"), "upto")
        dims = tuple(
            ext_module(module, i, bound, resolution_, with_module=False).dimension for i in range(1, upto + 1)
        )
        return {"dims": dims, "vanish": not any(dims)}
    index = _int(task.get("index", "1"), "index")
    result = ext_module(module, index, bound, with_module=False)
    return {"dim": result.dimension, "dims": dict(sorted(result.by_degree.items())), "exact": result.exact}


def tor(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    module = ctx.module(task.get("module"), bound)
    other = ctx.module(task.get("other", "k"), bound)
    index = _int(task.get("index", "1"), "index")
    result = tor_module(module, other, index, bound)
    return {"dim": result.dimension, "dims": dict(sorted(result.by_degree.items()))}


def biduality(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    module = ctx.module(task.get("module"), bound)
    result = biduality_is_iso(module, bound)
    return {
        "iso": result.iso,
        "injective": result.injective,
        "surjective": result.surjective,
        "dual_generators": result.dual.module.ngens if result.dual else 0,
    }


def totally_reflexive(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    certificate = totally_reflexive_check(ctx.module(task.get("module"), bound), ctx.ext_n(task), bound)
    facts: Facts = {"verdict": certificate.verdict, "passed": certificate.passed}
    if certificate.failed_index is not None:
        facts["failed_index"] = certificate.failed_index
    return facts


def gdim(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    route = task.get("route", "direct")
    n = ctx.ext_n(task)
    if route == "ses":
        gens = ctx.ideal(task.get("ideal") or task.get("module"))
        module = ideal_module(ctx.ring, gens, bound, name="B")
        evidence = gdim_evidence(module, n, bound, method="ses", ideal=gens)
    else:
        evidence = gdim_evidence(ctx.module(task.get("module"), bound), n, bound, method=route)
    facts: Facts = {"evidence": evidence.describe(), "kind": evidence.kind, "route": evidence.route}
    if evidence.d is not None:
        facts["d"] = evidence.d
    if evidence.index is not None:
        facts["index"] = evidence.index
    return facts


def frobenius(ctx: TaskContext, task: TaskSpec) -> Facts:
    bound = ctx.degree_bound(task)
    shape = task.get("complex", "identity")
    if shape == "identity":
        complex_ = identity_complex(ctx.module(task.get("module"), bound))
    elif shape == "koszul":
        elements = ctx.polys(task.get("element"))
        if len(elements) != 1:
            raise ScenarioError("the Koszul complex needs exactly one element")
        complex_ = koszul_complex(ctx.ring, elements[0])
    elif shape == "resolution":
        module = ctx.module(task.get("module"), bound)
        complex_ = MinimalResolution(module, bound).complex(_int(task.get("length", "3"), "length"))
    else:
        raise ScenarioError(f"unknown complex {shape!r}")
    positions = sorted(complex_.terms)
    untwisted = tuple(homology_of_complex(complex_, i, bound).dimension for i in positions[1:])
    report = acyclicity_report(complex_, ctx.n_max(task), bound)
    facts: Facts = {"acyclic": report.acyclic, "untwisted": untwisted}
    for n, dims in report.homology.items():
        facts[f"twist{n}"] = tuple(dims[i] for i in sorted(dims))
    if (failure := report.first_failure()) is not None:
        facts["first_failure"] = f"n={failure[0]}, H{failure[1]}"
    return facts


def rigidity(ctx: TaskContext, task: TaskSpec) -> Facts:
    upto = _int(task.get("upto", "4"), "upto")
    dims = tuple(rigidity_check(ctx.ring, upto, ctx.degree_bound(task)))
    return {"ext": dims, "vanish": not any(dims)}


TASK_HANDLERS: dict[str, Callable[[TaskContext, TaskSpec], Facts]] = {
    "well_defined": well_defined,
    "apply": apply,
    "differential_ideal": differential_ideal,
    "max_differential": max_differential,
    "socle": socle_task,
    "gorenstein": gorenstein,
    "embdim": embdim,
    "krull_dim": krull_dim,
    "depth": depth,
    "regular_sequence": regular_sequence,
    "ci_ideal": ci_ideal,
    "ci_presentation": ci_presentation,
    "min_generators": min_generators,
    "annihilator": annihilator,
    "length": length,
    "omega": omega,
    "der": der,
    "module_rank": module_rank_task,
    "is_free": is_free_task,
    "resolution": resolution,
    "hom_dual": hom_dual_task,
    "ext": ext,
    "tor": tor,
    "biduality": biduality,
    "totally_reflexive": totally_reflexive,
    "gdim": gdim,
    "frobenius": frobenius,
    "rigidity": rigidity,
    "classify": classify,
}

TASK_KINDS = frozenset(TASK_HANDLERS)
