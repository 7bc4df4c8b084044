"""Reading ``.scn`` scenario files: ``[ring]``, ``[derivation NAME]`` and ``[task N]`` sections."""

from __future__ import annotations

import configparser
import re
from pathlib import Path

import structlog
from sympy.polys.rings import PolyRing

from diffalg.engine.core import CoefficientField, polynomial_ring
from diffalg.errors import DiffalgError, ScenarioError, UnknownVariableError
from diffalg.scenario.expressions import parse_polynomial, parse_polynomials, split_items, split_list
from diffalg.scenario.models import Scenario, TaskSpec
from diffalg.scenario.tasks import TASK_KINDS

logger = structlog.get_logger()

_SECTION = re.compile(r"^\s*\[(?P<name>[^\]]+)\]\s*$")
_KEY = re.compile(r"^\s*(?P<key>[^=:#;\s][^=:]*?)\s*[=:]")
_CALL = re.compile(r"^(?P<head>\w+)\((?P<body>.*)\)$", re.DOTALL)
_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def _locations(text: str) -> dict[tuple[str, str], tuple[int, int]]:
    """Line and value column of every ``key = value`` line, keyed by (section, key)."""
    index: dict[tuple[str, str], tuple[int, int]] = {}
    section = ""
    for number, line in enumerate(text.splitlines(), start=1):
        if match := _SECTION.match(line):
            section = match.group("name").strip()
            index[(section, "")] = (number, 1)
        elif match := _KEY.match(line):
            start = match.end()
            column = start + len(line[start:]) - len(line[start:].lstrip()) + 1
            index.setdefault((section, match.group("key").strip()), (number, column))
    return index


def parse_bool(value: str, what: str = "flag") -> bool:
    token = value.strip().lower()
    if token in _TRUE:
        return True
    if token in _FALSE:
        return False
    raise ScenarioError(f"{what} must be true or false, got {value!r}")


def _read_config(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc
    return parser


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Validate a scenario text; expressions are read into the declared ring."""
    config = _read_config(text)
    locations = _locations(text)
    if not config.has_section("ring"):
        raise ScenarioError("a scenario needs a [ring] section")
    ring_section = config["ring"]

    try:
        field = CoefficientField.parse(ring_section.get("field", "Q"))
        variables = split_list(ring_section.get("variables", ""))
        if not variables:
            raise ScenarioError("[ring] declares no variables")
        weights = None
        if "weights" in ring_section:
            weights = [int(w) for w in split_list(ring_section["weights"])]
            if any(w <= 0 for w in weights):
                raise ScenarioError(f"weights must be positive, got {weights}")
        ambient = polynomial_ring(variables, field, weights, ring_section.get("order", "grevlex").strip())
    except ValueError as exc:
        raise ScenarioError(f"bad [ring] section: {exc}") from exc

    relations = tuple(
        parse_polynomials(ring_section.get("relations", ""), ambient, *locations.get(("ring", "relations"), (0, 1)))
    )
    scenario = Scenario(
        name=name,
        field=field,
        ambient=ambient,
        relations=relations,
        is_domain=parse_bool(ring_section.get("domain", "false"), "domain"),
        description=ring_section.get("description", ""),
        ring_name=ring_section.get("name", "R"),
    )

    sections: dict[int, str] = {}
    for section in config.sections():
        if section == "ring":
            continue
        head, _, label = section.partition(" ")
        label = label.strip()
        if head == "derivation":
            if not label:
                raise ScenarioError("a derivation section needs a name")
            images = {}
            for key, value in config[section].items():
                if key not in variables:
                    raise UnknownVariableError(key)
                line, column = _item_location(value, locations.get((section, key), (0, 1)))
                images[key] = parse_polynomial(_unquote(value), ambient, line, column)
            scenario.derivations[label] = images
        elif head == "task":
            task = _parse_task(config[section], label, locations.get((section, ""), (0, 1))[0])
            sections[task.index] = section
            scenario.tasks.append(task)
        else:
            raise ScenarioError(f"unknown section [{section}]")

    scenario.tasks.sort(key=lambda t: t.index)
    indexes = [t.index for t in scenario.tasks]
    if len(set(indexes)) != len(indexes):
        raise ScenarioError("task numbers must be unique")
    _check_task_expressions(scenario, sections, locations)
    logger.debug("scenario_parsed", scenario=scenario.name, tasks=len(scenario.tasks))
    return scenario


def _unquote(value: str) -> str:
    items = split_list(value)
    if len(items) != 1:
        raise ScenarioError(f"expected a single expression, got {value!r}")
    return items[0]


def _item_location(value: str, location: tuple[int, int]) -> tuple[int, int]:
    """Line and column of the single item of ``value``, quotes skipped."""
    line, column = location
    items = split_items(value)
    return line, column + (items[0][1] if items else 0)


# Task keys whose values are polynomial expressions, and facts whose expectations are.
_EXPRESSION_PARAMS = ("ideal", "elements", "element", "candidate")
_MODULE_PARAMS = ("module", "other")
_EXPRESSION_FACTS = ("generators", "images", "value")
_SYMBOLS = {"m", "0", "zero", "nonzero", "*"}


def _check_expression_list(
    text: str, ambient: PolyRing, location: tuple[int, int], saved: set[str], unquote: bool = False
) -> None:
    line, column = location
    stripped = text.strip()
    if unquote and stripped.startswith('"') and stripped.endswith('"') and len(stripped) >= 2:
        column += text.index('"') + 1
        text = stripped[1:-1]
        stripped = text.strip()
    if stripped in saved or stripped in _SYMBOLS:
        return
    column += len(text) - len(text.lstrip())
    if call := _CALL.match(stripped):
        if call.group("head") not in {"ideal", "quotient"}:
            return
        column += call.start("body")
        stripped = call.group("body")
        if stripped.strip() in saved or stripped.strip() in _SYMBOLS:
            return
    parse_polynomials(stripped, ambient, line, column)


def _check_task_expressions(
    scenario: Scenario, sections: dict[int, str], locations: dict[tuple[str, str], tuple[int, int]]
) -> None:
    """Read every expression-valued task key now, so a typo is a malformed file, not a failed task."""
    saved = {name.strip() for task in scenario.tasks if (name := task.get("save_as"))}
    for task in scenario.tasks:
        section = sections[task.index]
        for key in _EXPRESSION_PARAMS + _MODULE_PARAMS:
            value = task.get(key)
            if value is None:
                continue
            if key in _MODULE_PARAMS and not _CALL.match(value.strip()):
                continue
            _check_expression_list(value, scenario.ambient, locations.get((section, key), (task.line, 1)), saved)
        for key in _EXPRESSION_FACTS:
            value = task.expectations.get(key)
            if value is not None:
                location = locations.get((section, f"expect_{key}"), (task.line, 1))
                _check_expression_list(value, scenario.ambient, location, saved, unquote=True)


def _parse_task(section: configparser.SectionProxy, label: str, line: int) -> TaskSpec:
    if not label.isdigit():
        raise ScenarioError(f"task sections are numbered, got [task {label}]")
    kind = section.get("kind", "").strip()
    if not kind:
        raise ScenarioError(f"task {label} has no kind")
    if kind not in TASK_KINDS:
        raise ScenarioError(f"unknown task kind {kind!r} in task {label}")
    params, expectations = {}, {}
    for key, value in section.items():
        if key == "kind":
            continue
        if key.startswith("expect_"):
            expectations[key[len("expect_"):]] = value.strip()
        else:
            params[key] = value.strip()
    return TaskSpec(int(label), kind, params, expectations, line)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_scenario(text, name=path.stem)
    except DiffalgError:
        logger.warning("scenario_rejected", path=str(path))
        raise
