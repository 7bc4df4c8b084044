"""Running scenarios: tasks in order, expectations checked, one span and one timer per task."""

from __future__ import annotations

import asyncio
import re
from pathlib import Path
from typing import Any, Sequence

import structlog
from opentelemetry import trace

from diffalg.engine.groebner import ideals_equal
from diffalg.errors import DiffalgError, ScenarioError
from diffalg.metrics import MetricsTimer, scenarios_total, task_duration, tasks_total
from diffalg.scenario.expressions import split_list
from diffalg.scenario.models import Scenario, TaskSpec
from diffalg.scenario.parser import load_scenario, parse_bool
from diffalg.scenario.report import ERROR, FAIL, PASS, Report, TaskOutcome, format_fact
from diffalg.scenario.tasks import TASK_HANDLERS, ElementFact, IdealFact, TaskContext

logger = structlog.get_logger()
tracer = trace.get_tracer(__name__)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"

_COMPARISON = re.compile(r"^(?P<op><=|>=|!=|==|<|>)?\s*(?P<value>-?\d+)$")


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] == '"':
        return text[1:-1]
    return text


def matches(value: Any, expected: str, ctx: TaskContext) -> bool:
    """Compare a fact with an ``expect_*`` value; ideals compare as ideals of R."""
    text = _unquote(expected)
    if isinstance(value, bool):
        return parse_bool(text, "expectation") == value
    if isinstance(value, int):
        if text == "nonzero":
            return value != 0
        match = _COMPARISON.match(text)
        if match is None:
            raise ScenarioError(f"cannot compare {value} with {expected!r}")
        target = int(match.group("value"))
        op = match.group("op") or "=="
        return {
            "==": value == target,
            "!=": value != target,
            "<=": value <= target,
            ">=": value >= target,
            "<": value < target,
            ">": value > target,
        }[op]
    if isinstance(value, IdealFact):
        if text == "nonzero":
            return bool(value.generators)
        if text in {"0", "zero"}:
            return not value.generators
        ring = ctx.ring
        return ideals_equal(ring.gb, value.generators, ctx.ideal(text))
    if isinstance(value, ElementFact):
        expected_elements = ctx.polys(text)
        if len(expected_elements) != 1:
            raise ScenarioError(f"expected a single element, got {expected!r}")
        return not ctx.ring.nf(value.value - expected_elements[0])
    if isinstance(value, (tuple, list)):
        return [str(v) for v in value] == split_list(text)
    if isinstance(value, dict):
        return format_fact(value) == f'"{text}"'
    return str(value) == text


def run_task(ctx: TaskContext, task: TaskSpec) -> TaskOutcome:
    handler = TASK_HANDLERS[task.kind]
    with tracer.start_as_current_span(f"task.{task.kind}") as span:
        span.set_attribute("scenario.name", ctx.scenario.name)
        span.set_attribute("task.index", task.index)
        with MetricsTimer(task_duration, {"kind": task.kind}) as timer:
            try:
                facts = handler(ctx, task)
                mismatches = []
                for key, expected in task.expectations.items():
                    if key not in facts:
                        mismatches.append(f"{key}: no such fact (expected {expected})")
                    elif not matches(facts[key], expected, ctx):
                        mismatches.append(f"{key}: expected {expected}, got {format_fact(facts[key])}")
                outcome = TaskOutcome(
                    index=task.index,
                    kind=task.kind,
                    status=FAIL if mismatches else PASS,
                    facts={key: format_fact(value) for key, value in facts.items()},
                    mismatches=mismatches,
                    checked=len(task.expectations),
                )
            except DiffalgError as exc:
                logger.warning("task_failed", scenario=ctx.scenario.name, task=task.index, kind=exc.kind, error=str(exc))
                outcome = TaskOutcome(
                    index=task.index, kind=task.kind, status=ERROR, error=str(exc), error_kind=exc.kind
                )
            except Exception as exc:
                logger.exception("task_crashed", scenario=ctx.scenario.name, task=task.index)
                outcome = TaskOutcome(
                    index=task.index,
                    kind=task.kind,
                    status=ERROR,
                    error=f"{type(exc).__name__}: {exc}",
                    error_kind="internal",
                )
        outcome.seconds = round(timer.elapsed, 4)
        span.set_attribute("task.status", outcome.status)
    tasks_total.labels(kind=task.kind, status=outcome.status).inc()
    logger.info("task_done", scenario=ctx.scenario.name, task=task.index, kind=task.kind, status=outcome.status)
    return outcome


def run_scenario(
    scenario: Scenario,
    bound: int | None = None,
    ext_bound: int | None = None,
    frobenius_max: int | None = None,
) -> Report:
    """Run every task in order; later tasks may use ideals saved by earlier ones."""
    with tracer.start_as_current_span("run_scenario") as span:
        span.set_attribute("scenario.name", scenario.name)
        ring = scenario.ring
        ctx = TaskContext(scenario, bound, ext_bound, frobenius_max)
        report = Report(scenario=scenario.name, ring=repr(ring))
        with MetricsTimer(task_duration, {"kind": "scenario"}) as timer:
            for task in scenario.tasks:
                report.tasks.append(run_task(ctx, task))
        report.seconds = round(timer.elapsed, 4)
        span.set_attribute("scenario.status", report.status)
    scenarios_total.labels(status=report.status).inc()
    logger.info("scenario_done", scenario=scenario.name, status=report.status, tasks=len(report.tasks))
    return report


def run_file(path: str | Path, **overrides: int | None) -> Report:
    return run_scenario(load_scenario(path), **overrides)


def corpus_paths(directory: Path = CORPUS_DIR) -> list[Path]:
    paths = sorted(directory.glob("*.scn"))
    if not paths:
        raise ScenarioError(f"no scenarios found in {directory}")
    return paths


async def run_corpus(paths: Sequence[Path] | None = None, **overrides: int | None) -> list[Report]:
    """Run scenario files concurrently, one worker thread each."""
    paths = list(paths) if paths is not None else corpus_paths()
    logger.info("corpus_started", scenarios=len(paths))
    return list(await asyncio.gather(*(asyncio.to_thread(run_file, path, **overrides) for path in paths)))
