"""Scenario reports: pydantic models, the human text and the ``task.<n>.<key> = <value>`` lines."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from diffalg.engine.core import format_polynomial, format_polynomials
from diffalg.scenario.tasks import ElementFact, IdealFact

PASS = "PASS"
FAIL = "FAIL"
ERROR = "ERROR"


def format_fact(value: Any) -> str:
    """Machine form of a fact: integers, true/false, or a quoted string."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, IdealFact):
        return f'"{format_polynomials(value.generators)}"'
    if isinstance(value, ElementFact):
        return f'"{format_polynomial(value.value)}"'
    if isinstance(value, (tuple, list)):
        return f'"{", ".join(str(v) for v in value)}"'
    if isinstance(value, dict):
        return f'"{", ".join(f"{k}:{v}" for k, v in value.items())}"'
    return f'"{value}"'


class TaskOutcome(BaseModel):
    index: int
    kind: str
    status: str
    facts: dict[str, str] = Field(default_factory=dict)
    mismatches: list[str] = Field(default_factory=list)
    error: str | None = None
    error_kind: str | None = None
    checked: int = 0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS


class Report(BaseModel):
    scenario: str
    ring: str
    tasks: list[TaskOutcome] = Field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(task.passed for task in self.tasks)

    @property
    def status(self) -> str:
        return PASS if self.passed else FAIL

    def machine_lines(self) -> list[str]:
        """Deterministic facts, one per line; timings are left out."""
        lines = []
        for task in self.tasks:
            prefix = f"task.{task.index}"
            lines.append(f'{prefix}.kind = "{task.kind}"')
            for key, value in task.facts.items():
                lines.append(f"{prefix}.{key} = {value}")
            if task.error is not None:
                lines.append(f'{prefix}.error = "{task.error_kind}"')
            lines.append(f"{prefix}.status = {PASS if task.passed else FAIL}")
        lines.append(f"scenario.status = {self.status}")
        return lines

    def machine_text(self) -> str:
        return "\n".join(self.machine_lines()) + "\n"

    def human_text(self) -> str:
        out = [f"Scenario {self.scenario} over {self.ring}"]
        for task in self.tasks:
            note = "" if task.checked or task.status != PASS else " (informational)"
            out.append(f"  task {task.index} [{task.kind}]: {task.status}{note}  ({task.seconds:.2f}s)")
            for key, value in task.facts.items():
                out.append(f"    task.{task.index}.{key} = {value}")
            for mismatch in task.mismatches:
                out.append(f"    mismatch: {mismatch}")
            if task.error:
                out.append(f"    error ({task.error_kind}): {task.error}")
        out.append(f"  result: {self.status} ({sum(t.passed for t in self.tasks)}/{len(self.tasks)} tasks)")
        return "\n".join(out) + "\n"
