"""Prometheus metrics for the engine and the scenario runner."""

import time
from typing import Any, Dict

from prometheus_client import CONTENT_TYPE_LATEST, Counter, Histogram, generate_latest

tasks_total = Counter("diffalg_tasks_total", "Scenario tasks executed", ["kind", "status"])

scenarios_total = Counter("diffalg_scenarios_total", "Scenarios executed", ["status"])

groebner_runs_total = Counter("diffalg_groebner_runs_total", "Buchberger runs")

task_duration = Histogram(
    "diffalg_task_duration_seconds",
    "Time spent executing a scenario task",
    ["kind"],
)


def get_metrics() -> bytes:
    """Return Prometheus metrics in text format."""
    return generate_latest()


def get_content_type() -> str:
    """Return the content type for Prometheus metrics."""
    return CONTENT_TYPE_LATEST


class MetricsTimer:
    """Context manager observing the wall time of a block into a histogram."""

    def __init__(self, histogram: Histogram, labels: Dict[str, Any]):
        self.histogram = histogram
        self.labels = labels
        self.start_time = None
        self.elapsed = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time is not None:
            self.elapsed = time.perf_counter() - self.start_time
            self.histogram.labels(**self.labels).observe(self.elapsed)
