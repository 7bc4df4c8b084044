"""End-to-end tests: the HTTP service and the shipped scenario corpus."""

import pytest
from fastapi.testclient import TestClient

from diffalg.main import app
from diffalg.scenario.runner import corpus_paths, run_corpus

from tests.test_scenario import SQUARES


class TestAPI:
    """Tests for the HTTP endpoints."""

    def test_health_check(self):
        with TestClient(app) as client:
            response = client.get("/healthz")
            assert response.status_code == 200
            assert response.json() == {"status": "ok"}

    def test_run_scenario(self):
        with TestClient(app) as client:
            response = client.post("/scenarios/run", params={"name": "squares"}, content=SQUARES)
            assert response.status_code == 200
            body = response.json()
            assert body["status"] == "PASS"
            assert body["report"]["scenario"] == "squares"
            assert body["machine"][-1] == "scenario.status = PASS"

            response = client.get("/metrics")
            assert response.status_code == 200
            assert "diffalg_scenarios_total" in response.text
            assert "diffalg_task_duration_seconds" in response.text

    def test_rejects_malformed_scenario(self):
        with TestClient(app) as client:
            response = client.post("/scenarios/run", content="[task 1]\nkind = length\n")
            assert response.status_code == 422
            assert response.json()["detail"]["kind"] == "scenario"


class TestCorpus:
    """The shipped scenarios all pass."""

    def test_corpus_is_shipped(self):
        names = {path.stem for path in corpus_paths()}
        assert {"ex3_1", "ex3_4", "ex4_11", "ex4_13", "ex4_14", "ex4_16"} <= names

    @pytest.mark.slow
    @pytest.mark.integration
    @pytest.mark.asyncio
    async def test_every_scenario_passes(self):
        reports = await run_corpus()
        failing = {
            report.scenario: [f"task {t.index}: {t.mismatches or t.error}" for t in report.tasks if not t.passed]
            for report in reports
            if not report.passed
        }
        assert not failing
