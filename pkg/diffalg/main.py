from fastapi import FastAPI, HTTPException, Request, Response
import asyncio
import structlog

from opentelemetry import trace
from opentelemetry.instrumentation.fastapi import FastAPIInstrumentor

from diffalg.errors import DiffalgError
from diffalg.metrics import get_content_type, get_metrics
from diffalg.observability import configure
from diffalg.scenario.parser import parse_scenario
from diffalg.scenario.runner import run_scenario

configure()

logger = structlog.get_logger()
tracer = trace.get_tracer(__name__)

app = FastAPI(title="diffalg", version="0.1.0")

FastAPIInstrumentor.instrument_app(app)


@app.get("/healthz")
async def healthcheck() -> dict[str, str]:
    return {"status": "ok"}


@app.get("/metrics")
async def metrics():
    """Prometheus metrics endpoint."""
    return Response(content=get_metrics(), media_type=get_content_type())


@app.post("/scenarios/run")
async def run(
    request: Request,
    name: str = "request",
    bound: int | None = None,
    ext_bound: int | None = None,
    frobenius_max: int | None = None,
) -> dict:
    """Run a scenario posted as plain text; the engine works in a worker thread."""
    text = (await request.body()).decode("utf-8")
    with tracer.start_as_current_span("scenario_request") as span:
        span.set_attribute("scenario.name", name)
        try:
            scenario = parse_scenario(text, name=name)
            report = await asyncio.to_thread(run_scenario, scenario, bound, ext_bound, frobenius_max)
        except DiffalgError as exc:
            logger.warning("scenario_rejected", kind=exc.kind, error=str(exc))
            span.set_attribute("scenario.status", "rejected")
            raise HTTPException(status_code=422, detail={"kind": exc.kind, "error": str(exc)}) from exc
    return {
        "status": report.status,
        "report": report.model_dump(),
        "machine": report.machine_lines(),
    }
