"""Runtime settings read from the environment (and a .env file when present)."""

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class Settings(BaseModel):
    degree_bound: int = Field(12, ge=1)
    ext_bound_artinian: int = Field(10, ge=1)
    ext_bound_graded: int = Field(5, ge=1)
    frobenius_max: int = Field(3, ge=1)
    log_level: str = "INFO"
    otlp_endpoint: str | None = None


@lru_cache
def get_settings() -> Settings:
    load_dotenv()
    env = {
        "degree_bound": os.getenv("DIFFALG_DEGREE_BOUND"),
        "ext_bound_artinian": os.getenv("DIFFALG_EXT_BOUND_ARTINIAN"),
        "ext_bound_graded": os.getenv("DIFFALG_EXT_BOUND_GRADED"),
        "frobenius_max": os.getenv("DIFFALG_FROBENIUS_MAX"),
        "log_level": os.getenv("DIFFALG_LOG_LEVEL"),
        "otlp_endpoint": os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT"),
    }
    return Settings(**{key: value for key, value in env.items() if value is not None})
