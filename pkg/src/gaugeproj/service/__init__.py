"""FastAPI service wrapping the core package: request/response schemas,
job runners, and the ASGI application."""

from .schemas import RunConfig, RunReport, SCHEMA_VERSION
from .jobs import run_basis, run_evolve, run_projector, run_spectrum, run_verify

__all__ = [
    "SCHEMA_VERSION",
    "RunConfig",
    "RunReport",
    "run_basis",
    "run_projector",
    "run_spectrum",
    "run_evolve",
    "run_verify",
]
