"""ASGI application exposing the job runners.

Every endpoint takes a RunConfig and returns a RunReport; configuration
errors surface as 422 responses with field-level messages, invariant
violations come back as status="fail" reports.
"""

from __future__ import annotations

from fastapi import FastAPI

from .. import __version__
from . import jobs
from .schemas import SCHEMA_VERSION, RunConfig, RunReport

app = FastAPI(
    title="gaugeproj service",
    version=__version__,
    description="Physical-subspace projectors and gauge-invariant evolution "
                "for finite-dimensional gauge models on truncated Fock spaces.",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__, "schema_version": SCHEMA_VERSION}


@app.get("/schemas")
def schemas() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": RunConfig.model_json_schema(),
        "report": RunReport.model_json_schema(),
    }


@app.post("/basis", response_model=RunReport)
def basis(config: RunConfig) -> RunReport:
    return jobs.run_basis(config)


@app.post("/projector", response_model=RunReport)
def projector(config: RunConfig) -> RunReport:
    return jobs.run_projector(config)


@app.post("/spectrum", response_model=RunReport)
def spectrum(config: RunConfig) -> RunReport:
    return jobs.run_spectrum(config)


@app.post("/evolve", response_model=RunReport)
def evolve(config: RunConfig) -> RunReport:
    return jobs.run_evolve(config)


@app.post("/verify", response_model=RunReport)
def verify(config: RunConfig) -> RunReport:
    return jobs.run_verify(config)
