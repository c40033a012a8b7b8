"""Thin command-line client for the job runners.

Configs are YAML or JSON documents validated against the service schema.
By default jobs run in-process; with --server they are POSTed to a running
service instance.  Exit codes: 0 all checks pass, 1 invariant violation,
2 configuration error.
"""

from __future__ import annotations

import json
import logging
import pathlib
import sys

import click
import httpx
import pydantic
import yaml

from . import __version__
from .service import jobs
from .service.reporting import render_csv, render_json
from .service.schemas import RunConfig, RunReport

EXIT_PASS = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2

_RUNNERS = {
    "basis": jobs.run_basis,
    "projector": jobs.run_projector,
    "spectrum": jobs.run_spectrum,
    "evolve": jobs.run_evolve,
    "verify": jobs.run_verify,
}


def _load_config(path: str, seed: int | None, cutoff: int | None) -> RunConfig:
    try:
        raw = yaml.safe_load(pathlib.Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise _config_error([f"cannot read config {path}: {exc}"])
    if not isinstance(raw, dict):
        raise _config_error([f"config root must be a mapping, got {type(raw).__name__}"])
    if seed is not None:
        raw.setdefault("quadrature", {})["seed"] = seed
    if cutoff is not None:
        raw["cutoff"] = cutoff
    try:
        return RunConfig.model_validate(raw)
    except pydantic.ValidationError as exc:
        raise _config_error(
            [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()])


class _ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


def _config_error(messages: list[str]) -> _ConfigError:
    return _ConfigError("invalid configuration:\n  " + "\n  ".join(messages))


def _run_remote(command: str, config: RunConfig, server: str) -> RunReport:
    response = httpx.post(f"{server.rstrip('/')}/{command}",
                          json=config.model_dump(mode="json"), timeout=600.0)
    if response.status_code == 422:
        raise _config_error([str(response.json().get("detail"))])
    response.raise_for_status()
    return RunReport.model_validate(response.json())


def _emit(report: RunReport, output: str | None, fmt: str | None) -> None:
    fmt = fmt or report.config.output_format
    text = render_csv(report) if fmt == "csv" else render_json(report)
    target = output or report.config.output_path
    if target:
        pathlib.Path(target).write_text(text)
        click.echo(f"{report.command}: status={report.status} -> {target}", err=True)
    else:
        click.echo(text, nl=False)


def _execute(command: str, config_path: str, output: str | None, fmt: str | None,
             seed: int | None, cutoff: int | None, server: str | None) -> None:
    config = _load_config(config_path, seed, cutoff)
    if server:
        report = _run_remote(command, config, server)
    else:
        report = _RUNNERS[command](config)
    _emit(report, output, fmt)
    if report.status != "pass":
        failed = [c.name for c in report.checks if not c.passed]
        click.echo(f"invariant violations: {', '.join(failed)}", err=True)
        sys.exit(EXIT_INVARIANT)


def _job_command(name: str, help_text: str):
    @click.command(name=name, help=help_text)
    @click.option("--config", "config_path", required=True, type=click.Path(exists=True),
                  help="YAML or JSON run configuration.")
    @click.option("--output", type=click.Path(), default=None,
                  help="Write the report here instead of stdout.")
    @click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None,
                  help="Report format (overrides the config).")
    @click.option("--seed", type=int, default=None, help="Override the quadrature seed.")
    @click.option("--cutoff", type=int, default=None, help="Override the cutoff.")
    @click.option("--server", default=None,
                  help="Base URL of a running service; jobs run in-process when omitted.")
    def command(config_path, output, fmt, seed, cutoff, server):
        _execute(name, config_path, output, fmt, seed, cutoff, server)

    return command


@click.group()
@click.version_option(version=__version__)
def main():
    """Gauge-invariant projectors and evolution for finite-dimensional gauge models."""
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(name)s %(levelname)s %(message)s")


main.add_command(_job_command("basis", "Basis dimensions and physical dimensions per degree block."))
main.add_command(_job_command("projector", "Build the projector and run the invariant suite."))
main.add_command(_job_command("spectrum", "Physical and full spectra on the certified band."))
main.add_command(_job_command("evolve", "Sliced evolution with the convergence-order ladder."))
main.add_command(_job_command("verify", "Run every applicable invariant check."))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("gaugeproj.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
