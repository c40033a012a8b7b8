"""Deterministic report rendering: canonical JSON and plot-ready CSV."""

from __future__ import annotations

import io
import json

from .schemas import RunReport

__all__ = ["render_json", "render_csv"]


def render_json(report: RunReport) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _write_table(out: io.StringIO, name: str, header: list[str], rows: list[list]) -> None:
    out.write(f"# table: {name}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def render_csv(report: RunReport) -> str:
    """Tabular sections of a report as sectioned CSV text."""
    out = io.StringIO()
    out.write(f"# gaugeproj report, command={report.command}, status={report.status}\n")
    out.write(f"# schema_version={report.schema_version}, fingerprint={report.fingerprint}\n")
    _write_table(out, "checks", ["name", "value", "tolerance", "passed"],
                 [[c.name, c.value, c.tolerance, c.passed] for c in report.checks])
    res = report.results
    if res.kind == "basis":
        _write_table(out, "block_dims", ["degree", "dimension", "physical_dimension"],
                     [[k, d, p] for k, (d, p) in
                      enumerate(zip(res.block_dims, res.physical_block_dims))])
    elif res.kind == "projector":
        _write_table(out, "physical_block_dims", ["degree", "physical_dimension"],
                     list(enumerate(res.physical_block_dims)))
        _write_table(out, "agreement", ["pair", "max_abs_difference"],
                     [[k, v] for k, v in sorted(res.agreement.items())])
        if res.ym_audit is not None:
            _write_table(out, "ym_audit_degree", ["degree", "max_abs_dev_prescription",
                                                  "max_abs_exact"],
                         [[r.degree, r.max_abs_dev_prescription, r.max_abs_exact]
                          for r in res.ym_audit.degree_table])
    elif res.kind == "spectrum":
        _write_table(out, "physical_levels", ["energy", "multiplicity"],
                     [[l.energy, l.multiplicity] for l in res.physical_levels])
        _write_table(out, "full_levels", ["energy", "multiplicity"],
                     [[l.energy, l.multiplicity] for l in res.full_levels])
        if res.sweep:
            _write_table(out, "sweep", ["cutoff", "certified_band", "certified",
                                        "ground_energy"],
                         [[r.cutoff, r.certified_band, r.certified, r.ground_energy]
                          for r in res.sweep])
    elif res.kind == "evolve":
        _write_table(out, "defect_ladder",
                     ["num_slices", "eps", "global_defect", "local_defect"],
                     [[r.num_slices, r.eps, r.global_defect, r.local_defect]
                      for r in res.ladder])
        _write_table(out, "orders", ["quantity", "value"],
                     [["global_order", res.global_order],
                      ["local_order", res.local_order],
                      ["short_time_constant", res.short_time_constant]])
    elif res.kind == "verify":
        _write_table(out, "summary", ["total_checks", "failed_checks"],
                     [[res.total_checks, res.failed_checks]])
    return out.getvalue()
