"""Job runners behind the service endpoints and the CLI client.

Each runner takes a validated RunConfig and produces a RunReport whose
status reflects the invariant checks that ran.  Reports are fully
deterministic for a fixed config (wall times go to the log stream, never
into the report body, so identical configs yield byte-identical reports).
"""

from __future__ import annotations

import logging
import time

import numpy as np

from .. import __version__, checks
from ..evolution import (
    evolve_physical,
    fit_convergence_order,
    physical_spectrum,
    sliced_defect_ladder,
)
from ..fock import kernel_eval
from ..models import constraint_operators, hamiltonian
from ..projector import ProjectorBundle, projector_matrix, ym_kernel_audit
from .schemas import (
    SCHEMA_VERSION,
    BasisResult,
    CheckRecord,
    ComplexPair,
    EvolveResult,
    KernelSample,
    LadderRow,
    ProjectorResult,
    RunConfig,
    RunReport,
    SpectrumLevel,
    SpectrumResult,
    SweepRow,
    VerifyResult,
    YmAudit,
    YmAuditRow,
    YmDegreeRow,
)

__all__ = ["run_basis", "run_projector", "run_spectrum", "run_evolve", "run_verify"]

log = logging.getLogger("gaugeproj")


def _records(results: list[checks.CheckResult]) -> list[CheckRecord]:
    return [CheckRecord(name=r.name, value=r.value, tolerance=r.tolerance,
                        passed=r.passed, info=r.info) for r in results]


def _report(command: str, config: RunConfig, results, records: list[CheckRecord]) -> RunReport:
    status = "pass" if all(r.passed for r in records) else "fail"
    report = RunReport(
        schema_version=SCHEMA_VERSION,
        artifact_version=__version__,
        command=command,
        status=status,
        config=config,
        results=results,
        checks=records,
    )
    return report.finalize()


class _Timer:
    def __init__(self, command: str):
        self.command = command
        self.t0 = time.perf_counter()

    def done(self, stage: str) -> None:
        log.info("%s: %s finished in %.3f s", self.command, stage,
                 time.perf_counter() - self.t0)
        self.t0 = time.perf_counter()


def _sample_points(config: RunConfig, num: int, scale: float = 0.5):
    rng = np.random.default_rng(config.sample_seed())
    nm = config.build_model().modes.num_modes
    return [(scale * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm)),
             scale * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm)))
            for _ in range(num)]


def run_basis(config: RunConfig) -> RunReport:
    """Basis dimensions and per-degree physical dimensions from the null space."""
    timer = _Timer("basis")
    model = config.build_model()
    gs = constraint_operators(model)
    bundle = projector_matrix(model, "nullspace",
                              svd_threshold=config.tolerances.svd_rank_relative,
                              constraints=gs)
    timer.done("nullspace")
    results = BasisResult(
        dimension=model.modes.dim,
        block_dims=model.modes.block_dims(),
        physical_block_dims=list(bundle.physical_block_dims),
        physical_dimension=int(sum(bundle.physical_block_dims)),
    )
    rng = np.random.default_rng(config.sample_seed())
    records = _records(checks.fock_checks(model.modes, rng))
    return _report("basis", config, results, records)


def _build_bundles(config: RunConfig, model, gs) -> dict[str, ProjectorBundle]:
    tol = config.tolerances
    bundles: dict[str, ProjectorBundle] = {}
    bundles["nullspace"] = projector_matrix(model, "nullspace",
                                            svd_threshold=tol.svd_rank_relative,
                                            constraints=gs)
    quad = config.build_quadrature()
    bundles["group_average"] = projector_matrix(model, "group_average", quad=quad,
                                                constraints=gs)
    if model.kind == "so_n_vector":
        bundles["closed_form_basis"] = projector_matrix(model, "closed_form_basis")
    return bundles


def _ym_audit_model(audit: dict) -> YmAudit:
    return YmAudit(
        origin_exact=ComplexPair.of(audit["origin_exact"]),
        origin_verbatim=audit["origin_verbatim"],
        prescription_over_verbatim=audit["prescription_over_verbatim"],
        max_abs_dev_verbatim=audit["max_abs_dev_verbatim"],
        max_abs_dev_prescription=audit["max_abs_dev_prescription"],
        rows=[YmAuditRow(
            exact=ComplexPair.of(r["exact"]),
            verbatim=ComplexPair.of(r["verbatim"]),
            prescription=ComplexPair.of(r["prescription"]),
            abs_dev_verbatim=r["abs_dev_verbatim"],
            abs_dev_prescription=r["abs_dev_prescription"],
        ) for r in audit["points"]],
        degree_table=[YmDegreeRow(**row) for row in audit["degree_table"]],
    )


def run_projector(config: RunConfig) -> RunReport:
    """Build the projector by the requested method and run the invariant suite."""
    timer = _Timer("projector")
    tol = config.tolerances
    model = config.build_model()
    gs = constraint_operators(model)
    bundles = _build_bundles(config, model, gs)
    timer.done("bundles")
    requested = bundles[config.projector_method]

    records: list[CheckRecord] = []
    records += _records(checks.quadrature_checks(config.build_quadrature()))
    for bundle in bundles.values():
        records += _records(checks.projector_checks(
            bundle, gs, tol.projector_idempotency, tol.projector_hermiticity,
            tol.constraint_annihilation))
    others = [b for name, b in bundles.items() if name != "nullspace"]
    records += _records(checks.agreement_checks(
        bundles["nullspace"], others, tol.method_agreement_quadrature,
        tol.method_agreement_basis))
    records += _records(checks.basis_normalization_checks(model))
    rng = np.random.default_rng(config.sample_seed())
    records += _records(checks.kernel_consistency_checks(
        bundles["nullspace"], rng, tol=tol.kernel_series_match))
    records += _records(checks.kernel_invariance_checks(
        bundles["nullspace"], rng, tol=tol.kernel_invariance))
    timer.done("invariant suite")

    agreement = {}
    for rec in records:
        if rec.name.startswith("projector.agreement."):
            agreement[rec.name.removeprefix("projector.agreement.")] = rec.value
    samples = []
    for zl, zr in _sample_points(config, 5):
        samples.append(KernelSample(
            astar=[ComplexPair.of(z) for z in zl],
            a=[ComplexPair.of(z) for z in zr],
            value=ComplexPair.of(kernel_eval(requested.operator, zl, zr)),
        ))
    ym_audit = None
    if model.kind == "su2_ym":
        audit = ym_kernel_audit(bundles["nullspace"], _sample_points(config, 20, scale=0.4))
        ym_audit = _ym_audit_model(audit)
        records.append(CheckRecord(
            name="projector.ym_closed_form_audit_emitted", value=0.0, tolerance=1.0,
            passed=True, info="factorized kernel under test; see ym_audit"))
        timer.done("ym audit")

    results = ProjectorResult(
        method=config.projector_method,
        physical_block_dims=list(requested.physical_block_dims),
        agreement=agreement,
        kernel_samples=samples,
        quadrature=requested.diagnostics.get("quadrature"),
        ym_audit=ym_audit,
    )
    return _report("projector", config, results, records)


def _levels(values, merge_tol: float) -> list[SpectrumLevel]:
    out: list[list] = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if out and abs(v - out[-1][0]) <= merge_tol:
            e, m = out[-1]
            out[-1] = [(e * m + v) / (m + 1), m + 1]
        else:
            out.append([float(v), 1])
    return [SpectrumLevel(energy=e, multiplicity=m) for e, m in out]


def run_spectrum(config: RunConfig) -> RunReport:
    """Physical and full spectra on the certified band, plus the cutoff sweep."""
    timer = _Timer("spectrum")
    tol = config.tolerances
    model = config.build_model()
    gs = constraint_operators(model)
    h = hamiltonian(model)
    bundle = projector_matrix(model, "nullspace",
                              svd_threshold=tol.svd_rank_relative, constraints=gs)
    band = model.certified_band
    levels = physical_spectrum(h, bundle, max_degree=max(band, 0),
                               merge_tol=tol.degeneracy_merge)
    stop = model.modes.block_slice(max(band, 0)).stop
    full = np.linalg.eigvalsh(h.matrix[:stop, :stop])
    timer.done("spectra")

    sweep_rows = []
    for cutoff in config.spectrum_sweep:
        sweep_model = config.build_model(cutoff)
        sweep_h = hamiltonian(sweep_model)
        sweep_bundle = projector_matrix(sweep_model, "nullspace",
                                        svd_threshold=tol.svd_rank_relative)
        sweep_band = sweep_model.certified_band
        certified = sweep_band >= 0
        max_deg = sweep_band if certified else sweep_model.modes.cutoff
        sweep_levels = physical_spectrum(sweep_h, sweep_bundle, max_degree=max_deg,
                                         merge_tol=tol.degeneracy_merge)
        sweep_rows.append(SweepRow(
            cutoff=cutoff,
            certified_band=sweep_band,
            certified=certified,
            ground_energy=sweep_levels[0][0] if sweep_levels else float("nan"),
            levels=[SpectrumLevel(energy=e, multiplicity=m) for e, m in sweep_levels[:5]],
        ))
    if config.spectrum_sweep:
        timer.done("sweep")

    records = _records(checks.hamiltonian_checks(model, h, gs,
                                                 tol.hamiltonian_gauge_commutator))
    results = SpectrumResult(
        certified_band=band,
        physical_levels=[SpectrumLevel(energy=e, multiplicity=m) for e, m in levels],
        full_levels=_levels(full, tol.degeneracy_merge),
        physical_block_dims=list(bundle.physical_block_dims),
        sweep=sweep_rows,
    )
    return _report("spectrum", config, results, records)


def run_evolve(config: RunConfig) -> RunReport:
    """Projected and sliced evolution with the convergence-order ladder."""
    timer = _Timer("evolve")
    tol = config.tolerances
    model = config.build_model()
    gs = constraint_operators(model)
    h = hamiltonian(model)
    bundle = projector_matrix(model, "nullspace",
                              svd_threshold=tol.svd_rank_relative, constraints=gs)
    t = config.evolution.time
    ladder = config.evolution.slice_ladder
    rows = sliced_defect_ladder(h, bundle.operator, t, ladder)
    eps = [r["eps"] for r in rows]
    global_order = fit_convergence_order(eps, [r["global_defect"] for r in rows])
    local_order = fit_convergence_order(eps, [r["local_defect"] for r in rows])
    timer.done("ladder")

    rng = np.random.default_rng(config.sample_seed())
    records = _records(checks.evolution_checks(
        model, h, bundle, t, ladder, rng,
        projection_tol=tol.evolution_projection,
        reconstruction_tol=tol.spectral_reconstruction,
        origin_tol=tol.effective_hamiltonian_origin,
        global_window=(tol.global_order_low, tol.global_order_high),
        local_window=(tol.local_order_low, tol.local_order_high)))
    # unitarity restricted to the physical subspace
    ut = evolve_physical(h, bundle.operator, t).operator.matrix
    qm = bundle.operator.matrix
    unit_dev = float(np.abs(ut.conj().T @ ut - qm).max())
    records.append(CheckRecord(name="evolution.physical_unitarity", value=unit_dev,
                               tolerance=tol.evolution_projection,
                               passed=unit_dev <= tol.evolution_projection,
                               info="U^+ U = Q on the truncated space"))
    timer.done("checks")

    results = EvolveResult(
        time=t,
        ladder=[LadderRow(**r) for r in rows],
        global_order=global_order,
        local_order=local_order,
        short_time_constant=rows[-1]["local_defect"] / rows[-1]["eps"] ** 2,
    )
    return _report("evolve", config, results, records)


def run_verify(config: RunConfig) -> RunReport:
    """Run every invariant check applicable to the configured model."""
    timer = _Timer("verify")
    tol = config.tolerances
    model = config.build_model()
    gs = constraint_operators(model)
    h = hamiltonian(model)
    bundles = _build_bundles(config, model, gs)
    timer.done("construction")

    rng = np.random.default_rng(config.sample_seed())
    records: list[CheckRecord] = []
    records += _records(checks.fock_checks(model.modes, rng))
    records += _records(checks.generator_checks(model.generators,
                                                tol.constraint_algebra))
    records += _records(checks.constraint_checks(model, gs, tol.constraint_algebra))
    records += _records(checks.hamiltonian_checks(model, h, gs,
                                                  tol.hamiltonian_gauge_commutator))
    records += _records(checks.quadrature_checks(config.build_quadrature()))
    for bundle in bundles.values():
        records += _records(checks.projector_checks(
            bundle, gs, tol.projector_idempotency, tol.projector_hermiticity,
            tol.constraint_annihilation))
    others = [b for name, b in bundles.items() if name != "nullspace"]
    records += _records(checks.agreement_checks(
        bundles["nullspace"], others, tol.method_agreement_quadrature,
        tol.method_agreement_basis))
    records += _records(checks.basis_normalization_checks(model))
    records += _records(checks.kernel_consistency_checks(
        bundles["nullspace"], rng, tol=tol.kernel_series_match))
    records += _records(checks.kernel_invariance_checks(
        bundles["nullspace"], rng, tol=tol.kernel_invariance))
    timer.done("structure checks")
    records += _records(checks.evolution_checks(
        model, h, bundles["nullspace"], config.evolution.time,
        config.evolution.slice_ladder, rng,
        projection_tol=tol.evolution_projection,
        reconstruction_tol=tol.spectral_reconstruction,
        origin_tol=tol.effective_hamiltonian_origin,
        global_window=(tol.global_order_low, tol.global_order_high),
        local_window=(tol.local_order_low, tol.local_order_high)))
    if model.kind == "su2_ym":
        ym_kernel_audit(bundles["nullspace"], _sample_points(config, 10, scale=0.4))
        records.append(CheckRecord(
            name="projector.ym_closed_form_audit_emitted", value=0.0, tolerance=1.0,
            passed=True, info="factorized kernel under test"))
    timer.done("evolution checks")

    failed = sum(1 for r in records if not r.passed)
    results = VerifyResult(total_checks=len(records), failed_checks=failed)
    return _report("verify", config, results, records)
