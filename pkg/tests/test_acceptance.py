"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Tolerances are pinned here, not configurable.
"""

import math
import time

import numpy as np
import pytest

from gaugeproj.evolution import (
    evolve_physical,
    fit_convergence_order,
    h_ef_eval,
    physical_spectrum,
    short_time_kernel,
    sliced_defect_ladder,
)
from gaugeproj.fock import FockOperator, kernel_eval
from gaugeproj.models import (
    PotentialSpec,
    constraint_operators,
    hamiltonian,
    rotation_on_modes,
    so_n_vector_model,
    su2_ym_model,
)
from gaugeproj.projector import (
    HaarQuadrature,
    kernel_closed_form_son,
    projector_matrix,
    son_normalization,
    ym_kernel_audit,
)
from gaugeproj.service.jobs import run_verify
from gaugeproj.service.reporting import render_json
from gaugeproj.service.schemas import RunConfig


@pytest.fixture(scope="module")
def systems():
    """The three reference systems of the acceptance runs."""
    out = {}
    for key, model in (("so2", so_n_vector_model(2, 8)),
                       ("so3", so_n_vector_model(3, 6)),
                       ("ym", su2_ym_model(4, 0.6))):
        gs = constraint_operators(model)
        bundle = projector_matrix(model, "nullspace", constraints=gs)
        out[key] = (model, gs, bundle)
    return out


def scaled_pair(rng, num_modes, uv_cap=1.0):
    """A coherent pair rescaled so |astar.astar| |a.a| <= uv_cap."""
    zl = rng.standard_normal(num_modes) + 1j * rng.standard_normal(num_modes)
    zr = rng.standard_normal(num_modes) + 1j * rng.standard_normal(num_modes)
    w = abs(zl @ zl) * abs(zr @ zr)
    target = uv_cap * float(rng.uniform(0.05, 1.0))
    shrink = (target / w) ** 0.25
    return zl * shrink, zr * shrink


def test_criterion_01_projector_law(systems):
    for key, (model, gs, bundle) in systems.items():
        q = bundle.operator.matrix
        assert np.abs(q @ q - q).max() <= 1e-10, key
        assert np.abs(q - q.conj().T).max() <= 1e-10, key
        assert max(np.abs(g.matrix @ q).max() for g in gs) <= 1e-10, key
    print("\nACCEPTANCE 1 projector law (SO2 L=8, SO3 L=6, YM L=4): PASS")


def test_criterion_02_three_method_agreement(systems):
    for key, (model, gs, bundle) in systems.items():
        ga = projector_matrix(model, "group_average", constraints=gs)
        dev = np.abs(bundle.operator.matrix - ga.operator.matrix).max()
        assert dev <= 1e-8, (key, dev)
        if model.kind == "so_n_vector":
            cb = projector_matrix(model, "closed_form_basis")
            dev = np.abs(bundle.operator.matrix - cb.operator.matrix).max()
            assert dev <= 1e-10, (key, dev)
    print("ACCEPTANCE 2 three-method agreement: PASS")


def test_criterion_03_closed_form_series():
    rng = np.random.default_rng(3)
    for num_modes, cutoff in ((2, 12), (3, 10)):
        model = so_n_vector_model(num_modes, cutoff)
        bundle = projector_matrix(model, "nullspace")
        worst = 0.0
        for _ in range(100):
            zl, zr = scaled_pair(rng, num_modes)
            series = kernel_closed_form_son(zl, zr, num_modes)
            matrix = kernel_eval(bundle.operator, zl, zr)
            worst = max(worst, abs(series - matrix))
        assert worst <= 1e-8, (num_modes, worst)
    # two-mode case: coefficients match the modified-Bessel I_0 series term by term
    for n in range(30):
        c2 = son_normalization(n, 2) ** 2
        i0 = math.exp(-n * math.log(4.0) - 2.0 * math.lgamma(n + 1))
        assert abs(c2 - i0) <= 1e-13 * i0
    print("ACCEPTANCE 3 closed-form kernel vs null-space kernel (100 pts, |uv|<=1): PASS")


def test_criterion_04_group_invariance(systems):
    rng = np.random.default_rng(4)
    for key, (model, gs, bundle) in systems.items():
        n = model.generators.dim_rep
        _, rots = HaarQuadrature.monte_carlo(n, 20, seed=41).rotation_nodes()
        worst = 0.0
        for rot in rots:
            big = rotation_on_modes(model, rot)
            for _ in range(20):
                zl, zr = scaled_pair(rng, model.modes.num_modes, uv_cap=0.8)
                base = kernel_eval(bundle.operator, zl, zr)
                moved = kernel_eval(bundle.operator, big @ zl, big @ zr)
                worst = max(worst, abs(moved - base))
        assert worst <= 1e-10, (key, worst)
    print("ACCEPTANCE 4 kernel invariance (20 rotations x 20 points per model): PASS")


def test_criterion_05_physical_spectra():
    for num_modes, expected in ((2, [1.0, 3.0, 5.0, 7.0]),
                                (3, [1.5, 3.5, 5.5, 7.5])):
        model = so_n_vector_model(num_modes, 8)
        h = hamiltonian(model)
        bundle = projector_matrix(model, "nullspace")
        levels = physical_spectrum(h, bundle, max_degree=model.certified_band)
        energies = np.array([e for e, _ in levels])
        assert np.abs(energies - np.array(expected)).max() <= 1e-9
        # state count per degree block matches the null-space oracle exactly
        for (e, mult) in levels:
            degree = int(round(e - num_modes / 2.0))
            assert mult == bundle.physical_block_dims[degree]
    print("ACCEPTANCE 5 harmonic physical spectra and state counts: PASS")


def test_criterion_06_evolution_projection():
    rng = np.random.default_rng(6)
    coupling = float(rng.uniform(0.05, 0.3))
    model = so_n_vector_model(3, 8, PotentialSpec.polynomial_x2(0.5, coupling))
    h = hamiltonian(model)
    bundle = projector_matrix(model, "nullspace")
    q = bundle.operator.matrix
    ut = evolve_physical(h, bundle.operator, 1.0).operator.matrix
    assert np.abs(ut - q @ ut).max() <= 1e-10
    for _ in range(5):
        psi = rng.standard_normal(model.modes.dim) + 1j * rng.standard_normal(model.modes.dim)
        psi -= q @ psi
        psi /= np.linalg.norm(psi)
        assert np.linalg.norm(ut @ psi) <= 1e-10
    u0 = evolve_physical(h, bundle.operator, 0.0).operator.matrix
    assert np.abs(u0 - q).max() <= 1e-12
    print("ACCEPTANCE 6 evolution projection (random invariant quartic): PASS")


def test_criterion_07_sliced_convergence_orders():
    start = time.perf_counter()
    model = so_n_vector_model(2, 4)
    h = hamiltonian(model)
    bundle = projector_matrix(model, "nullspace")
    rows = sliced_defect_ladder(h, bundle.operator, 1.0, [16, 32, 64, 128])
    eps = [r["eps"] for r in rows]
    p = fit_convergence_order(eps, [r["global_defect"] for r in rows])
    q = fit_convergence_order(eps, [r["local_defect"] for r in rows])
    elapsed = time.perf_counter() - start
    assert 0.8 <= p <= 1.2, p
    assert 1.8 <= q <= 2.2, q
    assert elapsed < 10.0, elapsed
    print(f"ACCEPTANCE 7 sliced convergence p={p:.3f}, q={q:.3f}, {elapsed:.2f}s: PASS")


def test_criterion_08_effective_hamiltonian():
    rng = np.random.default_rng(8)
    for num_modes in (2, 3):
        model = so_n_vector_model(num_modes, 8)
        h = hamiltonian(model)
        bundle = projector_matrix(model, "nullspace")
        origin = np.zeros(num_modes)
        val = h_ef_eval(h, bundle.operator, origin, origin)
        assert abs(val - num_modes / 2.0) <= 1e-10
    # pointwise single-slice identity decays at second order in eps
    model = so_n_vector_model(2, 8)
    h = hamiltonian(model)
    bundle = projector_matrix(model, "nullspace")
    eps_ladder = [0.08 / 2**k for k in range(4)]
    kernels = {eps: short_time_kernel(h, bundle.operator, eps) for eps in eps_ladder}
    for _ in range(10):
        zl, zr = scaled_pair(rng, 2, uv_cap=0.6)
        qval = kernel_eval(bundle.operator, zl, zr)
        href = h_ef_eval(h, bundle.operator, zl, zr)
        devs = [abs(kernel_eval(kernels[eps], zl, zr) - qval * np.exp(-1j * eps * href))
                for eps in eps_ladder]
        slope = fit_convergence_order(eps_ladder, devs)
        assert 1.8 <= slope <= 2.2, slope
    print("ACCEPTANCE 8 effective-Hamiltonian origin and single-slice order: PASS")


def test_criterion_09_ym_closed_form_audit(systems):
    model, gs, bundle = systems["ym"]
    rng = np.random.default_rng(9)
    points = [scaled_pair(rng, 9, uv_cap=0.7) for _ in range(50)]
    audit = ym_kernel_audit(bundle, points)
    # the comparison must complete and quantify the discrepancy per factor level
    assert audit["origin_exact"] == pytest.approx(1.0, abs=1e-12)
    assert audit["origin_verbatim"] == pytest.approx(2.0**-1.5, rel=1e-13)
    assert len(audit["points"]) == 50
    assert {row["degree"] for row in audit["degree_table"]} == {0, 1, 2, 3, 4}
    print("ACCEPTANCE 9 verbatim factorized-kernel audit emitted "
          f"(origin {audit['origin_verbatim']:.6f} vs 1, "
          f"max dev rescaled {audit['max_abs_dev_prescription']:.3e}): PASS")


def test_criterion_10_determinism():
    cfg = {"model": {"type": "so_n_vector", "n": 2}, "cutoff": 6}
    a = render_json(run_verify(RunConfig.model_validate(cfg)))
    b = render_json(run_verify(RunConfig.model_validate(cfg)))
    assert a.encode() == b.encode()
    print("ACCEPTANCE 10 byte-identical verify reports: PASS")
