"""Named invariant checks over models, projectors, kernels, and evolution.

Each function returns a list of CheckResult records (name, measured value,
tolerance, pass flag) so callers can aggregate them into machine-readable
reports with every number tagged by the tolerance that certified it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .evolution import (
    evolve_full,
    evolve_physical,
    fit_convergence_order,
    h_ef_eval,
    sliced_defect_ladder,
    spectral_reconstruction,
)
from .fock import FockOperator, kernel_eval
from .models import GaugeModel, GeneratorSet
from .projector import (
    HaarQuadrature,
    ProjectorBundle,
    kernel_closed_form_son,
    physical_basis_son,
)

__all__ = [
    "CheckResult",
    "fock_checks",
    "generator_checks",
    "constraint_checks",
    "hamiltonian_checks",
    "projector_checks",
    "agreement_checks",
    "basis_normalization_checks",
    "kernel_consistency_checks",
    "kernel_invariance_checks",
    "evolution_checks",
    "quadrature_checks",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    info: str = ""


def _check(name: str, value: float, tol: float, info: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(name, value, float(tol), bool(value <= tol), info)


def _window_check(name: str, value: float, low: float, high: float) -> CheckResult:
    # encoded as distance outside the window, so 0 means inside
    dist = max(low - value, value - high, 0.0)
    return CheckResult(name, float(value), float(high), dist == 0.0,
                       f"window [{low:g}, {high:g}]")


def fock_checks(modes, rng: np.random.Generator, tol: float = 1e-12) -> list[CheckResult]:
    """Ladder commutators below the cutoff, basis dimension, truncated-exponential kernel."""
    from .fock import FockOperator as _Op
    from .fock import ladder_operators, position_momentum

    nm, cutoff = modes.num_modes, modes.cutoff
    dim_dev = abs(modes.dim - math.comb(cutoff + nm, nm))
    ann, cre = ladder_operators(modes)
    comm_dev = 0.0
    sub = modes.block_slice(cutoff).start  # indices of degree <= cutoff - 1
    for a, c in zip(ann, cre):
        comm = (a.matrix @ c.matrix - c.matrix @ a.matrix)[:sub, :sub]
        comm_dev = max(comm_dev, float(np.abs(comm - np.eye(sub)).max()))
    xs, ps = position_momentum(modes)
    herm_dev = max(float(np.abs(o.matrix - o.matrix.conj().T).max()) for o in xs + ps)
    ident = _Op.identity(modes)
    kernel_dev = 0.0
    for _ in range(5):
        zl = 0.5 * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm))
        zr = 0.5 * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm))
        w = zl @ zr
        series = sum(w**k / math.factorial(k) for k in range(cutoff + 1))
        kernel_dev = max(kernel_dev, abs(kernel_eval(ident, zl, zr) - series))
    return [
        _check("fock.dimension_binomial", float(dim_dev), 0.0),
        _check("fock.ladder_commutator", comm_dev, tol),
        _check("fock.position_momentum_hermiticity", herm_dev, tol),
        _check("fock.identity_kernel_truncated_exponential", kernel_dev, tol),
    ]


def generator_checks(gens: GeneratorSet, tol: float = 1e-12) -> list[CheckResult]:
    t = gens.generators
    f = gens.structure_constants
    antisym = float(np.abs(t + np.transpose(t, (0, 2, 1))).max())
    closure = 0.0
    for a in range(gens.num_generators):
        for b in range(gens.num_generators):
            comm = t[a] @ t[b] - t[b] @ t[a]
            closure = max(closure, float(np.abs(comm - np.einsum("c,cij->ij", f[a, b], t)).max()))
    f_antisym = float(max(np.abs(f + np.transpose(f, (1, 0, 2))).max(),
                          np.abs(f + np.transpose(f, (0, 2, 1))).max()))
    return [
        _check("generators.antisymmetry", antisym, tol),
        _check("generators.closure", closure, tol),
        _check("generators.structure_constants_antisymmetry", f_antisym, tol),
    ]


def constraint_checks(model: GaugeModel, constraints: list[FockOperator],
                      algebra_tol: float = 1e-12) -> list[CheckResult]:
    f = model.generators.structure_constants
    anti_herm = max(float(np.abs(g.matrix + g.matrix.conj().T).max()) for g in constraints)
    algebra = 0.0
    for a in range(len(constraints)):
        for b in range(len(constraints)):
            comm = constraints[a].matrix @ constraints[b].matrix \
                - constraints[b].matrix @ constraints[a].matrix
            expect = sum(f[a, b, c] * constraints[c].matrix for c in range(len(constraints)))
            algebra = max(algebra, float(np.abs(comm - expect).max()))
    modes = model.modes
    off_block = 0.0
    trace_dev = 0.0
    for g in constraints:
        mask = modes.degrees[:, None] != modes.degrees[None, :]
        off_block = max(off_block, float(np.abs(g.matrix[mask]).max()) if mask.any() else 0.0)
        for k in range(modes.cutoff + 1):
            sl = modes.block_slice(k)
            trace_dev = max(trace_dev, abs(complex(np.trace(g.matrix[sl, sl]))))
    vacuum = max(float(np.abs(g.matrix[:, 0]).max()) for g in constraints)
    return [
        _check("constraints.anti_hermiticity", anti_herm, algebra_tol),
        _check("constraints.algebra", algebra, algebra_tol),
        _check("constraints.degree_preservation", off_block, 0.0),
        _check("constraints.block_tracelessness", trace_dev, algebra_tol),
        _check("constraints.vacuum_annihilation", vacuum, algebra_tol),
    ]


def hamiltonian_checks(model: GaugeModel, h: FockOperator,
                       constraints: list[FockOperator],
                       gauge_tol: float = 1e-10) -> list[CheckResult]:
    herm = float(np.abs(h.matrix - h.matrix.conj().T).max())
    comm = max(float(np.abs(h.matrix @ g.matrix - g.matrix @ h.matrix).max())
               for g in constraints)
    return [
        _check("hamiltonian.hermiticity", herm, gauge_tol),
        _check("hamiltonian.gauge_commutator", comm, gauge_tol),
    ]


def projector_checks(bundle: ProjectorBundle, constraints: list[FockOperator],
                     idempotency_tol: float = 1e-10,
                     hermiticity_tol: float = 1e-10,
                     annihilation_tol: float = 1e-10) -> list[CheckResult]:
    q = bundle.operator.matrix
    modes = bundle.operator.modes
    info = ""
    if "mc_stderr_max" in bundle.diagnostics:
        # Monte Carlo averages satisfy the projector laws only statistically;
        # widen to a 5-sigma-scale window propagated through the products
        sigma = bundle.diagnostics["mc_stderr_max"]
        stat = 20.0 * sigma + modes.dim * sigma**2
        idempotency_tol = max(idempotency_tol, stat)
        hermiticity_tol = max(hermiticity_tol, stat)
        annihilation_tol = max(annihilation_tol, stat * max(
            float(np.abs(g.matrix).max()) for g in constraints))
        info = "Monte Carlo statistical window"
    idem = float(np.abs(q @ q - q).max())
    herm = float(np.abs(q - q.conj().T).max())
    gq = max(float(np.abs(g.matrix @ q).max()) for g in constraints)
    qg = max(float(np.abs(q @ g.matrix).max()) for g in constraints)
    mask = modes.degrees[:, None] != modes.degrees[None, :]
    off_block = float(np.abs(q[mask]).max()) if mask.any() else 0.0
    out = [
        _check(f"projector.{bundle.method}.idempotency", idem, idempotency_tol, info),
        _check(f"projector.{bundle.method}.hermiticity", herm, hermiticity_tol, info),
        _check(f"projector.{bundle.method}.constraint_annihilation_left", gq,
               annihilation_tol, info),
        _check(f"projector.{bundle.method}.constraint_annihilation_right", qg,
               annihilation_tol, info),
        _check(f"projector.{bundle.method}.block_diagonality", off_block, 0.0),
    ]
    ambiguities = bundle.diagnostics.get("rank_ambiguities", [])
    out.append(CheckResult(f"projector.{bundle.method}.rank_unambiguous",
                           float(len(ambiguities)), 0.0, len(ambiguities) == 0,
                           "singular values within 10x of the rank threshold"))
    return out


def agreement_checks(reference: ProjectorBundle, others: list[ProjectorBundle],
                     quadrature_tol: float = 1e-8,
                     basis_tol: float = 1e-10) -> list[CheckResult]:
    out = []
    for other in others:
        dev = float(np.abs(reference.operator.matrix - other.operator.matrix).max())
        if other.method == "group_average" and "mc_stderr_max" in other.diagnostics:
            tol = 5.0 * max(other.diagnostics["mc_stderr_max"], 1e-12)
            info = "5 sigma Monte Carlo window"
        elif other.method == "group_average":
            tol, info = quadrature_tol, "exactness-matched quadrature"
        else:
            tol, info = basis_tol, ""
        out.append(_check(f"projector.agreement.{reference.method}_vs_{other.method}", dev, tol, info))
    return out


def basis_normalization_checks(model: GaugeModel, tol: float = 1e-10) -> list[CheckResult]:
    """Invariant-tower normalization against the closed-form constants (vector model)."""
    from .fock import ladder_operators
    from .projector import son_normalization

    if model.kind != "so_n_vector":
        return []
    modes = model.modes
    _, creators = ladder_operators(modes)
    pair = sum(c.matrix @ c.matrix for c in creators)
    v = np.zeros(modes.dim, dtype=complex)
    v[0] = 1.0
    worst = 0.0
    for n in range(modes.cutoff // 2 + 1):
        if n:
            v = pair @ v
        # norm of the unnormalized tower state must equal 1 / c_n
        expected = 1.0 / son_normalization(n, modes.num_modes)
        worst = max(worst, abs(np.linalg.norm(v) - expected) / expected)
    return [_check("basis.invariant_tower_normalization", worst, tol, "relative")]


def _series_tail_cap(num_modes: int, cutoff: int, tail: float) -> float:
    """Largest |uv| for which the first dropped series term stays below ``tail``."""
    from .projector import son_normalization

    k = cutoff // 2 + 1
    c2 = son_normalization(k, num_modes) ** 2
    return (tail / c2) ** (1.0 / k)


def kernel_consistency_checks(bundle: ProjectorBundle, rng: np.random.Generator,
                              num_points: int = 100, tol: float = 1e-8,
                              tail: float = 1e-12) -> list[CheckResult]:
    """Series kernel versus the matrix kernel of the projector (vector model).

    Points are rescaled so that series contributions beyond the cutoff stay
    below ``tail``; the two evaluations then differ only by rounding.
    """
    model = bundle.model
    if model.kind != "so_n_vector":
        return []
    nm = model.num_modes
    cap = _series_tail_cap(nm, model.modes.cutoff, tail)
    worst = 0.0
    for _ in range(num_points):
        zl = rng.standard_normal(nm) + 1j * rng.standard_normal(nm)
        zr = rng.standard_normal(nm) + 1j * rng.standard_normal(nm)
        w = abs(zl @ zl) * abs(zr @ zr)
        if w > cap:
            shrink = (cap / w) ** 0.25
            zl, zr = zl * shrink, zr * shrink
        series = kernel_closed_form_son(zl, zr, nm)
        matrix = kernel_eval(bundle.operator, zl, zr)
        worst = max(worst, abs(series - matrix))
    return [_check("kernel.series_vs_matrix", worst, tol,
                   f"{num_points} points, |uv| <= {cap:.3g}")]


def kernel_invariance_checks(bundle: ProjectorBundle, rng: np.random.Generator,
                             num_group: int = 20, num_points: int = 20,
                             scale: float = 0.6, tol: float = 1e-10) -> list[CheckResult]:
    """Q(R astar, R a) = Q(astar, a) for Haar-random rotations."""
    from .models import rotation_on_modes

    model = bundle.model
    n = model.generators.dim_rep
    sampler = HaarQuadrature.monte_carlo(n, num_group, seed=int(rng.integers(2**31)))
    _, rots = sampler.rotation_nodes()
    worst = 0.0
    nm = model.num_modes
    for rot in rots:
        big = rotation_on_modes(model, rot)
        for _ in range(num_points):
            zl = scale * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm))
            zr = scale * (rng.standard_normal(nm) + 1j * rng.standard_normal(nm))
            base = kernel_eval(bundle.operator, zl, zr)
            moved = kernel_eval(bundle.operator, big @ zl, big @ zr)
            worst = max(worst, abs(moved - base))
    return [_check("kernel.group_invariance", worst, tol,
                   f"{num_group} rotations x {num_points} points")]


def _random_nullspace_state(q: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    dim = q.shape[0]
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi = psi - q @ psi
    norm = np.linalg.norm(psi)
    return psi / norm if norm > 0 else psi


def evolution_checks(model: GaugeModel, h: FockOperator, bundle: ProjectorBundle,
                     t: float, slice_ladder: list[int], rng: np.random.Generator,
                     projection_tol: float = 1e-10,
                     reconstruction_tol: float = 1e-9,
                     origin_tol: float = 1e-10,
                     global_window: tuple[float, float] = (0.8, 1.2),
                     local_window: tuple[float, float] = (1.8, 2.2)) -> list[CheckResult]:
    q = bundle.operator
    qm = q.matrix
    out = []
    u0 = evolve_physical(h, q, 0.0).operator.matrix
    out.append(_check("evolution.initial_condition_is_projector",
                      float(np.abs(u0 - qm).max()), projection_tol))
    ut = evolve_physical(h, q, t).operator.matrix
    out.append(_check("evolution.projector_sandwich",
                      float(np.abs(ut - qm @ ut).max()), projection_tol))
    psi0 = _random_nullspace_state(qm, rng)
    out.append(_check("evolution.unphysical_removal",
                      float(np.linalg.norm(ut @ psi0)), projection_tol))
    recon = spectral_reconstruction(h, q, t)
    out.append(_check("evolution.spectral_reconstruction",
                      float(np.abs(recon - ut).max()), reconstruction_tol))
    rows = sliced_defect_ladder(h, q, t, slice_ladder)
    eps = [r["eps"] for r in rows]
    p = fit_convergence_order(eps, [r["global_defect"] for r in rows])
    qord = fit_convergence_order(eps, [r["local_defect"] for r in rows])
    out.append(_window_check("evolution.global_order", p, *global_window))
    out.append(_window_check("evolution.local_order", qord, *local_window))
    if model.potential.kind == "harmonic":
        origin = np.zeros(model.num_modes, dtype=complex)
        hval = h_ef_eval(h, q, origin, origin)
        out.append(_check("evolution.effective_hamiltonian_origin",
                          abs(hval - model.num_modes / 2.0), origin_tol))
    return out


def quadrature_checks(quad: HaarQuadrature, tol: float = 1e-12) -> list[CheckResult]:
    diag = quad.self_test()
    if quad.is_monte_carlo:
        tol = max(tol, 5.0 * diag.get("mean_rotation_stderr", 0.0))
    return [
        _check("quadrature.weight_normalization", diag["weight_sum_error"], tol),
        _check("quadrature.trivial_component", diag["mean_rotation_norm"], tol),
    ]
