import itertools

import numpy as np
import pytest

from gaugeproj.fock import FockVector, ladder_operators
from gaugeproj.models import (
    PotentialSpec,
    constraint_operators,
    hamiltonian,
    rotation_on_modes,
    so_n_generators,
    so_n_vector_model,
    su2_ym_model,
)


def levi_civita():
    eps = np.zeros((3, 3, 3))
    for i, j, k in itertools.permutations(range(3)):
        eps[i, j, k] = (i - j) * (j - k) * (k - i) / 2
    return eps


class TestGenerators:
    def test_so2_single_abelian_generator(self):
        gens = so_n_generators(2)
        assert gens.num_generators == 1
        assert np.abs(gens.structure_constants).max() == 0.0

    def test_so3_standard_structure_constants(self):
        gens = so_n_generators(3)
        assert gens.num_generators == 3
        assert np.abs(gens.structure_constants - levi_civita()).max() < 1e-14

    def test_so4_closure_by_direct_commutators(self):
        gens = so_n_generators(4)
        assert gens.num_generators == 6
        t, f = gens.generators, gens.structure_constants
        for a in range(6):
            for b in range(6):
                comm = t[a] @ t[b] - t[b] @ t[a]
                recon = np.einsum("c,cij->ij", f[a, b], t)
                assert np.abs(comm - recon).max() < 1e-13

    def test_antisymmetry_exact(self):
        for n in (2, 3, 4, 5):
            t = so_n_generators(n).generators
            assert np.abs(t + np.transpose(t, (0, 2, 1))).max() == 0.0

    def test_structure_constants_totally_antisymmetric(self):
        f = so_n_generators(4).structure_constants
        assert np.abs(f + np.transpose(f, (1, 0, 2))).max() < 1e-14
        assert np.abs(f + np.transpose(f, (0, 2, 1))).max() < 1e-14

    def test_rejects_n_below_two(self):
        with pytest.raises(ValueError):
            so_n_generators(1)


class TestConstraints:
    def test_so2_matches_manual_ladder_construction(self):
        model = so_n_vector_model(2, 4)
        g = constraint_operators(model)[0]
        ann, cre = ladder_operators(model.modes)
        # single generator E_01 - E_10 gives a+_0 a_1 - a+_1 a_0
        manual = cre[0].matrix @ ann[1].matrix - cre[1].matrix @ ann[0].matrix
        assert np.abs(g.matrix - manual).max() < 1e-14

    def test_vacuum_annihilated(self):
        for model in (so_n_vector_model(2, 3), su2_ym_model(4, 1.0)):
            for g in constraint_operators(model):
                assert np.abs(g.apply(FockVector.vacuum(model.modes)).coeffs).max() == 0.0

    def test_so2_degree_one_spectrum(self):
        model = so_n_vector_model(2, 3)
        g = constraint_operators(model)[0]
        block = g.block(1, 1)
        eigs = sorted(np.linalg.eigvals(block), key=lambda z: z.imag)
        assert eigs[0] == pytest.approx(-1j, abs=1e-14)
        assert eigs[1] == pytest.approx(+1j, abs=1e-14)

    def test_anti_hermiticity_exact(self):
        for model in (so_n_vector_model(3, 4), su2_ym_model(3, 1.0)):
            for g in constraint_operators(model):
                assert np.abs(g.matrix + g.matrix.conj().T).max() == 0.0

    def test_algebra_on_truncated_space(self):
        for model in (so_n_vector_model(3, 4), su2_ym_model(3, 1.0)):
            gs = constraint_operators(model)
            f = model.generators.structure_constants
            for a in range(len(gs)):
                for b in range(len(gs)):
                    comm = gs[a].matrix @ gs[b].matrix - gs[b].matrix @ gs[a].matrix
                    recon = sum(f[a, b, c] * gs[c].matrix for c in range(len(gs)))
                    assert np.abs(comm - recon).max() < 1e-12

    def test_degree_preservation_exact(self):
        model = so_n_vector_model(3, 4)
        degrees = model.modes.degrees
        mask = degrees[:, None] != degrees[None, :]
        for g in constraint_operators(model):
            assert np.abs(g.matrix[mask]).max() == 0.0

    def test_ym_has_three_constraints_on_nine_modes(self):
        model = su2_ym_model(4, 0.7)
        assert model.modes.num_modes == 9
        assert len(constraint_operators(model)) == 3


class TestHamiltonian:
    def test_harmonic_normal_ordering_identity(self):
        # H = sum a+_j a_j + N/2 exactly on degrees <= cutoff - 2
        model = so_n_vector_model(2, 5)
        h = hamiltonian(model)
        modes = model.modes
        stop = modes.block_slice(modes.cutoff - 1).start
        expected = np.diag(modes.degrees[:stop] + modes.num_modes / 2.0)
        assert np.abs(h.matrix[:stop, :stop] - expected).max() < 1e-13

    def test_harmonic_ground_energy_three_modes(self):
        model = so_n_vector_model(3, 4)
        h = hamiltonian(model)
        stop = model.modes.block_slice(model.certified_band).stop
        e0 = np.linalg.eigvalsh(h.matrix[:stop, :stop]).min()
        assert e0 == pytest.approx(1.5, abs=1e-12)

    def test_hermitian_and_gauge_invariant(self):
        for model in (so_n_vector_model(2, 6, PotentialSpec.polynomial_x2(0.5, 0.1)),
                      su2_ym_model(4, 0.5)):
            h = hamiltonian(model)
            assert np.abs(h.matrix - h.matrix.conj().T).max() < 1e-12
            for g in constraint_operators(model):
                comm = h.matrix @ g.matrix - g.matrix @ h.matrix
                assert np.abs(comm).max() < 1e-10

    def test_potential_degree_above_cutoff_rejected(self):
        model = so_n_vector_model(2, 2, PotentialSpec.polynomial_x2(0.0, 0.1))
        with pytest.raises(ValueError):
            hamiltonian(model)

    def test_ym_free_limit_ground_energy_decreases_with_cutoff(self):
        # zero coupling leaves the free kinetic term; on the certified band the
        # physical ground energy must drift down as the truncation is relaxed
        energies = []
        for cutoff in (2, 3, 4):
            from gaugeproj.evolution import physical_spectrum
            from gaugeproj.projector import projector_matrix

            model = su2_ym_model(cutoff, 0.0)
            h = hamiltonian(model)
            bundle = projector_matrix(model, "nullspace")
            levels = physical_spectrum(h, bundle, max_degree=model.certified_band)
            energies.append(levels[0][0])
        assert energies[0] >= energies[1] >= energies[2]
        assert energies[2] < energies[0]


class TestYangMillsModel:
    def test_mode_count_and_layout(self):
        model = su2_ym_model(4, 1.0)
        assert model.mode_layout.shape == (3, 3)
        assert sorted(model.mode_layout.ravel()) == list(range(9))

    def test_classical_flat_directions(self, rng):
        # configurations with all spatial columns parallel are classically flat
        spec = PotentialSpec.yang_mills_quartic(0.8)
        for _ in range(20):
            u = rng.standard_normal(3)
            v = rng.standard_normal(3)
            assert spec.classical(np.outer(u, v)) == pytest.approx(0.0, abs=1e-12)

    def test_classical_potential_nonnegative(self, rng):
        spec = PotentialSpec.yang_mills_quartic(1.0)
        for _ in range(50):
            x = rng.standard_normal((3, 3))
            assert spec.classical(x) >= -1e-12

    def test_rotation_on_modes_rotates_isotopic_index(self, rng):
        model = su2_ym_model(2, 1.0)
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta), 0],
                        [np.sin(theta), np.cos(theta), 0],
                        [0, 0, 1.0]])
        big = rotation_on_modes(model, rot)
        z = rng.standard_normal(9)
        # mode vector reshaped as x_{ai} must transform as x -> R x
        x = z[model.mode_layout]
        assert np.abs((big @ z)[model.mode_layout] - rot @ x).max() < 1e-14

    def test_certified_band_accounts_for_kinetic_term(self):
        assert su2_ym_model(4, 1.0).certified_band == 0
        assert su2_ym_model(4, 0.0).certified_band == 2
        assert so_n_vector_model(2, 8).certified_band == 6


class TestPotentialSpec:
    def test_degrees(self):
        assert PotentialSpec.harmonic().degree == 2
        assert PotentialSpec.polynomial_x2(0.5, 0.1).degree == 4
        assert PotentialSpec.polynomial_x2(0.5, 0.0).degree == 2
        assert PotentialSpec.yang_mills_quartic(0.0).degree == 0

    def test_vector_model_rejects_matrix_potential(self):
        with pytest.raises(ValueError):
            so_n_vector_model(3, 4, PotentialSpec.yang_mills_quartic(1.0))
