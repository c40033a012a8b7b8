"""Concrete gauge models on the truncated Fock space.

Two families: the rotation-gauge vector model (an N-component coordinate with
SO(N) gauge symmetry and a rotation-invariant potential) and SU(2) Yang-Mills
quantum mechanics (a 3x3 coordinate matrix whose isotopic index carries the
gauge action).  Both produce their constraint generators and gauge-invariant
Hamiltonian as dense FockOperators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .fock import FockOperator, ModeSet, enumerate_basis, position_momentum

__all__ = [
    "GeneratorSet",
    "PotentialSpec",
    "GaugeModel",
    "so_n_generators",
    "so_n_vector_model",
    "su2_ym_model",
    "constraint_operators",
    "hamiltonian",
    "rotation_on_modes",
]


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in itertools.permutations(range(3)):
        eps[i, j, k] = (i - j) * (j - k) * (k - i) / 2.0
    return eps


_EPS3 = _levi_civita()


@dataclass(frozen=True)
class GeneratorSet:
    """Real antisymmetric generators of a rotation group with their structure constants."""

    dim_rep: int
    generators: np.ndarray          # (num, d, d)
    structure_constants: np.ndarray  # (num, num, num), [T_a, T_b] = f_abc T_c

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]


def _structure_constants(gens: np.ndarray) -> np.ndarray:
    """Expand commutators in the generator basis (assumed Frobenius-orthogonal)."""
    num = gens.shape[0]
    norms = np.einsum("aij,aij->a", gens, gens)
    f = np.zeros((num, num, num))
    for a in range(num):
        for b in range(num):
            comm = gens[a] @ gens[b] - gens[b] @ gens[a]
            f[a, b] = np.einsum("ij,cij->c", comm, gens) / norms
            residual = comm - np.einsum("c,cij->ij", f[a, b], gens)
            if np.abs(residual).max() > 1e-12:
                raise ValueError("generator commutators do not close in the given basis")
    return f


def so_n_generators(n: int) -> GeneratorSet:
    """Antisymmetric generators of the rotation group in N dimensions.

    For n == 3 the standard basis (T_a)_{jk} = -eps_{ajk} is used, so the
    structure constants are the Levi-Civita symbol; for other n the elementary
    generators E_ij - E_ji (i < j, lexicographic) are returned.
    """
    if n < 2:
        raise ValueError("rotation group needs n >= 2")
    if n == 3:
        gens = np.array([-_EPS3[a] for a in range(3)])
    else:
        mats = []
        for i in range(n):
            for j in range(i + 1, n):
                t = np.zeros((n, n))
                t[i, j] = 1.0
                t[j, i] = -1.0
                mats.append(t)
        gens = np.array(mats)
    return GeneratorSet(n, gens, _structure_constants(gens))


@dataclass(frozen=True)
class PotentialSpec:
    """Rotation-invariant potential, as a symbolic kind plus coefficients.

    kinds:
      harmonic            -- x^2 / 2
      polynomial_x2       -- sum_k c_k (x^2)^k with couplings (c_1, c_2, ...)
      yang_mills_quartic  -- (g^2/4) [ (Tr x^T x)^2 - Tr (x^T x)^2 ], coupling (g,)
    """

    kind: str
    couplings: tuple[float, ...]

    @classmethod
    def harmonic(cls) -> "PotentialSpec":
        return cls("harmonic", (0.5,))

    @classmethod
    def polynomial_x2(cls, *coefficients: float) -> "PotentialSpec":
        if not coefficients:
            raise ValueError("polynomial potential needs at least one coefficient")
        return cls("polynomial_x2", tuple(float(c) for c in coefficients))

    @classmethod
    def yang_mills_quartic(cls, g: float) -> "PotentialSpec":
        return cls("yang_mills_quartic", (float(g),))

    @property
    def degree(self) -> int:
        """Polynomial degree in the position variables (0 for an identically zero potential)."""
        if all(c == 0 for c in self.couplings):
            return 0
        if self.kind == "harmonic":
            return 2
        if self.kind == "polynomial_x2":
            return 2 * max(k + 1 for k, c in enumerate(self.couplings) if c != 0)
        if self.kind == "yang_mills_quartic":
            return 4
        raise ValueError(f"unknown potential kind {self.kind!r}")

    def classical(self, x: np.ndarray) -> float:
        """Evaluate the potential on a classical configuration (vector or 3x3 matrix)."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("harmonic", "polynomial_x2"):
            x2 = float(np.dot(x.ravel(), x.ravel()))
            return float(sum(c * x2 ** (k + 1) for k, c in enumerate(self.couplings)))
        g = self.couplings[0]
        s = x.T @ x
        return float(g**2 / 4.0 * (np.trace(s) ** 2 - np.trace(s @ s)))


@dataclass(frozen=True)
class GaugeModel:
    """A gauge model: mode layout, group generators, and potential.

    ``mode_layout[r, i]`` is the Fock mode carrying representation index r and
    multiplicity (flavour/spatial) index i; the gauge group rotates the first
    index only.
    """

    kind: str                 # "so_n_vector" | "su2_ym"
    group: str                # "SO2" | "SO3" | "SON"
    modes: ModeSet
    generators: GeneratorSet
    mode_layout: np.ndarray   # (dim_rep, multiplicity) -> mode index
    potential: PotentialSpec

    @property
    def multiplicity(self) -> int:
        return self.mode_layout.shape[1]

    @property
    def num_modes(self) -> int:
        return self.modes.num_modes

    @property
    def certified_band(self) -> int:
        """Largest total degree on which truncated operator products are exact.

        The kinetic term is quadratic in ladder operators, so the band is the
        cutoff minus at least 2 even for a vanishing potential; negative when
        the cutoff is too small for any certified block.
        """
        return self.modes.cutoff - max(2, self.potential.degree)


def _group_tag(n: int) -> str:
    return {2: "SO2", 3: "SO3"}.get(n, "SON")


def so_n_vector_model(n: int, cutoff: int, potential: PotentialSpec | None = None) -> GaugeModel:
    """Vector model: one N-component coordinate gauged by SO(N)."""
    if potential is None:
        potential = PotentialSpec.harmonic()
    if potential.kind == "yang_mills_quartic":
        raise ValueError("the quartic matrix potential applies to the Yang-Mills model only")
    modes = enumerate_basis(n, cutoff)
    layout = np.arange(n, dtype=np.int64).reshape(n, 1)
    return GaugeModel("so_n_vector", _group_tag(n), modes, so_n_generators(n), layout, potential)


def su2_ym_model(cutoff: int, g: float = 1.0, potential: PotentialSpec | None = None) -> GaugeModel:
    """SU(2) Yang-Mills quantum mechanics: 9 modes x_{ai}, isotopic SO(3) gauge action.

    Modes are laid out isotopic-major: mode(a, i) = 3a + i.  A cutoff >= 4 is
    needed for the quartic potential to act on a certified block.
    """
    if potential is None:
        potential = PotentialSpec.yang_mills_quartic(g)
    modes = enumerate_basis(9, cutoff)
    layout = np.arange(9, dtype=np.int64).reshape(3, 3)
    return GaugeModel("su2_ym", "SO3", modes, so_n_generators(3), layout, potential)


def rotation_on_modes(model: GaugeModel, rotation: np.ndarray) -> np.ndarray:
    """Expand a defining-representation rotation to the full mode space.

    The result acts blockwise on the representation index of every
    multiplicity column: modes (r, i) -> sum_s R[r, s] (s, i).
    """
    nm = model.num_modes
    big = np.zeros((nm, nm))
    layout = model.mode_layout
    for i in range(model.multiplicity):
        big[np.ix_(layout[:, i], layout[:, i])] = rotation
    return big


def constraint_operators(model: GaugeModel) -> list[FockOperator]:
    """Quantum constraint generators G_a = sum T^a_{rs} a^+_{ri} a_{si}.

    Each is anti-Hermitian, degree-preserving, and the set represents the
    gauge algebra exactly on the truncated space.
    """
    modes = model.modes
    dim = modes.dim
    layout = model.mode_layout
    ops = []
    for t in model.generators.generators:
        nz = np.argwhere(t != 0)
        mat = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            occ = modes.occupations[col]
            for r, s in nz:
                coeff = t[r, s]
                for i in range(model.multiplicity):
                    jm = layout[r, i]
                    km = layout[s, i]
                    nk = occ[km]
                    if nk == 0:
                        continue
                    target = occ.copy()
                    target[km] -= 1
                    target[jm] += 1
                    amp = math.sqrt(nk * target[jm])
                    mat[modes.index_of(target), col] += coeff * amp
        ops.append(FockOperator(modes, mat, 0, check_band=False))
    return ops


def _matrix_power_acc(base: np.ndarray, max_power: int) -> list[np.ndarray]:
    powers = [base]
    for _ in range(max_power - 1):
        powers.append(powers[-1] @ base)
    return powers


def _potential_matrix(model: GaugeModel, xs: list[FockOperator]) -> np.ndarray:
    spec = model.potential
    dim = model.modes.dim
    if spec.degree == 0:
        return np.zeros((dim, dim), dtype=complex)
    if spec.kind in ("harmonic", "polynomial_x2"):
        x2 = np.zeros((dim, dim), dtype=complex)
        for x in xs:
            x2 += x.matrix @ x.matrix
        acc = np.zeros((dim, dim), dtype=complex)
        for c, power in zip(spec.couplings, _matrix_power_acc(x2, len(spec.couplings))):
            if c:
                acc += c * power
        return acc
    # Yang-Mills quartic, built from the invariant spatial matrix s_ij = sum_a x_ai x_aj
    g = spec.couplings[0]
    layout = model.mode_layout
    s = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            acc = np.zeros((dim, dim), dtype=complex)
            for a in range(3):
                acc += xs[layout[a, i]].matrix @ xs[layout[a, j]].matrix
            s[i][j] = acc
    tr = s[0][0] + s[1][1] + s[2][2]
    quart = tr @ tr
    for i in range(3):
        for j in range(3):
            quart = quart - s[i][j] @ s[j][i]
    return (g**2 / 4.0) * quart


def hamiltonian(model: GaugeModel) -> FockOperator:
    """H = sum_j p_j^2 / 2 + V, with the potential composed from truncated
    position operators.

    Gauge invariance of the resulting matrix is exact on the whole truncated
    space; spectral values are certified only on degree blocks <= cutoff minus
    the potential degree.
    """
    if model.potential.degree > model.modes.cutoff:
        raise ValueError(
            f"potential degree {model.potential.degree} exceeds cutoff {model.modes.cutoff}; "
            "no truncation-safe block exists")
    xs, ps = position_momentum(model.modes)
    dim = model.modes.dim
    h = np.zeros((dim, dim), dtype=complex)
    for p in ps:
        h += 0.5 * (p.matrix @ p.matrix)
    h += _potential_matrix(model, xs)
    return FockOperator(model.modes, h, None, check_band=False)
