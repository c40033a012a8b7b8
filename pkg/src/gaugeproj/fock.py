"""Truncated multi-mode bosonic Fock space in the holomorphic representation.

States are analytic functions of the conjugate amplitudes z = (z_1, ..., z_N);
the monomial basis phi_n(z) = prod_i z_i^{n_i} / sqrt(n_i!) is orthonormal
under the Gaussian-weighted scalar product, creation acts as multiplication
by z_i and annihilation as d/dz_i.  The space is truncated at a total-degree
cutoff, so every operator is a dense complex matrix with contiguous degree
blocks.  All objects are immutable after construction and every operation is
a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ModeSet",
    "FockVector",
    "FockOperator",
    "QuadratureOrderError",
    "enumerate_basis",
    "ladder_operators",
    "position_momentum",
    "total_number_operator",
    "kernel_eval",
    "coherent_point",
    "scalar_product_quadrature",
]


class QuadratureOrderError(RuntimeError):
    """Gauss-Hermite self-consistency check failed: quadrature order too low."""


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # ascending lexicographic order within one total degree
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class ModeSet:
    """Occupation-number basis with total degree <= cutoff.

    Ordering is degree-major, then lexicographic in the occupation tuple,
    so indices of equal total degree are contiguous and the layout is
    reproducible bit-for-bit across runs.
    """

    def __init__(self, num_modes: int, cutoff: int):
        if num_modes < 1:
            raise ValueError("num_modes must be >= 1")
        if cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        occs: list[tuple[int, ...]] = []
        for degree in range(cutoff + 1):
            occs.extend(_compositions(degree, num_modes))
        self.num_modes = num_modes
        self.cutoff = cutoff
        self.occupations = np.asarray(occs, dtype=np.int64)
        self.degrees = self.occupations.sum(axis=1)
        self._index = {occ: i for i, occ in enumerate(occs)}
        # block k occupies indices [bounds[k], bounds[k+1])
        self._block_bounds = np.searchsorted(self.degrees, np.arange(cutoff + 2))
        assert self.dim == math.comb(cutoff + num_modes, num_modes)
        # parent links for the monomial recurrence
        # phi_n(z) = phi_{n - e_j}(z) * z_j / sqrt(n_j), factorial-free
        parent = np.zeros(self.dim, dtype=np.int64)
        pmode = np.zeros(self.dim, dtype=np.int64)
        pscale = np.ones(self.dim)
        for i in range(1, self.dim):
            occ = occs[i]
            j = max(k for k in range(num_modes) if occ[k] > 0)
            down = list(occ)
            down[j] -= 1
            parent[i] = self._index[tuple(down)]
            pmode[i] = j
            pscale[i] = 1.0 / math.sqrt(occ[j])
        self._parent = parent
        self._parent_mode = pmode
        self._parent_scale = pscale
        for arr in (self.occupations, self.degrees, parent, pmode, pscale):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    def index_of(self, occupation: Sequence[int]) -> int:
        return self._index[tuple(int(v) for v in occupation)]

    def block_slice(self, degree: int) -> slice:
        """Index range of the total-degree block (empty beyond the cutoff)."""
        if degree < 0 or degree > self.cutoff:
            return slice(self.dim, self.dim)
        return slice(int(self._block_bounds[degree]), int(self._block_bounds[degree + 1]))

    def block_dims(self) -> list[int]:
        return [self.block_slice(k).stop - self.block_slice(k).start for k in range(self.cutoff + 1)]

    def basis_values(self, z: np.ndarray) -> np.ndarray:
        """Evaluate all basis monomials phi_n at z, shape (dim,) or (dim, P).

        Uses the parent recurrence, so no large factorials are ever formed.
        """
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        if single:
            z = z[:, None]
        if z.shape[0] != self.num_modes:
            raise ValueError(f"point has {z.shape[0]} components, expected {self.num_modes}")
        phi = np.empty((self.dim,) + z.shape[1:], dtype=complex)
        phi[0] = 1.0
        for i in range(1, self.dim):
            phi[i] = phi[self._parent[i]] * z[self._parent_mode[i]] * self._parent_scale[i]
        return phi[:, 0] if single else phi

    def compatible_with(self, other: "ModeSet") -> bool:
        return self.num_modes == other.num_modes and self.cutoff == other.cutoff

    def __repr__(self) -> str:
        return f"ModeSet(num_modes={self.num_modes}, cutoff={self.cutoff}, dim={self.dim})"


def enumerate_basis(num_modes: int, cutoff: int) -> ModeSet:
    """Build the degree-blocked occupation basis for N modes at the given cutoff."""
    return ModeSet(num_modes, cutoff)


def coherent_point(values, num_modes: int | None = None) -> np.ndarray:
    """Validate and normalize a complex coherent-point argument."""
    z = np.asarray(values, dtype=complex)
    if z.ndim != 1:
        raise ValueError("coherent point must be a one-dimensional complex vector")
    if num_modes is not None and z.shape[0] != num_modes:
        raise ValueError(f"coherent point has {z.shape[0]} components, expected {num_modes}")
    return z


@dataclass(frozen=True)
class FockVector:
    """A state on a ModeSet, stored as its coefficient vector in the monomial basis."""

    modes: ModeSet
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.modes.dim,):
            raise ValueError(f"coefficient vector has shape {c.shape}, expected ({self.modes.dim},)")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def vacuum(cls, modes: ModeSet) -> "FockVector":
        c = np.zeros(modes.dim, dtype=complex)
        c[0] = 1.0
        return cls(modes, c)

    @classmethod
    def basis_state(cls, modes: ModeSet, occupation: Sequence[int]) -> "FockVector":
        c = np.zeros(modes.dim, dtype=complex)
        c[modes.index_of(occupation)] = 1.0
        return cls(modes, c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "FockVector") -> complex:
        if not self.modes.compatible_with(other.modes):
            raise ValueError("mode sets differ")
        return complex(np.vdot(self.coeffs, other.coeffs))

    def evaluate(self, z: np.ndarray) -> complex | np.ndarray:
        """The holomorphic wave function: sum_n c_n phi_n(z)."""
        vals = self.coeffs @ self.modes.basis_values(z)
        return complex(vals) if np.ndim(vals) == 0 else vals


class FockOperator:
    """A linear operator on the truncated space, with optional degree-shift metadata.

    ``degree_shift = d`` declares that the operator maps degree-k blocks into
    degree-(k+d) blocks; entries outside that band must be exactly zero.
    """

    __slots__ = ("modes", "matrix", "degree_shift")

    def __init__(self, modes: ModeSet, matrix, degree_shift: int | None = None,
                 check_band: bool = True):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (modes.dim, modes.dim):
            raise ValueError(f"matrix shape {matrix.shape}, expected {(modes.dim, modes.dim)}")
        if degree_shift is not None and check_band:
            off_band = (modes.degrees[:, None] - modes.degrees[None, :]) != degree_shift
            if np.any(matrix[off_band] != 0):
                raise ValueError(f"entries outside the declared degree band (shift {degree_shift})")
        self.modes = modes
        self.matrix = matrix
        self.degree_shift = degree_shift

    @classmethod
    def identity(cls, modes: ModeSet) -> "FockOperator":
        return cls(modes, np.eye(modes.dim, dtype=complex), 0, check_band=False)

    @property
    def dagger(self) -> "FockOperator":
        shift = None if self.degree_shift is None else -self.degree_shift
        return FockOperator(self.modes, self.matrix.conj().T, shift, check_band=False)

    def apply(self, vec: FockVector) -> FockVector:
        if not self.modes.compatible_with(vec.modes):
            raise ValueError("mode sets differ")
        return FockVector(vec.modes, self.matrix @ vec.coeffs)

    def block(self, row_degree: int, col_degree: int) -> np.ndarray:
        return self.matrix[self.modes.block_slice(row_degree), self.modes.block_slice(col_degree)]

    def max_abs(self) -> float:
        return float(np.abs(self.matrix).max())

    def _shift_sum(self, other: "FockOperator") -> int | None:
        if self.degree_shift is not None and self.degree_shift == other.degree_shift:
            return self.degree_shift
        return None

    def __matmul__(self, other):
        if isinstance(other, FockVector):
            return self.apply(other)
        if not isinstance(other, FockOperator):
            return NotImplemented
        if not self.modes.compatible_with(other.modes):
            raise ValueError("mode sets differ")
        shift = None
        if self.degree_shift is not None and other.degree_shift is not None:
            shift = self.degree_shift + other.degree_shift
        return FockOperator(self.modes, self.matrix @ other.matrix, shift, check_band=False)

    def __add__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        if not self.modes.compatible_with(other.modes):
            raise ValueError("mode sets differ")
        return FockOperator(self.modes, self.matrix + other.matrix, self._shift_sum(other),
                            check_band=False)

    def __sub__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        return self.__add__(-1.0 * other)

    def __mul__(self, scalar):
        return FockOperator(self.modes, self.matrix * scalar, self.degree_shift, check_band=False)

    __rmul__ = __mul__

    def __neg__(self):
        return self.__mul__(-1.0)

    def __repr__(self) -> str:
        return f"FockOperator(dim={self.modes.dim}, degree_shift={self.degree_shift})"


def ladder_operators(modes: ModeSet) -> tuple[list[FockOperator], list[FockOperator]]:
    """Annihilation and creation operators for every mode.

    a_j lowers occupation j with amplitude sqrt(n_j) (degree shift -1);
    a_j^+ raises with amplitude sqrt(n_j + 1).  Raising amplitudes that would
    exceed the cutoff are dropped by the truncation.
    """
    dim, nm = modes.dim, modes.num_modes
    ann_mats = [np.zeros((dim, dim), dtype=complex) for _ in range(nm)]
    for i in range(dim):
        occ = modes.occupations[i]
        for j in range(nm):
            nj = occ[j]
            if nj:
                down = occ.copy()
                down[j] -= 1
                ann_mats[j][modes.index_of(down), i] = math.sqrt(nj)
    annihilators = [FockOperator(modes, m, -1, check_band=False) for m in ann_mats]
    creators = [op.dagger for op in annihilators]
    return annihilators, creators


def position_momentum(modes: ModeSet) -> tuple[list[FockOperator], list[FockOperator]]:
    """Hermitian position and momentum operators x_j = (a_j + a_j^+)/sqrt(2),
    p_j = (a_j - a_j^+)/(i sqrt(2)) on the truncated space."""
    ann, cre = ladder_operators(modes)
    xs = [(1.0 / math.sqrt(2)) * (a + c) for a, c in zip(ann, cre)]
    ps = [(-1j / math.sqrt(2)) * (a - c) for a, c in zip(ann, cre)]
    return xs, ps


def total_number_operator(modes: ModeSet) -> FockOperator:
    """sum_j a_j^+ a_j; diagonal with the total degree on each block."""
    return FockOperator(modes, np.diag(modes.degrees.astype(complex)), 0, check_band=False)


def kernel_eval(op: FockOperator, astar, a) -> complex:
    """Holomorphic kernel of an operator at a pair of coherent points.

    Returns sum_{m,n} phi_m(astar) op[m,n] phi_n(a).  Both arguments enter
    holomorphically: the left point carries the values of the conjugate
    amplitudes, the right point the values of the amplitudes.  For the
    identity this is the degree-truncated exponential series of astar.a.
    """
    zl = coherent_point(astar, op.modes.num_modes)
    zr = coherent_point(a, op.modes.num_modes)
    phl = op.modes.basis_values(zl)
    phr = op.modes.basis_values(zr)
    return complex(phl @ (op.matrix @ phr))


def _hermite_grid(num_modes: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Hermite grid for the holomorphic Gaussian measure.

    Returns (z, w): z has shape (N, P) with z_j = u_j + i v_j, and w the
    product weights including the 1/pi per-mode normalization, so that
    sum w f(z, conj z) approximates the integral of f against
    prod_j (1/pi) exp(-|z_j|^2) du_j dv_j.
    """
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    axes = np.meshgrid(*([nodes] * (2 * num_modes)), indexing="ij")
    waxes = np.meshgrid(*([weights] * (2 * num_modes)), indexing="ij")
    flat = [ax.ravel() for ax in axes]
    w = np.ones_like(flat[0])
    for wa in waxes:
        w = w * wa.ravel()
    w = w / np.pi**num_modes
    z = np.stack([flat[2 * j] + 1j * flat[2 * j + 1] for j in range(num_modes)])
    return z, w


def scalar_product_quadrature(psi1: FockVector, psi2: FockVector,
                              order: int | None = None) -> complex:
    """Scalar product evaluated by direct Gaussian integration (test oracle).

    Integrates conj(psi1(z)) psi2(z) against the Gaussian measure with a
    tensor Gauss-Hermite rule over the real and imaginary parts of each mode.
    Supported only for N <= 3; must agree with the coefficient contraction
    sum conj(c1) c2 once the rule is exact for all retained monomials.

    Raises QuadratureOrderError when the built-in self-consistency check
    (unit norm of the highest single-mode monomial) fails.
    """
    if not psi1.modes.compatible_with(psi2.modes):
        raise ValueError("mode sets differ")
    modes = psi1.modes
    if modes.num_modes > 3:
        raise ValueError("quadrature oracle supports at most 3 modes")
    if order is None:
        order = modes.cutoff + 2
    z, w = _hermite_grid(modes.num_modes, order)
    phi = modes.basis_values(z)  # (dim, P)
    vals1 = psi1.coeffs @ phi
    vals2 = psi2.coeffs @ phi
    result = complex(np.sum(w * np.conj(vals1) * vals2))
    # stiffest retained monomial: all quanta in the last mode
    top = [0] * modes.num_modes
    top[-1] = modes.cutoff
    top_row = phi[modes.index_of(top)]
    check = float(np.real(np.sum(w * np.conj(top_row) * top_row)))
    if abs(check - 1.0) > 1e-8:
        raise QuadratureOrderError(
            f"order {order} fails the unit-norm self test ({check!r}); increase the order")
    return result
