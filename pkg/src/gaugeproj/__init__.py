"""Gauge-fixing-free quantization of finite-dimensional gauge models.

Builds truncated Fock-space representations of rotation-gauge models,
constructs the projector onto the gauge-invariant subspace by three
independent methods (constraint null space, Haar-measure group averaging,
closed-form invariant kernels), and computes the gauge-invariant evolution
operator both spectrally and by time-sliced projected kernel composition.
"""

__version__ = "0.1.0"

from .fock import (
    FockOperator,
    FockVector,
    ModeSet,
    enumerate_basis,
    kernel_eval,
    ladder_operators,
    position_momentum,
    scalar_product_quadrature,
)
from .models import (
    GaugeModel,
    GeneratorSet,
    PotentialSpec,
    constraint_operators,
    hamiltonian,
    so_n_generators,
    so_n_vector_model,
    su2_ym_model,
)
from .projector import (
    HaarQuadrature,
    PhysicalBasis,
    ProjectorBundle,
    apply_projector,
    kernel_closed_form_son,
    kernel_group_average,
    kernel_su2_ym_closed_form,
    physical_basis_son,
    projector_matrix,
)
from .evolution import (
    EvolutionResult,
    SliceSchedule,
    evolve_full,
    evolve_physical,
    h_ef_eval,
    physical_spectrum,
    short_time_kernel,
    sliced_evolution,
)

__all__ = [
    "__version__",
    "ModeSet",
    "FockVector",
    "FockOperator",
    "enumerate_basis",
    "ladder_operators",
    "position_momentum",
    "kernel_eval",
    "scalar_product_quadrature",
    "GeneratorSet",
    "PotentialSpec",
    "GaugeModel",
    "so_n_generators",
    "so_n_vector_model",
    "su2_ym_model",
    "constraint_operators",
    "hamiltonian",
    "PhysicalBasis",
    "HaarQuadrature",
    "ProjectorBundle",
    "physical_basis_son",
    "kernel_closed_form_son",
    "kernel_su2_ym_closed_form",
    "kernel_group_average",
    "projector_matrix",
    "apply_projector",
    "EvolutionResult",
    "SliceSchedule",
    "evolve_full",
    "evolve_physical",
    "physical_spectrum",
    "h_ef_eval",
    "short_time_kernel",
    "sliced_evolution",
]
