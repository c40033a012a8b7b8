"""Request and response models for the service and the CLI client.

A RunConfig fully determines a job (defaults are materialized during
validation, so the echo embedded in every report is self-describing), and a
RunReport carries the results with every number tagged by the tolerance that
certified it, plus a deterministic fingerprint.
"""

from __future__ import annotations

import hashlib
import json
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..models import GaugeModel, PotentialSpec, so_n_vector_model, su2_ym_model
from ..projector import HaarQuadrature

SCHEMA_VERSION = "1.0"


class PotentialConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["harmonic", "polynomial_x2", "yang_mills_quartic"] = "harmonic"
    coefficients: list[float] = Field(default_factory=list,
                                      description="c_k for (x^2)^k, polynomial kind only")

    def to_spec(self, coupling_g: float | None) -> PotentialSpec:
        if self.kind == "harmonic":
            return PotentialSpec.harmonic()
        if self.kind == "polynomial_x2":
            return PotentialSpec.polynomial_x2(*self.coefficients)
        return PotentialSpec.yang_mills_quartic(1.0 if coupling_g is None else coupling_g)

    @model_validator(mode="after")
    def _coefficients_match_kind(self):
        if self.kind == "polynomial_x2" and not self.coefficients:
            raise ValueError("polynomial_x2 potential needs at least one coefficient")
        if self.kind != "polynomial_x2" and self.coefficients:
            raise ValueError("coefficients are only meaningful for polynomial_x2")
        return self


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["so_n_vector", "su2_ym"]
    n: int | None = Field(default=None, description="vector-model dimension, >= 2")
    coupling_g: float | None = Field(default=None, description="Yang-Mills coupling")
    potential: PotentialConfig | None = None

    @model_validator(mode="after")
    def _materialize(self):
        if self.type == "so_n_vector":
            if self.n is None or self.n < 2:
                raise ValueError("so_n_vector requires n >= 2")
            if self.coupling_g is not None:
                raise ValueError("coupling_g applies to su2_ym only")
            if self.potential is None:
                self.potential = PotentialConfig(kind="harmonic")
            if self.potential.kind == "yang_mills_quartic":
                raise ValueError("yang_mills_quartic potential applies to su2_ym only")
        else:
            if self.n is not None:
                raise ValueError("n applies to so_n_vector only")
            if self.coupling_g is None:
                self.coupling_g = 1.0
            if self.potential is None:
                self.potential = PotentialConfig(kind="yang_mills_quartic")
        return self


class QuadratureConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rule: Literal["auto", "trapezoid", "euler_product", "qr_gaussian_montecarlo"] = "auto"
    order: int | None = Field(default=None, description="None selects the exactness-matched order")
    samples: int | None = Field(default=None, description="Monte Carlo sample count")
    seed: int | None = None


class EvolutionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    time: float = 1.0
    slice_ladder: list[int] = Field(default_factory=lambda: [16, 32, 64, 128])

    @model_validator(mode="after")
    def _ladder_valid(self):
        if len(self.slice_ladder) < 2:
            raise ValueError("slice ladder needs at least two entries for an order fit")
        if any(m < 1 for m in self.slice_ladder):
            raise ValueError("slice counts must be positive")
        if sorted(self.slice_ladder) != self.slice_ladder:
            raise ValueError("slice ladder must be increasing")
        return self


class ToleranceConfig(BaseModel):
    """Certification thresholds; every reported check carries the one it used."""

    model_config = ConfigDict(extra="forbid")

    projector_idempotency: float = 1e-10
    projector_hermiticity: float = 1e-10
    constraint_annihilation: float = 1e-10
    constraint_algebra: float = 1e-12
    method_agreement_quadrature: float = 1e-8
    method_agreement_basis: float = 1e-10
    kernel_series_match: float = 1e-8
    kernel_invariance: float = 1e-10
    hamiltonian_gauge_commutator: float = 1e-10
    spectrum_exactness: float = 1e-9
    degeneracy_merge: float = 1e-8
    evolution_projection: float = 1e-10
    spectral_reconstruction: float = 1e-9
    effective_hamiltonian_origin: float = 1e-10
    svd_rank_relative: float = 1e-8
    global_order_low: float = 0.8
    global_order_high: float = 1.2
    local_order_low: float = 1.8
    local_order_high: float = 2.2

    @model_validator(mode="after")
    def _positive(self):
        for name, value in self.model_dump().items():
            if value <= 0:
                raise ValueError(f"tolerance {name} must be positive")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelConfig
    cutoff: int = Field(ge=0)
    projector_method: Literal["nullspace", "group_average", "closed_form_basis"] = "nullspace"
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    spectrum_sweep: list[int] = Field(default_factory=list,
                                      description="extra cutoffs for the spectrum sweep")
    output_path: str | None = None
    output_format: Literal["json", "csv"] = "json"
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)

    @model_validator(mode="after")
    def _materialize(self):
        potential = self.model.potential.to_spec(self.model.coupling_g)
        if self.cutoff < potential.degree:
            raise ValueError(
                f"cutoff {self.cutoff} is below the potential degree {potential.degree}")
        group = self._group()
        if self.quadrature.rule == "auto":
            self.quadrature.rule = {
                "SO2": "trapezoid", "SO3": "euler_product",
            }.get(group, "qr_gaussian_montecarlo")
        if self.quadrature.rule == "trapezoid" and group != "SO2":
            raise ValueError("trapezoid rule applies to SO2 models only")
        if self.quadrature.rule == "euler_product" and group != "SO3":
            raise ValueError("euler_product rule applies to SO3 models only")
        if self.quadrature.rule == "qr_gaussian_montecarlo":
            if self.quadrature.seed is None:
                raise ValueError("Monte Carlo quadrature requires a seed")
            if self.quadrature.samples is None:
                self.quadrature.samples = 2000
        else:
            if self.quadrature.order is None:
                self.quadrature.order = self.cutoff
        if self.projector_method == "closed_form_basis" and self.model.type != "so_n_vector":
            raise ValueError("closed_form_basis applies to the vector model only")
        if any(c < potential.degree for c in self.spectrum_sweep):
            raise ValueError(
                f"sweep cutoffs must be at least the potential degree {potential.degree}")
        return self

    def _group(self) -> str:
        if self.model.type == "su2_ym":
            return "SO3"
        return {2: "SO2", 3: "SO3"}.get(self.model.n, "SON")

    # --- factories used by the job runners ---

    def build_model(self, cutoff: int | None = None) -> GaugeModel:
        cutoff = self.cutoff if cutoff is None else cutoff
        if self.model.type == "so_n_vector":
            return so_n_vector_model(self.model.n, cutoff,
                                     self.model.potential.to_spec(None))
        return su2_ym_model(cutoff, self.model.coupling_g)

    def build_quadrature(self) -> HaarQuadrature:
        q = self.quadrature
        if q.rule == "trapezoid":
            return HaarQuadrature("SO2", "trapezoid", q.order)
        if q.rule == "euler_product":
            return HaarQuadrature("SO3", "euler_product", q.order)
        return HaarQuadrature.monte_carlo(self.model.n or 3, q.samples, q.seed)

    def sample_seed(self) -> int:
        """Seed for the deterministic random check points embedded in reports."""
        return self.quadrature.seed if self.quadrature.seed is not None else 20570


class CheckRecord(BaseModel):
    name: str
    value: float
    tolerance: float
    passed: bool
    info: str = ""


class ComplexPair(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, z: complex) -> "ComplexPair":
        return cls(re=float(z.real), im=float(z.imag))


class BasisResult(BaseModel):
    kind: Literal["basis"] = "basis"
    dimension: int
    block_dims: list[int]
    physical_block_dims: list[int]
    physical_dimension: int


class KernelSample(BaseModel):
    astar: list[ComplexPair]
    a: list[ComplexPair]
    value: ComplexPair


class YmAuditRow(BaseModel):
    exact: ComplexPair
    verbatim: ComplexPair
    prescription: ComplexPair
    abs_dev_verbatim: float
    abs_dev_prescription: float


class YmDegreeRow(BaseModel):
    degree: int
    max_abs_dev_prescription: float
    max_abs_exact: float


class YmAudit(BaseModel):
    origin_exact: ComplexPair
    origin_verbatim: float
    prescription_over_verbatim: float
    max_abs_dev_verbatim: float
    max_abs_dev_prescription: float
    rows: list[YmAuditRow]
    degree_table: list[YmDegreeRow]


class ProjectorResult(BaseModel):
    kind: Literal["projector"] = "projector"
    method: str
    physical_block_dims: list[int]
    agreement: dict[str, float]
    kernel_samples: list[KernelSample]
    quadrature: dict | None = None
    ym_audit: YmAudit | None = None


class SpectrumLevel(BaseModel):
    energy: float
    multiplicity: int


class SweepRow(BaseModel):
    cutoff: int
    certified_band: int
    certified: bool
    ground_energy: float
    levels: list[SpectrumLevel]


class SpectrumResult(BaseModel):
    kind: Literal["spectrum"] = "spectrum"
    certified_band: int
    physical_levels: list[SpectrumLevel]
    full_levels: list[SpectrumLevel]
    physical_block_dims: list[int]
    sweep: list[SweepRow]


class LadderRow(BaseModel):
    num_slices: int
    eps: float
    global_defect: float
    local_defect: float


class EvolveResult(BaseModel):
    kind: Literal["evolve"] = "evolve"
    time: float
    ladder: list[LadderRow]
    global_order: float
    local_order: float
    short_time_constant: float


class VerifyResult(BaseModel):
    kind: Literal["verify"] = "verify"
    total_checks: int
    failed_checks: int


ResultUnion = Union[BasisResult, ProjectorResult, SpectrumResult, EvolveResult, VerifyResult]


class RunReport(BaseModel):
    schema_version: str
    artifact_version: str
    command: str
    status: Literal["pass", "fail"]
    config: RunConfig
    results: ResultUnion = Field(discriminator="kind")
    checks: list[CheckRecord]
    fingerprint: str = ""

    def finalize(self) -> "RunReport":
        """Compute the deterministic fingerprint over everything else."""
        payload = self.model_dump(mode="json")
        payload.pop("fingerprint", None)
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        self.fingerprint = hashlib.sha256(canonical.encode()).hexdigest()
        return self
