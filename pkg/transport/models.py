"""
Modelos de dados serializáveis (configurações, registros e relatórios)
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

StateClass = Literal["general", "product", "separable_pfhs", "separable_hdu", "fixed"]
ExperimentName = Literal[
    "prod-hist",
    "sep-vs-gen",
    "propeller",
    "avg-shift",
    "sampler-compare",
    "concentration",
    "dispersion",
    "cycles",
    "qmp-fuzz",
]
OutputFormat = Literal["csv", "json"]

IDENTITY_TOL = 1e-9


class EnsembleConfig(BaseModel):
    """Configuração de um ensemble de Monte Carlo (estado, Hamiltoniano, unitária)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    d_b: int = Field(ge=2)
    d_c: int = Field(ge=2)
    n_samples: int = Field(ge=1)
    state_class: StateClass = "general"
    grain: float = Field(default=0.2, gt=0)
    master_seed: int = Field(default=20240101, ge=0, lt=2 ** 64)
    bins: int = Field(default=100, ge=1)
    pfhs_max_attempts: int = Field(default=100_000, ge=1)
    gap_max_attempts: int = Field(default=10_000, ge=1)
    unitary_phases: bool = False

    @model_validator(mode="after")
    def check_pfhs_dimension(self):
        """PFHS só é exato para d_B·d_C ≤ 6"""
        if self.state_class == "separable_pfhs" and self.d_b * self.d_c > 6:
            raise ValueError(f"separable_pfhs exige d_b·d_c ≤ 6, recebido {self.d_b}x{self.d_c}")
        return self

    @property
    def d_bc(self) -> int:
        return self.d_b * self.d_c


class CycleConfig(BaseModel):
    """Protocolo de ciclos: recurso κ, erro ε do SWAP e número de iterações"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kappa: float = math.pi / 8
    eps_error: float = Field(default=0.03, ge=0)
    iterations: int = Field(default=20, ge=1)

    @field_validator("kappa")
    @classmethod
    def validate_kappa(cls, v):
        if not 0 < v <= math.pi / 4 + 1e-15:
            raise ValueError("kappa precisa estar em (0, π/4]")
        return v


class TransportSample(BaseModel):
    """Um registro de Monte Carlo: ganho, ΔI e gaps antes/depois"""
    gain_over_e: float
    delta_mi: float
    d_b: int
    d_c: int
    sample_index: int
    gap_before: float
    gap_after: float

    @model_validator(mode="after")
    def check_gap_identity(self):
        """ganho = δ − δ̃"""
        residual = abs(self.gain_over_e - (self.gap_before - self.gap_after))
        if residual > IDENTITY_TOL:
            raise ValueError(f"Identidade ganho = δ − δ̃ violada por {residual:.3e}")
        return self


class CycleRecord(BaseModel):
    """Uma iteração do protocolo carregar–transportar–drenar"""
    iteration: int = Field(ge=1)
    injected: float
    extracted: float
    gain: float
    gap_before: float
    gap_after: float
    in_regime: bool


class RectangleFit(BaseModel):
    """Retângulo de área mínima em torno de um casco convexo"""
    width: float = Field(gt=0)
    length: float = Field(gt=0)
    angle: float
    ratio: float = Field(gt=0, le=1)

    @model_validator(mode="after")
    def check_sides(self):
        if self.width > self.length * (1 + 1e-12):
            raise ValueError("width precisa ser ≤ length")
        return self

    @property
    def area(self) -> float:
        return self.width * self.length


class DispersionStats(BaseModel):
    """Dispersão da relação entre ganho e ΔI reescalonados"""
    conditional_entropy: float = Field(ge=-1e-12)
    rect: Optional[RectangleFit] = None
    sd_gain: float
    sd_mi: float
    tail_curve: List[Tuple[float, float]] = []


class ExperimentSpec(BaseModel):
    """Experimento pedido na linha de comando"""
    model_config = ConfigDict(extra="forbid")

    name: ExperimentName
    config: Union[CycleConfig, EnsembleConfig]
    output_path: Path
    format: OutputFormat = "csv"
    threads: int = Field(default=1, ge=1)
    sweep: Optional[List[Tuple[int, int]]] = None
    ells: Optional[List[float]] = None
    overlay_points: int = Field(default=500, ge=2)
    show_progress: bool = True

    @model_validator(mode="after")
    def check_config_variant(self):
        """O nome do experimento determina o tipo de configuração"""
        wants_cycles = self.name == "cycles"
        if wants_cycles != isinstance(self.config, CycleConfig):
            expected = "CycleConfig" if wants_cycles else "EnsembleConfig"
            raise ValueError(f"Experimento {self.name} exige {expected}")
        return self


class RunMetadata(BaseModel):
    """Sidecar de metadados: tudo que é preciso para reproduzir a execução"""
    experiment: str
    config: Dict[str, Any]
    master_seed: Optional[int] = None
    build_id: str
    started_at: str
    wall_time_s: float
    n_records: int
    files: Dict[str, str] = {}
    extra: Dict[str, Any] = {}


class SummaryReport(BaseModel):
    """Resumo impresso por ``summarize``"""
    source: str
    n_records: int
    column: str
    mean: float
    sd: float
    min: float
    max: float
    positive_fraction: Optional[float] = None
    bound_violations: Optional[Dict[str, int]] = None
