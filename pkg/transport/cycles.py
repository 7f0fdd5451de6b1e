"""
Protocolo de múltiplos transportes entre dois qubits.

Cada ciclo: carrega B com U_ch, transporta com o SWAP imperfeito U^(ε)
e drena C com U_dr. As grandezas por iteração são medidas numericamente
(módulo ``ergotropy``); as formas fechadas servem de oráculo.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import fractional_matrix_power

from .errors import DomainError
from .ergotropy import Hamiltonian, ergotropy, ergotropy_gain
from .models import CycleConfig, CycleRecord
from .qmat import CMatrix, SIGMA_X, cmatrix, ket
from .sampling import EnergyBlock, EnergyConservingUnitary
from .states import BipartiteState, DensityMatrix

logger = logging.getLogger(__name__)

GAIN_FLOOR = -1e-12
QUBIT = Hamiltonian.diagonal([0.0, 1.0])


class RegimeValue(float):
    """Valor de forma fechada que carrega a flag ``in_regime``"""
    in_regime: bool

    def __new__(cls, value: float, in_regime: bool):
        obj = super().__new__(cls, value)
        obj.in_regime = in_regime
        return obj


@dataclass
class CycleTrace:
    """Registros por iteração e os estados após cada ciclo"""
    config: CycleConfig
    records: List[CycleRecord] = field(default_factory=list)
    states_after: List[BipartiteState] = field(default_factory=list)

    @property
    def gainful(self) -> List[CycleRecord]:
        return [r for r in self.records if r.gain >= GAIN_FLOOR]

    @property
    def total_lossless(self) -> float:
        """𝓔⁺_tot: ergotropia extraída somada só sobre iterações com ganho ≥ 0"""
        return float(sum(r.extracted for r in self.gainful))

    @property
    def total_injected(self) -> float:
        return float(sum(r.injected for r in self.gainful))

    @property
    def out_of_regime(self) -> List[int]:
        return [r.iteration for r in self.records if not r.in_regime]

    def to_rows(self) -> List[dict]:
        return [r.model_dump() for r in self.records]


def swap_with_error(eps: float) -> EnergyConservingUnitary:
    """SWAP com bloco central [[sin ε, cos ε], [cos ε, −sin ε]]; conserva diag(0,1,1,2)"""
    s, c = math.sin(eps), math.cos(eps)
    u = np.array(
        [
            [1, 0, 0, 0],
            [0, s, c, 0],
            [0, c, -s, 0],
            [0, 0, 0, 1],
        ],
        dtype=np.complex128,
    )
    blocks = (
        EnergyBlock(level=0, energy=0.0, indices=(0,)),
        EnergyBlock(level=1, energy=1.0, indices=(1, 2)),
        EnergyBlock(level=2, energy=2.0, indices=(3,)),
    )
    return EnergyConservingUnitary(u=u, blocks=blocks)


def _require_kappa(kappa: float) -> None:
    if not 0 < kappa <= math.pi / 4 + 1e-15:
        raise DomainError(f"kappa = {kappa} fora de (0, π/4]")


def _require_positive_eps(eps: float) -> None:
    if eps <= 0:
        raise DomainError(f"eps = {eps} precisa ser positivo")


def initial_correlated_state(kappa: float) -> BipartiteState:
    """|φ⁽⁰⁾⟩ = cos κ|00⟩ + sin κ|11⟩"""
    _require_kappa(kappa)
    return cycle_power_state(0, kappa, 0.0)


def cycle_power_state(iota: int, kappa: float, eps: float) -> BipartiteState:
    """Estado no início do ciclo ι+1 na janela de regime: cos(κ−ιε)|00⟩ + sin(κ−ιε)|11⟩"""
    angle = kappa - iota * eps
    psi = math.cos(angle) * ket(0, 4) + math.sin(angle) * ket(3, 4)
    return BipartiteState(2, 2, DensityMatrix.from_ket(psi))


def cycle_unitary(
    eps: float,
    charge: ArrayLike = SIGMA_X,
    drain: ArrayLike = SIGMA_X,
) -> CMatrix:
    """Ciclo completo (𝟙⊗U_dr)·U^(ε)·(U_ch⊗𝟙)"""
    eye = np.eye(2)
    return np.kron(eye, cmatrix(drain)) @ swap_with_error(eps).u @ np.kron(cmatrix(charge), eye)


def _injection_window(iota: int, kappa: float, eps: float) -> bool:
    # ε = 0 é estacionário: toda iteração está na janela
    if eps == 0:
        return True
    return iota - 1 <= kappa / eps + math.pi / (4 * eps)


def _extraction_window(iota: int, kappa: float, eps: float) -> bool:
    if eps == 0:
        return True
    return iota <= kappa / eps + math.pi / (4 * eps)


def closed_form_gain(iota: int, kappa: float, eps: float) -> float:
    """𝓔_G^(ι) = 2 sin(2κ + ε − 2ιε) sin ε"""
    if iota < 1:
        raise DomainError(f"iota = {iota} precisa ser ≥ 1")
    return 2.0 * math.sin(2 * kappa + eps - 2 * iota * eps) * math.sin(eps)


def injected_ergotropy(iota: int, kappa: float, eps: float) -> RegimeValue:
    """Ergotropia injetada em B no ciclo ι: cos(2κ − 2(ι−1)ε)"""
    if iota < 1:
        raise DomainError(f"iota = {iota} precisa ser ≥ 1")
    return RegimeValue(
        math.cos(2 * kappa - 2 * (iota - 1) * eps),
        _injection_window(iota, kappa, eps),
    )


def extracted_ergotropy(iota: int, kappa: float, eps: float) -> RegimeValue:
    """Ergotropia drenada de C no ciclo ι: cos(2κ − 2ιε)"""
    if iota < 1:
        raise DomainError(f"iota = {iota} precisa ser ≥ 1")
    return RegimeValue(
        math.cos(2 * kappa - 2 * iota * eps),
        _extraction_window(iota, kappa, eps),
    )


def gainful_iterations(kappa: float, eps: float) -> Union[int, float]:
    """⌊κ/ε + 1/2⌋; ``math.inf`` quando ε = 0 (transporte sem perdas ilimitado)"""
    if eps == 0:
        return math.inf
    _require_positive_eps(eps)
    return int(math.floor(kappa / eps + 0.5))


def total_lossless(kappa: float, eps: float) -> float:
    """𝓔⁺_tot = Σ_{ι=1}^{⌊κ/ε+1/2⌋} cos(2κ − 2ιε)"""
    _require_positive_eps(eps)
    n = gainful_iterations(kappa, eps)
    return float(sum(math.cos(2 * kappa - 2 * i * eps) for i in range(1, n + 1)))


def total_injected(kappa: float, eps: float) -> float:
    """Ergotropia injetada somada sobre as mesmas iterações lucrativas"""
    _require_positive_eps(eps)
    n = gainful_iterations(kappa, eps)
    return float(sum(math.cos(2 * kappa - 2 * (i - 1) * eps) for i in range(1, n + 1)))


def initial_gap(kappa: float) -> float:
    """δ⁽⁰⁾ = 2 sin²κ"""
    _require_kappa(kappa)
    return 2.0 * math.sin(kappa) ** 2


def lossless_ratio(kappa: float, eps: float) -> float:
    """𝓔⁺_tot / δ⁽⁰⁾"""
    return total_lossless(kappa, eps) / initial_gap(kappa)


def _local_b(u: CMatrix) -> CMatrix:
    return np.kron(u, np.eye(2))


def _local_c(u: CMatrix) -> CMatrix:
    return np.kron(np.eye(2), u)


def _drain_operator(drain: CMatrix, fraction: float) -> CMatrix:
    if not 0.0 <= fraction <= 1.0:
        raise DomainError(f"drain_fraction = {fraction} fora de [0, 1]")
    if fraction == 1.0:
        return drain
    return np.asarray(fractional_matrix_power(drain, fraction), dtype=np.complex128)


def run_cycles(
    cfg: CycleConfig,
    initial_state: Optional[BipartiteState] = None,
    charge: ArrayLike = SIGMA_X,
    drain: ArrayLike = SIGMA_X,
    drain_fraction: float = 1.0,
) -> CycleTrace:
    """
    Executa ``cfg.iterations`` ciclos sobre o estado em evolução.

    Por iteração: injetado = 𝓔(ρ_B) após a carga menos antes; ganho e gaps
    do transporte via ``ergotropy_gain``; extraído = 𝓔(ρ_C) antes da drenagem
    menos depois. Iterações fora da janela de passividade são marcadas,
    nunca interrompem a execução.

    ``drain_fraction < 1`` aplica U_dr^f (drenagem parcial, fora do regime
    das formas fechadas).
    """
    state = initial_state if initial_state is not None else initial_correlated_state(cfg.kappa)
    if (state.d_b, state.d_c) != (2, 2):
        raise DomainError(f"Protocolo de ciclos é de dois qubits, recebido {state.d_b}x{state.d_c}")

    charge_bc = _local_b(cmatrix(charge))
    drain_bc = _local_c(_drain_operator(cmatrix(drain), drain_fraction))
    transport = swap_with_error(cfg.eps_error)
    trace = CycleTrace(config=cfg)

    for iota in range(1, cfg.iterations + 1):
        charged = state.evolve(charge_bc)
        injected = ergotropy(charged.marginal_b, QUBIT) - ergotropy(state.marginal_b, QUBIT)

        outcome = ergotropy_gain(charged, QUBIT, QUBIT, transport)
        transported = charged.evolve(transport)

        state = transported.evolve(drain_bc)
        extracted = ergotropy(transported.marginal_c, QUBIT) - ergotropy(state.marginal_c, QUBIT)

        in_regime = _extraction_window(iota, cfg.kappa, cfg.eps_error)
        if not in_regime:
            logger.debug(f"⚠️ Iteração {iota} fora da janela de regime")

        trace.records.append(
            CycleRecord(
                iteration=iota,
                injected=injected,
                extracted=extracted,
                gain=outcome.gain,
                gap_before=outcome.gap_before,
                gap_after=outcome.gap_after,
                in_regime=in_regime,
            )
        )
        trace.states_after.append(state)

    logger.info(
        f"✅ {cfg.iterations} ciclos: {len(trace.gainful)} lucrativos, "
        f"𝓔⁺_tot = {trace.total_lossless:.6f}"
    )
    return trace