"""
Resultados analíticos fechados:
  - cotas "hélice" de dois qubits (γ₁…γ₆, γ_u, γ_d) e cotas lineares;
  - larguras e caudas de concentração de Levy;
  - desigualdades do problema marginal quântico (QMP).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq

from .errors import DomainError, ShapeError, TraceError
from .ergotropy import gap_spectral

LN2 = math.log(2.0)
LN4 = math.log(4.0)

# Constantes numéricas publicadas das cotas de concentração
LEVY_MI_CONSTANT = 65.951
LEVY_GAIN_CONSTANT = 50.133
LIPSCHITZ_ENTROPY_CONSTANT = 2.322
LEVY_ALPHA = 1.0 / (25.0 * math.pi)
LEVY_PREFACTOR = 3.0

QMP_TOL = 1e-9
BOUNDARY_TOL = 1e-12


def binary_entropy(x: float) -> float:
    """h(x) = −x ln x − (1−x) ln(1−x), em nats"""
    if not -BOUNDARY_TOL <= x <= 1.0 + BOUNDARY_TOL:
        raise DomainError(f"x = {x} fora de [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


def inv_binary_entropy_upper(y: float) -> float:
    """Ramo decrescente da inversa de h: o único x ∈ [1/2, 1] com h(x) = y"""
    if not -BOUNDARY_TOL <= y <= LN2 + BOUNDARY_TOL:
        raise DomainError(f"y = {y} fora de [0, ln 2]")
    if y <= 0.0:
        return 1.0
    if y >= LN2:
        return 0.5
    return brentq(lambda x: binary_entropy(x) - y, 0.5, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=100)


# (domínio, função) de cada γ_i
_GAMMA_BRANCHES = {
    1: ((-LN4, 0.0), lambda x: 2 * inv_binary_entropy_upper((LN4 + x) / 2) - 1),
    2: ((-LN2, LN2), lambda x: 2 * inv_binary_entropy_upper((LN2 + x) / 2) - 1.5),
    3: ((0.0, LN4), lambda x: 2 * inv_binary_entropy_upper(x / 2) - 2),
    4: ((-LN4, 0.0), lambda x: 2 - 2 * inv_binary_entropy_upper(-x / 2)),
    5: ((-LN2, LN2), lambda x: 1.5 - 2 * inv_binary_entropy_upper((LN2 - x) / 2)),
    6: ((0.0, LN4), lambda x: 1 - 2 * inv_binary_entropy_upper((LN4 - x) / 2)),
}


def gamma(i: int, x: float) -> float:
    """Ramo γ_i da fronteira da hélice; cada ramo só vale no seu domínio"""
    if i not in _GAMMA_BRANCHES:
        raise DomainError(f"γ_{i} não existe (i ∈ 1..6)")
    (lo, hi), branch = _GAMMA_BRANCHES[i]
    if not lo - BOUNDARY_TOL <= x <= hi + BOUNDARY_TOL:
        raise DomainError(f"x = {x} fora do domínio [{lo}, {hi}] de γ_{i}")
    return branch(min(max(x, lo), hi))


LINEAR_OFFSET = binary_entropy(0.2) / LN2 - 0.4
# ΔI abaixo do qual o transporte de dois qubits é garantidamente não perdedor
TURNING_POINT = -2.0 * math.log(5.0 / 4.0)


@dataclass(frozen=True)
class PropellerEnvelope:
    """Cotas de 𝓔_G/E para dois qubits num dado ΔI"""
    delta_i: float
    gamma_upper: float
    gamma_lower: float
    linear_upper: float
    linear_lower: float

    def contains(self, gain: float, tol: float = QMP_TOL) -> bool:
        return self.gamma_lower - tol <= gain <= self.gamma_upper + tol

    def within_linear(self, gain: float, tol: float = QMP_TOL) -> bool:
        return self.linear_lower - tol <= gain <= self.linear_upper + tol


def linear_bounds(delta_i: float) -> Tuple[float, float]:
    """(inferior, superior): −ΔI/ln 4 ∓ (h(1/5)/ln 2 − 2/5)"""
    trend = -delta_i / LN4
    return trend - LINEAR_OFFSET, trend + LINEAR_OFFSET


def envelope(delta_i: float) -> PropellerEnvelope:
    """Combina os ramos γ por intervalo de ΔI em γ_u e γ_d"""
    if not -LN4 - BOUNDARY_TOL <= delta_i <= LN4 + BOUNDARY_TOL:
        raise DomainError(f"ΔI = {delta_i} fora de [−ln 4, ln 4]")
    x = min(max(delta_i, -LN4), LN4)

    if x <= -LN2:
        upper, lower = gamma(1, x), gamma(4, x)
    elif x <= 0.0:
        upper = max(gamma(1, x), gamma(2, x))
        lower = min(gamma(4, x), gamma(5, x))
    elif x <= LN2:
        upper = max(gamma(2, x), gamma(3, x))
        lower = min(gamma(5, x), gamma(6, x))
    else:
        upper, lower = gamma(3, x), gamma(6, x)

    linear_lower, linear_upper = linear_bounds(x)
    return PropellerEnvelope(
        delta_i=delta_i,
        gamma_upper=upper,
        gamma_lower=lower,
        linear_upper=linear_upper,
        linear_lower=linear_lower,
    )


def propeller_violations(delta_mi: ArrayLike, gain: ArrayLike, tol: float = QMP_TOL) -> Dict[str, int]:
    """Conta pontos (ΔI, 𝓔_G/E) fora do envelope γ e fora das cotas lineares"""
    envelope_count = 0
    linear_count = 0
    for x, g in zip(np.asarray(delta_mi, dtype=float), np.asarray(gain, dtype=float)):
        env = envelope(float(np.clip(x, -LN4, LN4)))
        envelope_count += not env.contains(g, tol)
        linear_count += not env.within_linear(g, tol)
    return {"envelope": envelope_count, "linear": linear_count}


def overlay_curves(n_points: int = 500) -> List[Dict[str, float]]:
    """γ_u, γ_d e cotas lineares numa grade uniforme de ΔI ∈ [−ln 4, ln 4]"""
    rows = []
    for x in np.linspace(-LN4, LN4, n_points):
        env = envelope(float(x))
        rows.append({
            "delta_mi": float(x),
            "gamma_upper": env.gamma_upper,
            "gamma_lower": env.gamma_lower,
            "linear_upper": env.linear_upper,
            "linear_lower": env.linear_lower,
        })
    return rows


def lipschitz_entropy(d: int) -> float:
    """Constante de Lipschitz da entropia de von Neumann: (2.322π/(2 ln 2))·ln d"""
    return LIPSCHITZ_ENTROPY_CONSTANT * math.pi / (2 * LN2) * math.log(d)


def lipschitz_mutual_information(d_b: int, d_c: int) -> float:
    """L_ΔI = (2.322π/ln 2)·ln d_BC"""
    return LIPSCHITZ_ENTROPY_CONSTANT * math.pi / LN2 * math.log(d_b * d_c)


def _require_levy_dims(d_b: int, d_c: int) -> None:
    if d_b < 2 or d_c < 2:
        raise DomainError(f"Dimensões {d_b}x{d_c}: ambas precisam ser ≥ 2")


def levy_width_mi(d_b: int, d_c: int) -> float:
    """𝓑_ΔI = 65.951·ln d_BC / d_BC"""
    _require_levy_dims(d_b, d_c)
    d_bc = d_b * d_c
    return LEVY_MI_CONSTANT * math.log(d_bc) / d_bc


def levy_width_gain(d_b: int, d_c: int) -> float:
    """𝓑̃_𝓔G = 50.133·max(d_B, d_C)/(d_B·d_C), para Hamiltonianos reescalonados"""
    _require_levy_dims(d_b, d_c)
    return LEVY_GAIN_CONSTANT * max(d_b, d_c) / (d_b * d_c)


def levy_width_gain_general(norm_h_b: float, norm_h_c: float, d_bc: int) -> float:
    """√(200π)(‖H_B‖ + ‖H_C‖)/d_BC para Hamiltonianos arbitrários"""
    return math.sqrt(200 * math.pi) * (norm_h_b + norm_h_c) / d_bc


@dataclass(frozen=True)
class LevyTail:
    raw: float

    @property
    def clamped(self) -> float:
        return min(max(self.raw, 0.0), 1.0)


def levy_tail(ell: float, width: float) -> LevyTail:
    """Cota 3·exp(−ℓ²/𝓑²) para P[|X − ⟨X⟩| > ℓ]"""
    if ell < 0:
        raise DomainError(f"ℓ = {ell} precisa ser ≥ 0")
    if width <= 0:
        raise DomainError(f"largura = {width} precisa ser positiva")
    return LevyTail(raw=LEVY_PREFACTOR * math.exp(-(ell ** 2) / width ** 2))


def levy_overlay(d_b: int, d_c: int, ells: ArrayLike) -> List[Dict[str, float]]:
    """Caudas de Levy de ΔI e 𝓔_G/E numa grade de ℓ"""
    width_mi = levy_width_mi(d_b, d_c)
    width_gain = levy_width_gain(d_b, d_c)
    return [
        {
            "ell": float(ell),
            "levy_tail_mi": levy_tail(float(ell), width_mi).clamped,
            "levy_tail_gain": levy_tail(float(ell), width_gain).clamped,
        }
        for ell in np.asarray(ells, dtype=float)
    ]


def _descending_probabilities(values: ArrayLike, name: str) -> NDArray[np.float64]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"Espectro {name} precisa ser uma lista não vazia")
    if abs(float(arr.sum()) - 1.0) > 1e-10:
        raise TraceError(f"Espectro {name} soma {arr.sum():.12f}, esperado 1")
    if np.any(np.diff(arr) > 1e-12):
        raise ShapeError(f"Espectro {name} não está em ordem decrescente")
    return arr


@dataclass(frozen=True)
class QmpSpectra:
    """Espectros locais e global, decrescentes e normalizados"""
    local_b: Tuple[float, ...]
    local_c: Tuple[float, ...]
    global_spectrum: Tuple[float, ...]

    def __post_init__(self):
        _descending_probabilities(self.local_b, "B")
        _descending_probabilities(self.local_c, "C")
        _descending_probabilities(self.global_spectrum, "BC")

    @classmethod
    def from_state(cls, s) -> "QmpSpectra":
        return cls(
            tuple(s.marginal_b.spectrum),
            tuple(s.marginal_c.spectrum),
            tuple(s.state.spectrum),
        )


@dataclass(frozen=True)
class QmpReport:
    passed: bool
    inequalities: Dict[str, bool] = field(default_factory=dict)
    slacks: Dict[str, float] = field(default_factory=dict)


def qmp_two_qubit(s: QmpSpectra, tol: float = QMP_TOL) -> QmpReport:
    """As quatro desigualdades do QMP de dois qubits, com folga de cada uma"""
    if (len(s.local_b), len(s.local_c), len(s.global_spectrum)) != (2, 2, 4):
        raise ShapeError("QMP de dois qubits exige espectros de tamanhos 2, 2 e 4")
    b1, c1 = s.local_b[1], s.local_c[1]
    g0, g1, g2, g3 = s.global_spectrum
    slacks = {
        "ineq1": b1 - (g2 + g3),
        "ineq2": c1 - (g2 + g3),
        "ineq3": b1 + c1 - (g1 + g2 + 2 * g3),
        "ineq4": min(g0 - g2, g1 - g3) - abs(b1 - c1),
    }
    inequalities = {name: slack >= -tol for name, slack in slacks.items()}
    return QmpReport(passed=all(inequalities.values()), inequalities=inequalities, slacks=slacks)


def qmp_general(spectra: QmpSpectra, e_b: ArrayLike, e_c: ArrayLike, tol: float = QMP_TOL) -> bool:
    """
    Família de desigualdades do QMP equivalente a δ ≥ 0 para energias de soma
    nula: Σ E^B λ^B + Σ E^C λ^C ≥ Σ (E^B+E^C)↑ λ^BC↓.
    """
    e_b = np.asarray(e_b, dtype=np.float64)
    e_c = np.asarray(e_c, dtype=np.float64)
    for energies, name in ((e_b, "B"), (e_c, "C")):
        if abs(float(energies.sum())) > 1e-10:
            raise TraceError(f"Energias de {name} somam {energies.sum():.3e}, esperado 0")
    slack = gap_spectral(spectra.local_b, spectra.local_c, e_b, e_c, spectra.global_spectrum)
    return slack >= -tol
