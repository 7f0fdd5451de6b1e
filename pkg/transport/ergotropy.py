"""
Estados passivos, ergotropia, gap ergotrópico e ganho de ergotropia.

Todas as energias são adimensionais (em unidades de E).
"""

import logging
from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, EnergyConservationError, ShapeError, TraceError
from .qmat import CMatrix, HermitianEig, cmatrix, commutator_norm, hermitian_eig
from .states import (
    BipartiteState,
    DensityMatrix,
    mutual_information_change,
    operator_matrix,
    validate,
)

logger = logging.getLogger(__name__)

ENERGY_CONSERVATION_TOL = 1e-8
SPECTRUM_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Hamiltonian:
    """Hamiltoniano local com energias crescentes E_0 ≤ … ≤ E_{d−1}"""
    dim: int
    eig: HermitianEig

    @classmethod
    def from_matrix(cls, m: ArrayLike) -> "Hamiltonian":
        m = cmatrix(m)
        return cls(dim=m.shape[0], eig=hermitian_eig(m))

    @classmethod
    def diagonal(cls, energies: ArrayLike) -> "Hamiltonian":
        return cls.from_matrix(np.diag(np.asarray(energies, dtype=np.float64)))

    @property
    def energies(self) -> NDArray[np.float64]:
        return self.eig.values

    @property
    def matrix(self) -> CMatrix:
        return self.eig.reconstruct()

    @property
    def operator_norm(self) -> float:
        return float(np.max(np.abs(self.energies)))


@dataclass(frozen=True)
class TransportOutcome:
    """Resultado de um transporte ρ_BC → Uρ_BC U†"""
    gain: float
    gap_before: float
    gap_after: float
    delta_mi: float
    local_erg_before: Tuple[float, float]
    local_erg_after: Tuple[float, float]

    @property
    def identity_residual(self) -> float:
        """|ganho − (δ − δ̃)|, zero pela identidade ganho = variação do gap"""
        return abs(self.gain - (self.gap_before - self.gap_after))


def total_hamiltonian(h_b: Hamiltonian, h_c: Hamiltonian) -> Hamiltonian:
    """H_BC = H_B ⊗ 𝟙 + 𝟙 ⊗ H_C"""
    m = np.kron(h_b.matrix, np.eye(h_c.dim)) + np.kron(np.eye(h_b.dim), h_c.matrix)
    return Hamiltonian.from_matrix(m)


def _check_dims(rho: DensityMatrix, h: Hamiltonian) -> None:
    if rho.dim != h.dim:
        raise ShapeError(f"Estado de dimensão {rho.dim} e Hamiltoniano de dimensão {h.dim}")


def mean_energy(rho: DensityMatrix, h: Hamiltonian) -> float:
    _check_dims(rho, h)
    return float(np.real(np.trace(rho.mat @ h.matrix)))


def passive_energy(rho: DensityMatrix, h: Hamiltonian) -> float:
    """tr(ρ↓H): populações decrescentes nos níveis crescentes"""
    _check_dims(rho, h)
    return float(np.dot(rho.spectrum, h.energies))


def passive_state(rho: DensityMatrix, h: Hamiltonian) -> DensityMatrix:
    """ρ↓ = Σ_k λ_k |E_k⟩⟨E_k| com λ decrescente e E crescente"""
    _check_dims(rho, h)
    vectors = h.eig.vectors
    return validate((vectors * rho.spectrum) @ vectors.conj().T)


def ergotropy(rho: DensityMatrix, h: Hamiltonian) -> float:
    """𝓔 = tr(ρH) − tr(ρ↓H)"""
    return mean_energy(rho, h) - passive_energy(rho, h)


def ergotropy_qubit(rho00: float, rho01: complex, energy_gap: float = 1.0) -> float:
    """Forma fechada para um qubit com H = diag(0, E)"""
    rho11 = 1.0 - rho00
    if not 0.0 <= rho00 <= 1.0:
        raise DomainError(f"ρ₀₀ = {rho00} fora de [0, 1]")
    if abs(rho01) ** 2 > rho00 * rho11 + 1e-12:
        raise DomainError(f"|ρ₀₁|² = {abs(rho01) ** 2:.3e} excede ρ₀₀ρ₁₁; estado não positivo")
    radicand = max(0.25 - rho00 * rho11 + abs(rho01) ** 2, 0.0)
    return energy_gap * (0.5 - rho00 + np.sqrt(radicand))


def thermal_state(h: Hamiltonian, beta: float) -> DensityMatrix:
    """Estado de Gibbs e^{−βH}/Z"""
    weights = np.exp(-beta * (h.energies - h.energies[0]))
    weights /= weights.sum()
    vectors = h.eig.vectors
    return validate((vectors * weights) @ vectors.conj().T)


def ergotropic_gap(s: BipartiteState, h_b: Hamiltonian, h_c: Hamiltonian) -> float:
    """δ = 𝓔(ρ_BC) − 𝓔(ρ_B) − 𝓔(ρ_C)"""
    if (s.d_b, s.d_c) != (h_b.dim, h_c.dim):
        raise ShapeError(f"Estado {s.d_b}x{s.d_c} e Hamiltonianos {h_b.dim}x{h_c.dim}")
    h_bc = total_hamiltonian(h_b, h_c)
    return (
        ergotropy(s.state, h_bc)
        - ergotropy(s.marginal_b, h_b)
        - ergotropy(s.marginal_c, h_c)
    )


def _check_spectrum(spectrum: NDArray[np.float64], name: str) -> None:
    total = float(np.sum(spectrum))
    if abs(total - 1.0) > SPECTRUM_NORM_TOL:
        raise TraceError(f"Espectro {name} soma {total:.12f}, esperado 1")


def gap_spectral(
    local_b: ArrayLike,
    local_c: ArrayLike,
    e_b: ArrayLike,
    e_c: ArrayLike,
    global_spectrum: ArrayLike,
) -> float:
    """
    Gap ergotrópico a partir só dos espectros:
    Σ E^B_k λ^B_k + Σ E^C_k λ^C_k − Σ (E^B+E^C)↑_k λ^BC↓_k
    """
    local_b = np.sort(np.asarray(local_b, dtype=np.float64))[::-1]
    local_c = np.sort(np.asarray(local_c, dtype=np.float64))[::-1]
    global_spectrum = np.sort(np.asarray(global_spectrum, dtype=np.float64))[::-1]
    e_b = np.sort(np.asarray(e_b, dtype=np.float64))
    e_c = np.sort(np.asarray(e_c, dtype=np.float64))

    for spectrum, name in ((local_b, "B"), (local_c, "C"), (global_spectrum, "BC")):
        _check_spectrum(spectrum, name)
    if local_b.size != e_b.size or local_c.size != e_c.size:
        raise ShapeError("Espectros locais e níveis de energia com tamanhos diferentes")
    if global_spectrum.size != e_b.size * e_c.size:
        raise ShapeError(f"Espectro global de tamanho {global_spectrum.size}, esperado {e_b.size * e_c.size}")

    e_bc = np.sort(np.add.outer(e_b, e_c).ravel())
    return float(np.dot(e_b, local_b) + np.dot(e_c, local_c) - np.dot(e_bc, global_spectrum))


def ergotropy_gain(
    s: BipartiteState,
    h_b: Hamiltonian,
    h_c: Hamiltonian,
    u: Any,
) -> TransportOutcome:
    """
    Ganho 𝓔_G = [𝓔(ρ̃_B) + 𝓔(ρ̃_C)] − [𝓔(ρ_B) + 𝓔(ρ_C)] sob uma unitária
    que conserva a energia total.
    """
    u = operator_matrix(u)
    h_bc = total_hamiltonian(h_b, h_c)
    if u.shape != (s.dim, s.dim):
        raise ShapeError(f"Unitária {u.shape} incompatível com estado de dimensão {s.dim}")
    defect = commutator_norm(u, h_bc.matrix)
    if defect > ENERGY_CONSERVATION_TOL:
        logger.debug(f"❌ Unitária não conserva a energia: defeito {defect:.3e}")
        raise EnergyConservationError(f"‖[U, H_BC]‖_max = {defect:.3e} excede {ENERGY_CONSERVATION_TOL}")

    final = s.evolve(u)
    before = (ergotropy(s.marginal_b, h_b), ergotropy(s.marginal_c, h_c))
    after = (ergotropy(final.marginal_b, h_b), ergotropy(final.marginal_c, h_c))
    return TransportOutcome(
        gain=sum(after) - sum(before),
        gap_before=ergotropy(s.state, h_bc) - sum(before),
        gap_after=ergotropy(final.state, h_bc) - sum(after),
        delta_mi=mutual_information_change(s, u),
        local_erg_before=before,
        local_erg_after=after,
    )


def activation_example() -> Tuple[BipartiteState, Hamiltonian, Hamiltonian]:
    """
    Produto de estados localmente passivos que não é globalmente passivo:
    ρ_B = 𝟙/2, ρ_C = diag(1/2, 1/2, 0), H_B = diag(0,1), H_C = diag(0,1,1).
    """
    rho_b = validate(np.eye(2) / 2)
    rho_c = validate(np.diag([0.5, 0.5, 0.0]))
    return (
        BipartiteState.product(rho_b, rho_c),
        Hamiltonian.diagonal([0.0, 1.0]),
        Hamiltonian.diagonal([0.0, 1.0, 1.0]),
    )
