"""
Geradores aleatórios: matrizes de Ginibre, unitárias de Haar, estados de
Hilbert–Schmidt, estados separáveis (HDU e PFHS), pares de Hamiltonianos GUE
granulados com gap em comum e unitárias em blocos que conservam energia.

Todo amostrador é função pura de (master_seed, stream_index, parâmetros):
os fluxos vêm de ``numpy.random.SeedSequence`` com ``spawn_key``, então
cada amostra deriva o seu fluxo sem depender das anteriores.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, RetryLimitError, UnsupportedDimensionError
from .ergotropy import Hamiltonian
from .qmat import CMatrix
from .states import BipartiteState, DensityMatrix, is_ppt, validate

logger = logging.getLogger(__name__)

PFHS_MAX_ATTEMPTS = 100_000
GAP_MATCH_MAX_ATTEMPTS = 10_000
PFHS_MAX_DIM = 6

UnitarySampler = Callable[[int, "RngStream"], CMatrix]


@dataclass(frozen=True)
class RngStream:
    """
    Fluxo pseudoaleatório identificado por (master_seed, stream_index).

    ``child(k)`` deriva subfluxos independentes; o gerador é criado sob
    demanda e consumido pelas chamadas sucessivas.
    """
    master_seed: int
    stream_index: int = 0
    path: Tuple[int, ...] = field(default_factory=tuple)

    @cached_property
    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_index, *self.path),
        )
        return np.random.default_rng(seq)

    def child(self, k: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index, (*self.path, k))


def _require_dim(d: int, minimum: int, name: str = "d") -> None:
    if d < minimum:
        raise DomainError(f"{name} = {d} precisa ser ≥ {minimum}")


def ginibre(d: int, rng: RngStream) -> CMatrix:
    """Matriz d×d com entradas complexas gaussianas, Re e Im ~ N(0, 1/2)"""
    _require_dim(d, 1)
    gen = rng.generator
    scale = np.sqrt(0.5)
    return gen.normal(0.0, scale, (d, d)) + 1j * gen.normal(0.0, scale, (d, d))


def haar_unitary(d: int, rng: RngStream) -> CMatrix:
    """Unitária de Haar via QR da Ginibre com correção de fase na diagonal de R"""
    q, r = np.linalg.qr(ginibre(d, rng))
    diag = np.diag(r)
    phases = diag / np.abs(diag)
    return q * phases


def haar_pure_state(d: int, rng: RngStream, unitary_sampler: Optional[UnitarySampler] = None) -> NDArray[np.complex128]:
    """Ket de Haar: primeira coluna de uma unitária de Haar, U|0⟩"""
    sampler = unitary_sampler or haar_unitary
    return np.asarray(sampler(d, rng), dtype=np.complex128)[:, 0]


def hs_state(d: int, rng: RngStream) -> DensityMatrix:
    """Estado da medida de Hilbert–Schmidt: GG†/tr(GG†)"""
    g = ginibre(d, rng)
    w = g @ g.conj().T
    return validate(w / np.real(np.trace(w)))


def product_state(d_b: int, d_c: int, rng: RngStream) -> BipartiteState:
    """ρ_B ⊗ ρ_C com marginais HS independentes"""
    return BipartiteState.product(hs_state(d_b, rng), hs_state(d_c, rng))


def uniform_simplex(n: int, rng: RngStream) -> NDArray[np.float64]:
    """Vetor de probabilidade uniforme no simplexo, via espaçamentos de uniformes ordenadas"""
    _require_dim(n, 1, "n")
    cuts = np.sort(rng.generator.random(n - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def hdu_separable(
    d_b: int,
    d_c: int,
    rng: RngStream,
    unitary_sampler: Optional[UnitarySampler] = None,
) -> BipartiteState:
    """
    Amostragem HDU: mistura convexa de (d_B·d_C)² produtos de kets de Haar
    com pesos uniformes no simplexo. Separável por construção.
    """
    _require_dim(d_b, 2, "d_b")
    _require_dim(d_c, 2, "d_c")
    n_terms = (d_b * d_c) ** 2
    weights = uniform_simplex(n_terms, rng)
    kets = np.empty((n_terms, d_b * d_c), dtype=np.complex128)
    for a in range(n_terms):
        psi = haar_pure_state(d_b, rng, unitary_sampler)
        chi = haar_pure_state(d_c, rng, unitary_sampler)
        kets[a] = np.kron(psi, chi)
    rho = (kets.T * weights) @ kets.conj()
    return BipartiteState.from_matrix(rho, d_b, d_c)


def pfhs_separable(
    d_b: int,
    d_c: int,
    rng: RngStream,
    max_attempts: int = PFHS_MAX_ATTEMPTS,
) -> Tuple[BipartiteState, int]:
    """
    Amostragem PFHS: rejeita estados HS até passar no critério de Peres.
    Só é exata para d_B·d_C ≤ 6. Devolve o estado e o número de tentativas.
    """
    if d_b * d_c > PFHS_MAX_DIM:
        raise UnsupportedDimensionError(
            f"PFHS só decide separabilidade para d_B·d_C ≤ {PFHS_MAX_DIM}, recebido {d_b}x{d_c}"
        )
    for attempt in range(1, max_attempts + 1):
        candidate = BipartiteState(d_b, d_c, hs_state(d_b * d_c, rng))
        if is_ppt(candidate):
            logger.debug(f"🎲 PFHS {d_b}x{d_c}: estado PPT na tentativa {attempt}")
            return candidate, attempt
    raise RetryLimitError(f"PFHS sem estado PPT após {max_attempts} tentativas", max_attempts)


def gue_hamiltonian(d: int, rng: RngStream) -> Hamiltonian:
    """H = (G + G†)/2 com G de Ginibre"""
    _require_dim(d, 2)
    g = ginibre(d, rng)
    return Hamiltonian.from_matrix((g + g.conj().T) / 2)


def coarse_grain(energies: ArrayLike, grain: float) -> NDArray[np.int64]:
    """m_k = ⌈E_k/ε + 1/2⌉ − 1, deslocado para que o menor nível seja 0"""
    if grain <= 0:
        raise DomainError(f"grain = {grain} precisa ser positivo")
    energies = np.asarray(energies, dtype=np.float64)
    levels = np.ceil(energies / grain + 0.5).astype(np.int64) - 1
    return np.sort(levels - levels.min())


def _positive_gaps(levels: NDArray[np.int64]) -> set:
    diffs = np.subtract.outer(levels, levels).ravel()
    return {int(x) for x in diffs if x > 0}


@dataclass(frozen=True)
class GrainedHamiltonianPair:
    """
    Par (H_B, H_C) com espectros inteiros: E_k = unit · m_k.

    Antes do reescalonamento ``unit == grain``; depois, ``unit`` é o fator que
    leva a energia máxima do sistema escolhido para M − 1.
    """
    h_b: Hamiltonian
    h_c: Hamiltonian
    grain: float
    integer_levels_b: Tuple[int, ...]
    integer_levels_c: Tuple[int, ...]
    unit: float

    @classmethod
    def from_levels(
        cls,
        levels_b: ArrayLike,
        levels_c: ArrayLike,
        unit: float = 1.0,
        grain: Optional[float] = None,
    ) -> "GrainedHamiltonianPair":
        levels_b = np.sort(np.asarray(levels_b, dtype=np.int64))
        levels_c = np.sort(np.asarray(levels_c, dtype=np.int64))
        return cls(
            h_b=Hamiltonian.diagonal(levels_b * unit),
            h_c=Hamiltonian.diagonal(levels_c * unit),
            grain=unit if grain is None else grain,
            integer_levels_b=tuple(int(x) for x in levels_b),
            integer_levels_c=tuple(int(x) for x in levels_c),
            unit=unit,
        )

    @property
    def d_b(self) -> int:
        return len(self.integer_levels_b)

    @property
    def d_c(self) -> int:
        return len(self.integer_levels_c)

    @property
    def matching_gaps(self) -> set:
        return _positive_gaps(np.array(self.integer_levels_b)) & _positive_gaps(np.array(self.integer_levels_c))

    @property
    def has_matching_gap(self) -> bool:
        return bool(self.matching_gaps)

    def total_levels(self) -> NDArray[np.int64]:
        """Níveis inteiros de H_BC na base produto, índice i_B·d_C + i_C"""
        return np.add.outer(np.array(self.integer_levels_b), np.array(self.integer_levels_c)).ravel()


def rescale_dimensionless(pair: GrainedHamiltonianPair) -> GrainedHamiltonianPair:
    """
    Reescala o par para energias adimensionais. O sistema com maior energia
    máxima (empate: mais autovalores distintos; empate total: B) passa a ter
    energia máxima M − 1, com M o número de autovalores distintos dele.
    """
    levels_b = np.array(pair.integer_levels_b)
    levels_c = np.array(pair.integer_levels_c)
    top_b, top_c = int(levels_b.max()), int(levels_c.max())
    distinct_b, distinct_c = len(set(pair.integer_levels_b)), len(set(pair.integer_levels_c))

    if top_b != top_c:
        pick_b = top_b > top_c
    elif distinct_b != distinct_c:
        pick_b = distinct_b > distinct_c
    else:
        pick_b = True

    top, distinct = (top_b, distinct_b) if pick_b else (top_c, distinct_c)
    if top == 0:
        raise DomainError("Hamiltoniano trivial (todos os níveis nulos) não pode ser reescalado")
    return GrainedHamiltonianPair.from_levels(
        levels_b, levels_c, unit=(distinct - 1) / top, grain=pair.grain
    )


def gap_matched_pair(
    d_b: int,
    d_c: int,
    grain: float,
    rng: RngStream,
    max_attempts: int = GAP_MATCH_MAX_ATTEMPTS,
) -> GrainedHamiltonianPair:
    """
    Sorteia H_B e H_C do GUE, granula com ``grain`` e repete até existir um
    gap não nulo em comum; devolve o par já reescalonado.
    """
    _require_dim(d_b, 2, "d_b")
    _require_dim(d_c, 2, "d_c")
    if grain <= 0:
        raise DomainError(f"grain = {grain} precisa ser positivo")
    for attempt in range(1, max_attempts + 1):
        levels_b = coarse_grain(gue_hamiltonian(d_b, rng).energies, grain)
        levels_c = coarse_grain(gue_hamiltonian(d_c, rng).energies, grain)
        pair = GrainedHamiltonianPair.from_levels(levels_b, levels_c, unit=grain, grain=grain)
        if pair.has_matching_gap:
            logger.debug(f"🎲 Par {d_b}x{d_c} com gap em comum na tentativa {attempt}")
            return rescale_dimensionless(pair)
    raise RetryLimitError(
        f"Nenhum par {d_b}x{d_c} com gap em comum após {max_attempts} tentativas", max_attempts
    )


@dataclass(frozen=True)
class EnergyBlock:
    """Subespaço degenerado de H_BC: nível inteiro, energia e índices da base produto"""
    level: int
    energy: float
    indices: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class EnergyConservingUnitary:
    """Unitária bloco-diagonal nos autoespaços degenerados de H_BC"""
    u: CMatrix
    blocks: Tuple[EnergyBlock, ...]

    @property
    def block_structure(self) -> List[Tuple[float, int, Tuple[int, ...]]]:
        return [(b.energy, b.dim, b.indices) for b in self.blocks]

    @property
    def block_dims(self) -> List[int]:
        return [b.dim for b in self.blocks]


def energy_blocks(pair: GrainedHamiltonianPair) -> Tuple[EnergyBlock, ...]:
    """Agrupa os índices da base produto pelo nível inteiro total (aritmética exata)"""
    groups: Dict[int, List[int]] = defaultdict(list)
    for index, level in enumerate(pair.total_levels()):
        groups[int(level)].append(index)
    return tuple(
        EnergyBlock(level=level, energy=level * pair.unit, indices=tuple(groups[level]))
        for level in sorted(groups)
    )


def energy_conserving_unitary(
    pair: GrainedHamiltonianPair,
    rng: RngStream,
    phases: bool = False,
) -> EnergyConservingUnitary:
    """
    Unitária de Haar independente em cada bloco degenerado de dimensão ≥ 2,
    identidade no resto. Com ``phases=True`` os blocos unidimensionais
    também são sorteados (Haar em U(1), uma fase aleatória). As fases não
    alteram as populações, mas mudam as coerências entre blocos e portanto
    as marginais. Nos ensembles a escolha vem de
    ``EnsembleConfig.unitary_phases``.
    """
    dim = pair.d_b * pair.d_c
    u = np.eye(dim, dtype=np.complex128)
    blocks = energy_blocks(pair)
    for block in blocks:
        idx = np.array(block.indices)
        if block.dim >= 2:
            u[np.ix_(idx, idx)] = haar_unitary(block.dim, rng)
        elif phases:
            u[idx[0], idx[0]] = np.exp(2j * np.pi * rng.generator.random())
    return EnergyConservingUnitary(u=u, blocks=blocks)
