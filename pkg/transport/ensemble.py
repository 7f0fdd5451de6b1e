"""
Motor de Monte Carlo e estatísticas do ensemble.

Cada amostra i usa o fluxo (master_seed, i) e consome os subfluxos numa
ordem fixa: 0 → par de Hamiltonianos, 1 → estado inicial, 2 → unitária.
O resultado não depende da ordem de execução das threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import ConvexHull, QhullError
from scipy.stats import linregress
from tqdm import tqdm

from .bounds import propeller_violations
from .ergotropy import ergotropy_gain
from .errors import DegenerateGeometryError, DomainError, RetryLimitError
from .models import DispersionStats, EnsembleConfig, RectangleFit, TransportSample
from .sampling import (
    RngStream,
    energy_conserving_unitary,
    gap_matched_pair,
    hdu_separable,
    hs_state,
    pfhs_separable,
    product_state,
)
from .states import BipartiteState

logger = logging.getLogger(__name__)

HAMILTONIAN_STREAM = 0
STATE_STREAM = 1
UNITARY_STREAM = 2

DEFAULT_BINS_1D = 100
DEFAULT_BINS_2D = 50
DEFAULT_BINS_ENTROPY = 20
DEFAULT_TAIL_ELLS = (0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2)
HULL_TOL = 1e-12
RECT_TIE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Geração das amostras
# ---------------------------------------------------------------------------

def draw_initial_state(
    cfg: EnsembleConfig,
    rng: RngStream,
    fixed_state: Optional[BipartiteState] = None,
) -> BipartiteState:
    """Estado inicial conforme a classe pedida"""
    if cfg.state_class == "general":
        return BipartiteState(cfg.d_b, cfg.d_c, hs_state(cfg.d_bc, rng))
    if cfg.state_class == "product":
        return product_state(cfg.d_b, cfg.d_c, rng)
    if cfg.state_class == "separable_pfhs":
        state, _ = pfhs_separable(cfg.d_b, cfg.d_c, rng, cfg.pfhs_max_attempts)
        return state
    if cfg.state_class == "separable_hdu":
        return hdu_separable(cfg.d_b, cfg.d_c, rng)

    if fixed_state is None:
        raise DomainError("state_class 'fixed' exige fixed_state")
    if (fixed_state.d_b, fixed_state.d_c) != (cfg.d_b, cfg.d_c):
        raise DomainError(
            f"fixed_state {fixed_state.d_b}x{fixed_state.d_c} difere de {cfg.d_b}x{cfg.d_c}"
        )
    return fixed_state


def sample_transport(
    cfg: EnsembleConfig,
    sample_index: int,
    fixed_state: Optional[BipartiteState] = None,
) -> TransportSample:
    """Uma amostra (Hamiltonianos, estado, unitária) e o seu ganho"""
    stream = RngStream(cfg.master_seed, sample_index)
    try:
        pair = gap_matched_pair(
            cfg.d_b, cfg.d_c, cfg.grain, stream.child(HAMILTONIAN_STREAM), cfg.gap_max_attempts
        )
        state = draw_initial_state(cfg, stream.child(STATE_STREAM), fixed_state)
    except RetryLimitError as e:
        raise e.with_sample_index(sample_index) from e

    unitary = energy_conserving_unitary(pair, stream.child(UNITARY_STREAM), phases=cfg.unitary_phases)
    outcome = ergotropy_gain(state, pair.h_b, pair.h_c, unitary)
    return TransportSample(
        gain_over_e=outcome.gain,
        delta_mi=outcome.delta_mi,
        d_b=cfg.d_b,
        d_c=cfg.d_c,
        sample_index=sample_index,
        gap_before=outcome.gap_before,
        gap_after=outcome.gap_after,
    )


def run_ensemble(
    cfg: EnsembleConfig,
    fixed_state: Optional[BipartiteState] = None,
    threads: int = 1,
    show_progress: bool = False,
) -> List[TransportSample]:
    """
    Executa ``cfg.n_samples`` amostras, em paralelo com ``threads`` workers.
    A lista devolvida está ordenada por ``sample_index``.
    """
    desc = f"{cfg.state_class} {cfg.d_b}x{cfg.d_c}"
    logger.info(f"🎲 Ensemble {desc}: {cfg.n_samples} amostras, seed {cfg.master_seed}")

    samples: List[Optional[TransportSample]] = [None] * cfg.n_samples
    with tqdm(total=cfg.n_samples, desc=desc, disable=not show_progress) as pbar:
        if threads <= 1:
            for i in range(cfg.n_samples):
                samples[i] = sample_transport(cfg, i, fixed_state)
                pbar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = {
                    pool.submit(sample_transport, cfg, i, fixed_state): i
                    for i in range(cfg.n_samples)
                }
                for future in as_completed(futures):
                    samples[futures[future]] = future.result()
                    pbar.update(1)

    positive = sum(s.gain_over_e > 0 for s in samples)
    logger.info(f"✅ Ensemble {desc} concluído: {positive}/{cfg.n_samples} com ganho positivo")
    return samples


# ---------------------------------------------------------------------------
# Estatísticas básicas
# ---------------------------------------------------------------------------

def _values(values: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DomainError("Entrada vazia")
    return arr


@dataclass(frozen=True)
class Histogram:
    counts: NDArray[np.int64]
    edges: NDArray[np.float64]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def histogram(
    values: ArrayLike,
    bins: int = DEFAULT_BINS_1D,
    range: Optional[Tuple[float, float]] = None,
) -> Histogram:
    """Contagens em ``bins`` caixas uniformes; valores fora de ``range`` ficam de fora"""
    if bins < 1:
        raise DomainError(f"bins = {bins} precisa ser ≥ 1")
    counts, edges = np.histogram(_values(values), bins=bins, range=range)
    return Histogram(counts=counts.astype(np.int64), edges=edges)


def moments(values: ArrayLike) -> Tuple[float, float]:
    """Média e desvio padrão populacional"""
    arr = _values(values)
    if arr.size < 2:
        raise DomainError("Desvio padrão exige pelo menos 2 valores")
    return float(arr.mean()), float(arr.std())


def standard_error(values: ArrayLike) -> float:
    arr = _values(values)
    if arr.size < 2:
        raise DomainError("Erro padrão exige pelo menos 2 valores")
    return float(arr.std(ddof=1) / math.sqrt(arr.size))


def tail_probability(samples: ArrayLike, ell: float) -> float:
    """Fração de amostras com |x − ⟨x⟩| > ℓ"""
    if ell < 0:
        raise DomainError(f"ℓ = {ell} precisa ser ≥ 0")
    arr = _values(samples)
    return float(np.mean(np.abs(arr - arr.mean()) > ell))


def tail_curve(values: ArrayLike, ells: Iterable[float] = DEFAULT_TAIL_ELLS) -> List[Tuple[float, float]]:
    return [(float(ell), tail_probability(values, ell)) for ell in ells]


# ---------------------------------------------------------------------------
# Ensemble reescalonado e geometria
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RescaledPairs:
    """
    Pontos divididos pelo máximo absoluto de cada coordenada. Coluna com
    máximo nulo fica zerada e marcada em ``zero_columns``.
    """
    points: NDArray[np.float64]
    scale: Tuple[float, float]
    zero_columns: Tuple[bool, bool]

    @property
    def degenerate(self) -> bool:
        return any(self.zero_columns)


def sample_pairs(samples: Sequence[TransportSample]) -> NDArray[np.float64]:
    """Pontos (ΔI, 𝓔_G/E), na orientação do gráfico em hélice"""
    return np.array([(s.delta_mi, s.gain_over_e) for s in samples], dtype=np.float64)


def rescale_samples(samples: Union[Sequence[TransportSample], ArrayLike]) -> RescaledPairs:
    if len(samples) == 0:
        raise DomainError("Nenhuma amostra para reescalonar")
    if isinstance(samples[0], TransportSample):
        points = sample_pairs(samples)
    else:
        points = np.asarray(samples, dtype=np.float64).reshape(-1, 2)

    scale = np.max(np.abs(points), axis=0)
    zero = scale == 0
    if np.any(zero):
        logger.warning(f"⚠️ Coordenada identicamente nula no reescalonamento: {zero.tolist()}")
    safe = np.where(zero, 1.0, scale)
    rescaled = np.where(zero, 0.0, points / safe)
    return RescaledPairs(
        points=rescaled,
        scale=(float(scale[0]), float(scale[1])),
        zero_columns=(bool(zero[0]), bool(zero[1])),
    )


@dataclass(frozen=True)
class Hull:
    """Vértices do casco convexo em sentido anti-horário"""
    vertices: NDArray[np.float64]
    degenerate: bool = False

    def contains(self, points: ArrayLike, tol: float = HULL_TOL) -> NDArray[np.bool_]:
        """Teste de produto vetorial contra cada aresta"""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        v = self.vertices
        edges = np.roll(v, -1, axis=0) - v
        rel = pts[:, None, :] - v[None, :, :]
        cross = edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]
        return np.all(cross >= -tol, axis=1)


def convex_hull(points: ArrayLike) -> Hull:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    unique = np.unique(pts, axis=0)
    if unique.shape[0] < 3:
        return Hull(vertices=unique, degenerate=True)
    try:
        hull = ConvexHull(unique)
    except QhullError:
        logger.debug("⚠️ Casco degenerado (pontos colineares)")
        return Hull(vertices=unique, degenerate=True)
    # Em 2D o scipy já devolve os vértices em sentido anti-horário
    return Hull(vertices=unique[hull.vertices])


def min_area_rectangle(hull: Hull) -> RectangleFit:
    """
    Calibres rotativos: o retângulo mínimo tem um lado colinear a uma aresta
    do casco, então basta testar a orientação de cada aresta. Empates
    ficam com o menor ângulo em [0, π/2).
    """
    if hull.degenerate or hull.vertices.shape[0] < 3:
        raise DegenerateGeometryError("Casco degenerado não admite retângulo")

    v = hull.vertices
    edges = np.roll(v, -1, axis=0) - v
    angles = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), np.pi / 2)
    angles = np.where(np.isclose(angles, np.pi / 2, atol=1e-15), 0.0, angles)

    best = None
    for theta in np.unique(angles):
        c, s = math.cos(theta), math.sin(theta)
        # coordenadas no referencial girado por −θ
        x = v[:, 0] * c + v[:, 1] * s
        y = -v[:, 0] * s + v[:, 1] * c
        w, h = x.max() - x.min(), y.max() - y.min()
        area = w * h
        if best is None or area < best[0] * (1 - RECT_TIE_TOL):
            best = (area, theta, w, h)

    _, theta, w, h = best
    width, length = min(w, h), max(w, h)
    return RectangleFit(width=width, length=length, angle=float(theta), ratio=width / length)


def conditional_entropy(
    pairs: ArrayLike,
    bins: int = DEFAULT_BINS_ENTROPY,
    range: Optional[Sequence[Tuple[float, float]]] = None,
) -> float:
    """H(Y|X) = H(X, Y) − H(X), em nats, a partir de um histograma 2D"""
    if bins < 2:
        raise DomainError(f"bins = {bins} precisa ser ≥ 2")
    pts = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise DomainError("Entrada vazia")

    counts, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=bins, range=range)
    p_xy = counts / counts.sum()
    p_x = p_xy.sum(axis=1)

    def entropy(p):
        p = p[p > 0]
        return float(-np.sum(p * np.log(p)))

    return max(entropy(p_xy.ravel()) - entropy(p_x), 0.0)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    intercept: float
    r_squared: float


def power_law_fit(x: ArrayLike, y: ArrayLike) -> PowerLawFit:
    """Mínimos quadrados em (ln x, ln y): y ≈ e^intercept · x^exponent"""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise DomainError(f"Tamanhos diferentes: {x.size} e {y.size}")
    if x.size < 3:
        raise DomainError("Ajuste exige pelo menos 3 pontos")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("Ajuste de lei de potência exige valores positivos")
    fit = linregress(np.log(x), np.log(y))
    return PowerLawFit(exponent=float(fit.slope), intercept=float(fit.intercept), r_squared=float(fit.rvalue ** 2))


# ---------------------------------------------------------------------------
# Resumos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnsembleStatistics:
    n: int
    mean_gain: float
    sd_gain: float
    se_gain: float
    min_gain: float
    max_gain: float
    positive_fraction: float
    mean_mi: float
    sd_mi: float
    se_mi: float
    envelope_violations: int
    identity_violations: int


def ensemble_statistics(samples: Sequence[TransportSample]) -> EnsembleStatistics:
    """Média, DP e erro padrão de 𝓔_G/E e ΔI, mais contagens de violações"""
    gain = np.array([s.gain_over_e for s in samples])
    mi = np.array([s.delta_mi for s in samples])
    mean_gain, sd_gain = moments(gain)
    mean_mi, sd_mi = moments(mi)
    identity = sum(
        abs(s.gain_over_e - (s.gap_before - s.gap_after)) > 1e-9
        or s.gap_before < -1e-9
        or s.gap_after < -1e-9
        for s in samples
    )
    return EnsembleStatistics(
        n=len(samples),
        mean_gain=mean_gain,
        sd_gain=sd_gain,
        se_gain=standard_error(gain),
        min_gain=float(gain.min()),
        max_gain=float(gain.max()),
        positive_fraction=float(np.mean(gain > 0)),
        mean_mi=mean_mi,
        sd_mi=sd_mi,
        se_mi=standard_error(mi),
        envelope_violations=propeller_violations(mi, gain)["envelope"],
        identity_violations=int(identity),
    )


def dispersion_stats(
    samples: Sequence[TransportSample],
    bins: int = DEFAULT_BINS_ENTROPY,
    ells: Iterable[float] = DEFAULT_TAIL_ELLS,
) -> DispersionStats:
    """Casco, retângulo mínimo e entropia condicional do ensemble reescalonado"""
    rescaled = rescale_samples(samples)
    hull = convex_hull(rescaled.points)
    rect = None if hull.degenerate else min_area_rectangle(hull)
    if rect is None:
        logger.warning("⚠️ Casco degenerado: retângulo não ajustado")

    gain = [s.gain_over_e for s in samples]
    _, sd_gain = moments(gain)
    _, sd_mi = moments([s.delta_mi for s in samples])
    return DispersionStats(
        conditional_entropy=conditional_entropy(rescaled.points, bins, range=((-1, 1), (-1, 1))),
        rect=rect,
        sd_gain=sd_gain,
        sd_mi=sd_mi,
        tail_curve=tail_curve(gain, ells),
    )


@dataclass(frozen=True)
class ScanPoint:
    config: EnsembleConfig
    samples: List[TransportSample]
    stats: EnsembleStatistics


def scan_dimensions(
    configs: Iterable[EnsembleConfig],
    threads: int = 1,
    show_progress: bool = False,
) -> List[ScanPoint]:
    """Executa uma varredura de configurações, uma de cada vez"""
    points = []
    for cfg in configs:
        samples = run_ensemble(cfg, threads=threads, show_progress=show_progress)
        points.append(ScanPoint(config=cfg, samples=samples, stats=ensemble_statistics(samples)))
    return points
