"""
Matrizes densidade: validação, entropia de von Neumann, informação mútua,
transposição parcial e critério de Peres (PPT).

Todas as entropias em nats (logaritmo natural).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NegativeEigenvalueError, NotHermitianError, ShapeError, TraceError
from .qmat import (
    CMatrix,
    HERMITIAN_TOL,
    cmatrix,
    conjugate_by,
    hermiticity_defect,
    ket,
    partial_trace,
    partial_transpose_c,
    projector,
    tensor,
)

NEGATIVE_EIG_TOL = 1e-10
TRACE_TOL = 1e-8
ENTROPY_FLOOR = 1e-14
PPT_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix:
    """Estado quântico validado com espectro decrescente em cache"""
    dim: int
    mat: CMatrix
    spectrum: NDArray[np.float64]

    @classmethod
    def from_ket(cls, vector: ArrayLike) -> "DensityMatrix":
        v = np.asarray(vector, dtype=np.complex128).ravel()
        return validate(projector(v / np.linalg.norm(v)))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return validate(np.eye(dim) / dim)

    @property
    def purity(self) -> float:
        return float(np.sum(self.spectrum ** 2))


def validate(m: ArrayLike) -> DensityMatrix:
    """
    Valida uma matriz como estado quântico.

    Autovalores em [-1e-10, 0) são cortados para 0 e o traço é renormalizado.
    Erros distintos para matriz não hermitiana, autovalor negativo e traço
    fora de 1.
    """
    m = cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"Matriz densidade precisa ser quadrada, recebido {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"Estado não hermitiano: ‖m − m†‖_max = {defect:.3e}")
    m = (m + m.conj().T) / 2

    eigvals, eigvecs = np.linalg.eigh(m)
    if eigvals[0] < -NEGATIVE_EIG_TOL:
        raise NegativeEigenvalueError(f"Autovalor negativo: {eigvals[0]:.3e}")
    trace = float(np.real(np.trace(m)))
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceError(f"Traço {trace:.12f} difere de 1")

    clipped = np.clip(eigvals, 0.0, None)
    total = float(np.sum(clipped))
    if np.any(eigvals < 0):
        m = (eigvecs * clipped) @ eigvecs.conj().T
    m = m / total
    spectrum = np.sort(clipped / total)[::-1].copy()
    return DensityMatrix(dim=m.shape[0], mat=m, spectrum=spectrum)


def operator_matrix(u: Any) -> CMatrix:
    """Aceita uma matriz ou um objeto que carrega a matriz em ``.u``"""
    return cmatrix(getattr(u, "u", u))


@dataclass(frozen=True)
class BipartiteState:
    """Estado de BC com as dimensões locais de B e C"""
    d_b: int
    d_c: int
    state: DensityMatrix

    def __post_init__(self):
        if self.state.dim != self.d_b * self.d_c:
            raise ShapeError(
                f"Estado de dimensão {self.state.dim} incompatível com {self.d_b}x{self.d_c}"
            )

    @classmethod
    def from_matrix(cls, m: ArrayLike, d_b: int, d_c: int) -> "BipartiteState":
        return cls(d_b, d_c, validate(m))

    @classmethod
    def product(cls, rho_b: DensityMatrix, rho_c: DensityMatrix) -> "BipartiteState":
        return cls(rho_b.dim, rho_c.dim, validate(tensor(rho_b.mat, rho_c.mat)))

    @property
    def dim(self) -> int:
        return self.d_b * self.d_c

    @cached_property
    def marginal_b(self) -> DensityMatrix:
        return validate(partial_trace(self.state.mat, self.d_b, self.d_c, keep="B"))

    @cached_property
    def marginal_c(self) -> DensityMatrix:
        return validate(partial_trace(self.state.mat, self.d_b, self.d_c, keep="C"))

    def evolve(self, u: Any) -> "BipartiteState":
        """Estado após ρ → u ρ u†"""
        return BipartiteState(self.d_b, self.d_c, validate(conjugate_by(operator_matrix(u), self.state.mat)))


def bell_state() -> BipartiteState:
    """|Φ⁺⟩ = (|00⟩ + |11⟩)/√2"""
    return BipartiteState(2, 2, DensityMatrix.from_ket(ket(0, 4) + ket(3, 4)))


def zero_gap_entangled_state() -> BipartiteState:
    """(|00⟩⟨00| + |Ψ⁺⟩⟨Ψ⁺|)/2: emaranhado, mas com gap ergotrópico nulo"""
    psi_plus = (ket(1, 4) + ket(2, 4)) / np.sqrt(2)
    m = (projector(ket(0, 4)) + projector(psi_plus)) / 2
    return BipartiteState.from_matrix(m, 2, 2)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(ρ) = −Σ λ ln λ, com 0 ln 0 = 0"""
    lam = rho.spectrum[rho.spectrum > ENTROPY_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def mutual_information(s: BipartiteState) -> float:
    """I = S(ρ_B) + S(ρ_C) − S(ρ_BC)"""
    return (
        von_neumann_entropy(s.marginal_b)
        + von_neumann_entropy(s.marginal_c)
        - von_neumann_entropy(s.state)
    )


def mutual_information_change(s: BipartiteState, u: Any) -> float:
    """
    ΔI sob ρ → UρU†. Como S(ρ_BC) é invariante por unitárias, só as
    entropias locais mudam.
    """
    u = operator_matrix(u)
    if u.shape != (s.dim, s.dim):
        raise ShapeError(f"Unitária {u.shape} incompatível com estado de dimensão {s.dim}")
    final = s.evolve(u)
    return (
        von_neumann_entropy(final.marginal_b)
        + von_neumann_entropy(final.marginal_c)
        - von_neumann_entropy(s.marginal_b)
        - von_neumann_entropy(s.marginal_c)
    )


def partial_transpose(s: BipartiteState) -> CMatrix:
    return partial_transpose_c(s.state.mat, s.d_b, s.d_c)


def min_partial_transpose_eigenvalue(s: BipartiteState) -> float:
    pt = partial_transpose(s)
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])


def is_ppt(s: BipartiteState, tol: float = PPT_TOL) -> bool:
    """Critério de Peres; decide separabilidade exatamente para d_B·d_C ≤ 6"""
    return min_partial_transpose_eigenvalue(s) >= -tol
