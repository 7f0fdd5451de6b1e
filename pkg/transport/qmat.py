"""
Núcleo de matrizes complexas densas: construção, produtos tensoriais,
traços parciais e decomposição espectral hermitiana.

Convenção de índices: o índice do sistema composto BC é
``index_B * d_C + index_C`` (a mesma de ``numpy.kron``).
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NotHermitianError, NotUnitaryError, ShapeError, ValidationError

CMatrix = NDArray[np.complex128]
Subsystem = Literal["B", "C"]

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
# Autovalores dentro desta distância relativa são tratados como degenerados
DEGENERACY_TOL = 1e-12

IDENTITY_2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class HermitianEig:
    """Decomposição espectral: autovalores crescentes e autovetores em colunas"""
    values: NDArray[np.float64]
    vectors: CMatrix

    def reconstruct(self) -> CMatrix:
        return (self.vectors * self.values) @ self.vectors.conj().T


def cmatrix(entries: ArrayLike) -> CMatrix:
    """Converte para matriz complexa 2D validando que todas as entradas são finitas"""
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"Esperada matriz 2D, recebido ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("Matriz contém NaN ou Inf")
    return m


def ket(index: int, dim: int) -> NDArray[np.complex128]:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(vector: ArrayLike) -> CMatrix:
    v = np.asarray(vector, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def dagger(m: CMatrix) -> CMatrix:
    return m.conj().T


def tensor(a: ArrayLike, b: ArrayLike) -> CMatrix:
    """Produto de Kronecker a ⊗ b"""
    return np.kron(cmatrix(a), cmatrix(b))


def _require_square(m: CMatrix, dim: int) -> None:
    if m.shape != (dim, dim):
        raise ShapeError(f"Esperada matriz {dim}x{dim}, recebido {m.shape}")


def partial_trace(m: ArrayLike, d_b: int, d_c: int, keep: Subsystem = "B") -> CMatrix:
    """
    Traço parcial de um operador em B ⊗ C.

    keep="B" devolve tr_C(m); keep="C" devolve tr_B(m).
    """
    m = cmatrix(m)
    _require_square(m, d_b * d_c)
    blocks = m.reshape(d_b, d_c, d_b, d_c)
    if keep == "B":
        return np.einsum("ijkj->ik", blocks)
    if keep == "C":
        return np.einsum("ijil->jl", blocks)
    raise ValueError(f"Subsistema desconhecido: {keep!r}")


def partial_transpose_c(m: ArrayLike, d_b: int, d_c: int) -> CMatrix:
    """Transposição parcial no fator C"""
    m = cmatrix(m)
    _require_square(m, d_b * d_c)
    blocks = m.reshape(d_b, d_c, d_b, d_c)
    return blocks.transpose(0, 3, 2, 1).reshape(d_b * d_c, d_b * d_c)


def hermiticity_defect(m: CMatrix) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eig(m: ArrayLike) -> HermitianEig:
    """
    Decomposição espectral completa de uma matriz hermitiana.

    Autovalores crescentes; em autovalores degenerados a ordem é pelo índice
    da maior componente do autovetor, e a fase é fixada para que essa
    componente seja real positiva. A saída é determinística para a mesma
    entrada.
    """
    m = cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"Matriz não quadrada: {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"Matriz não hermitiana: ‖m − m†‖_max = {defect:.3e}")

    values, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    dominant = np.argmax(np.abs(vectors), axis=0)

    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    groups = np.zeros(values.size, dtype=np.int64)
    for k in range(1, values.size):
        same = values[k] - values[k - 1] <= DEGENERACY_TOL * scale
        groups[k] = groups[k - 1] if same else groups[k - 1] + 1

    # a reordenação só permuta dentro de grupos degenerados, então os
    # valores continuam crescentes sem serem permutados
    order = np.lexsort((dominant, groups))
    vectors = vectors[:, order]
    dominant = dominant[order]

    phases = vectors[dominant, np.arange(values.size)]
    phases = phases / np.where(np.abs(phases) > 0, np.abs(phases), 1.0)
    vectors = vectors / phases

    return HermitianEig(values=values.astype(np.float64), vectors=vectors)


def unitarity_defect(u: CMatrix) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_unitary(u: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    u = cmatrix(u)
    return u.shape[0] == u.shape[1] and unitarity_defect(u) <= tol


def conjugate_by(u: ArrayLike, m: ArrayLike) -> CMatrix:
    """Devolve u · m · u†"""
    u = cmatrix(u)
    m = cmatrix(m)
    if u.shape[0] != u.shape[1] or u.shape != m.shape:
        raise ShapeError(f"Formas incompatíveis: u {u.shape}, m {m.shape}")
    defect = unitarity_defect(u)
    if defect > UNITARY_TOL:
        raise NotUnitaryError(f"u não é unitária: ‖u†u − 𝟙‖_max = {defect:.3e}")
    return u @ m @ u.conj().T


def commutator_norm(a: CMatrix, b: CMatrix) -> float:
    """‖[a, b]‖_max"""
    return float(np.max(np.abs(a @ b - b @ a)))


def swap(d_b: int, d_c: int) -> CMatrix:
    """Operador SWAP: |i⟩_B|j⟩_C → |j⟩|i⟩, de B⊗C para C⊗B"""
    s = np.zeros((d_b * d_c, d_b * d_c), dtype=np.complex128)
    for i in range(d_b):
        for j in range(d_c):
            s[j * d_b + i, i * d_c + j] = 1.0
    return s


def permutation_matrix(perm: ArrayLike) -> CMatrix:
    perm = np.asarray(perm, dtype=np.int64)
    p = np.zeros((perm.size, perm.size), dtype=np.complex128)
    p[perm, np.arange(perm.size)] = 1.0
    return p
