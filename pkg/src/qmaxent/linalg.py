"""Hermitian matrix primitives: construction, spectra, matrix functions.

All operators are dense complex square matrices of modest dimension
(intended for dim <= 64). Matrix functions go through the spectral
decomposition, so exp/log of a Hermitian operator stay exactly Hermitian
after re-symmetrization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, EigensolverError, ShapeError

HERMITICITY_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _as_square_array(matrix) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ShapeError("matrix dimension must be at least 1")
    return arr


class HermitianOperator:
    """A Hermitian matrix, validated and symmetrized at construction.

    The input may drift from exact Hermiticity by at most
    hermiticity_tol in max norm; the stored matrix is (M + M^dag)/2
    and is never mutated afterwards.
    """

    def __init__(self, matrix, hermiticity_tol: float = HERMITICITY_TOL):
        arr = _as_square_array(matrix)
        drift = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
        if drift > hermiticity_tol:
            raise DomainError(
                f"matrix is not Hermitian: max |M - M^dag| = {drift:.3e} "
                f"exceeds tolerance {hermiticity_tol:.3e}"
            )
        self._matrix = (arr + arr.conj().T) / 2.0
        self._matrix.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def eigh(operator: HermitianOperator) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian operator.

    Eigenvalues are real and ascending; eigenvectors are orthonormal
    columns, so eigenvectors @ diag(eigenvalues) @ eigenvectors^dag
    reconstructs the matrix.
    """
    try:
        vals, vecs = np.linalg.eigh(operator.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(dim=operator.dim) from exc
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def matrix_function(
    operator: HermitianOperator,
    f: Callable[[float], float],
    domain_guard: float | None = None,
) -> HermitianOperator:
    """Apply a real scalar function to a Hermitian operator spectrally.

    With a domain_guard, every eigenvalue must exceed it; otherwise the
    offending eigenvalue is reported and no value is returned.
    """
    dec = eigh(operator)
    if domain_guard is not None:
        smallest = float(dec.eigenvalues[0])
        if smallest <= domain_guard:
            raise DomainError(
                f"eigenvalue {smallest:.6e} is not above the domain guard "
                f"{domain_guard:.6e}"
            )
    mapped = np.array([f(float(v)) for v in dec.eigenvalues], dtype=float)
    u = dec.eigenvectors
    out = (u * mapped) @ u.conj().T
    # explicit symmetrization removes rounding drift exactly
    return HermitianOperator((out + out.conj().T) / 2.0)


def matrix_exp(operator: HermitianOperator) -> HermitianOperator:
    return matrix_function(operator, np.exp)


def matrix_log(
    operator: HermitianOperator, domain_guard: float = 0.0
) -> HermitianOperator:
    return matrix_function(operator, np.log, domain_guard=domain_guard)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square matrices."""
    return np.kron(_as_square_array(a), _as_square_array(b))


def partial_trace(matrix, dims: Sequence[int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite matrix on C^d1 (x) C^d2.

    keep selects the surviving subsystem: 1 for the first factor,
    2 for the second. The total trace is preserved by construction.
    """
    arr = _as_square_array(matrix)
    d1, d2 = int(dims[0]), int(dims[1])
    if d1 < 1 or d2 < 1:
        raise ShapeError(f"subsystem dims must be positive, got {dims}")
    if d1 * d2 != arr.shape[0]:
        raise ShapeError(
            f"dims {d1}x{d2} do not factor a matrix of dim {arr.shape[0]}"
        )
    blocks = arr.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ikjk->ij", blocks)
    if keep == 2:
        return np.einsum("ikil->kl", blocks)
    raise ShapeError(f"keep must be 1 or 2, got {keep}")


def trace_product(a, b) -> float:
    """Re Tr(AB) for Hermitian A, B.

    Tr(AB) is real for Hermitian operands; an imaginary residue above
    1e-10 indicates a non-Hermitian input and is rejected.
    """
    am = a.matrix if isinstance(a, HermitianOperator) else _as_square_array(a)
    bm = b.matrix if isinstance(b, HermitianOperator) else _as_square_array(b)
    if am.shape != bm.shape:
        raise ShapeError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    value = np.sum(am * bm.T)
    if abs(value.imag) > 1e-10:
        raise DomainError(
            f"Tr(AB) has imaginary part {value.imag:.3e}; operands must be Hermitian"
        )
    return float(value.real)
