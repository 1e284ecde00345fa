"""Complex linear algebra kernel shared by the automata toolkit.

All state vectors and transition matrices are numpy arrays with dtype
complex128. A transition matrix V acts by matrix-vector product and entry
(s, t) is the amplitude for reaching basis state s from basis state t, so
column t is the image of basis state t.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_UNITARY_TOL = 1e-10
DEFAULT_SV_TOL = 1e-9
PROJECTOR_TOL = 1e-12


def as_state(values) -> np.ndarray:
    """Coerce to a 1-D complex128 amplitude vector."""
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError("amplitude vector must be one-dimensional")
    return v


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D complex128 matrix."""
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    return m


def norm_sq(v) -> float:
    v = as_state(v)
    return float(np.real(np.vdot(v, v)))


def inner(a, b) -> complex:
    """Hermitian inner product, conjugate-linear in the first argument."""
    return complex(np.vdot(as_state(a), as_state(b)))


def is_unitary(m, tol: float = DEFAULT_UNITARY_TOL) -> bool:
    """True when max-abs entry of (M†M - I) does not exceed tol."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    return bool(dev <= tol)


def projector_from_indices(indices: Iterable[int], dim: int) -> np.ndarray:
    """Orthogonal projector onto the span of the given computational basis states."""
    p = np.zeros((dim, dim), dtype=np.complex128)
    for i in indices:
        i = int(i)
        if not 0 <= i < dim:
            raise ValueError(f"basis index {i} out of range for dimension {dim}")
        p[i, i] = 1.0
    return p


def tensor(a, b) -> np.ndarray:
    """Kronecker product; index (i, j) of the factors maps to i*dim_b + j."""
    return np.kron(as_matrix(a), as_matrix(b))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace, stored one basis vector per row."""

    vectors: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        v = as_matrix(self.vectors) if np.asarray(self.vectors).size else np.zeros(
            (0, self.ambient_dim), dtype=np.complex128
        )
        if v.ndim != 2 or v.shape[1] != self.ambient_dim:
            raise ValueError("basis rows must match the ambient dimension")
        gram = v @ v.conj().T
        if v.shape[0] and np.abs(gram - np.eye(v.shape[0])).max() > 1e-9:
            raise ValueError("basis rows are not orthonormal within 1e-9")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def from_indices(cls, indices: Sequence[int], dim: int) -> "SubspaceBasis":
        idx = sorted(set(int(i) for i in indices))
        rows = np.zeros((len(idx), dim), dtype=np.complex128)
        for r, i in enumerate(idx):
            if not 0 <= i < dim:
                raise ValueError(f"basis index {i} out of range for dimension {dim}")
            rows[r, i] = 1.0
        return cls(rows, dim)

    @classmethod
    def from_spanning(cls, vectors, sv_tol: float = DEFAULT_SV_TOL) -> "SubspaceBasis":
        """Orthonormal basis for the span of possibly dependent row vectors."""
        m = as_matrix(vectors)
        if m.shape[0] == 0:
            return cls(m, m.shape[1])
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        rank = int(np.sum(s > sv_tol))
        return cls(vh[:rank], m.shape[1])

    def project(self, v) -> np.ndarray:
        v = as_state(v)
        if v.shape[0] != self.ambient_dim:
            raise ValueError("vector dimension does not match the subspace")
        coeffs = self.vectors.conj() @ v
        return coeffs @ self.vectors

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = as_state(v)
        return bool(np.linalg.norm(v - self.project(v)) <= tol)

    def projector(self) -> np.ndarray:
        """Dense projector matrix onto the subspace."""
        return self.vectors.T @ self.vectors.conj()


def null_space(m, sv_tol: float = DEFAULT_SV_TOL) -> SubspaceBasis:
    """Orthonormal basis of the kernel; singular values <= sv_tol count as zero."""
    m = as_matrix(m)
    cols = m.shape[1]
    if cols == 0 or m.shape[0] == 0:
        rows = np.eye(cols, dtype=np.complex128) if m.shape[0] == 0 else np.zeros(
            (0, cols), dtype=np.complex128
        )
        return SubspaceBasis(rows, cols)
    _, s, vh = np.linalg.svd(m)
    rank = int(np.sum(s > sv_tol))
    return SubspaceBasis(vh[rank:].conj(), cols)


def project_onto(v, s: SubspaceBasis) -> np.ndarray:
    """Orthogonal projection of v onto the subspace s."""
    return s.project(v)
