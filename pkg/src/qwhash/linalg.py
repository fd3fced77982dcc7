"""
Small dense complex linear algebra used by the walk operators.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
The Hermitian eigensolver is a cyclic complex Jacobi iteration built from
elementwise numpy operations; it never calls into LAPACK, so the spectral
data behind every walk operator does not depend on the host's linear
algebra backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import ContractViolationError, InvalidDimensionError, InvalidParameterError

__all__ = [
    "HERMITIAN_TOL",
    "UNITARY_TOL",
    "RECONSTRUCTION_TOL",
    "ORTHONORMAL_TOL",
    "EIG_CONVERGENCE_TOL",
    "NORM_PRESERVATION_TOL",
    "SpectralDecomposition",
    "as_matrix",
    "as_vector",
    "path_adjacency",
    "is_hermitian",
    "unitarity_error",
    "is_unitary",
    "eig_hermitian",
    "expm_hermitian_scaled",
    "apply",
]

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
EIG_CONVERGENCE_TOL = 1e-14
NORM_PRESERVATION_TOL = 1e-12

# Components below this magnitude are skipped when fixing eigenvector phase.
_PHASE_PIVOT_TOL = 1e-12
_MAX_JACOBI_SWEEPS = 100

ComplexMat = NDArray[np.complex128]
ComplexVec = NDArray[np.complex128]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a Hermitian matrix, ``M = V diag(w) V^H``.

    ``eigenvalues`` is ascending; ``eigenvectors`` holds them column-wise.
    """

    eigenvalues: NDArray[np.float64]
    eigenvectors: ComplexMat

    def reconstruct(self) -> ComplexMat:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m: ArrayLike) -> ComplexMat:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidDimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def as_vector(v: ArrayLike) -> ComplexVec:
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1 or a.shape[0] < 1:
        raise InvalidDimensionError(f"expected a non-empty 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolationError("vector has non-finite entries")
    return a


def path_adjacency(n: int) -> ComplexMat:
    """Adjacency matrix of the path graph on ``n`` vertices."""
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"path graph needs n >= 1 vertices, got {n!r}")
    n = int(n)
    a = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return a


def is_hermitian(m: ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def unitarity_error(u: ArrayLike) -> float:
    """Max-entry deviation ``max |U^H U - I|``."""
    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"unitarity needs a square matrix, got {a.shape}")
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


def is_unitary(u: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(u) < tol


def _off_diagonal_norm(a: ComplexMat) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def _jacobi_rotate(a: ComplexMat, v: ComplexMat, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    app = a[p, p].real
    aqq = a[q, q].real
    # Real 2x2 symmetric Jacobi on [[app, r], [r, aqq]] after removing the phase.
    tau = (aqq - app) / (2.0 * r)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    g00, g01 = c, s
    g10, g11 = -s * np.conj(phase), c * np.conj(phase)
    ap, aq = a[:, p].copy(), a[:, q].copy()
    a[:, p] = ap * g00 + aq * g10
    a[:, q] = ap * g01 + aq * g11
    rp, rq = a[p, :].copy(), a[q, :].copy()
    a[p, :] = np.conj(g00) * rp + np.conj(g10) * rq
    a[q, :] = np.conj(g01) * rp + np.conj(g11) * rq
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    vp, vq = v[:, p].copy(), v[:, q].copy()
    v[:, p] = vp * g00 + vq * g10
    v[:, q] = vp * g01 + vq * g11


def _fix_phases(vecs: ComplexMat) -> ComplexMat:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = np.flatnonzero(np.abs(col) > _PHASE_PIVOT_TOL)
        if pivot.size:
            z = col[pivot[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def eig_hermitian(m: ArrayLike) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues come back ascending. Each eigenvector is scaled by a unit phase
    so that its first non-negligible component is real and positive, which
    makes the output reproducible for a given input.

    Raises
    ------
    ContractViolationError
        If ``m`` is not square and Hermitian within ``HERMITIAN_TOL``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"eigendecomposition needs a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)) or not is_hermitian(a):
        raise ContractViolationError("eig_hermitian requires a Hermitian matrix")

    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.sqrt(np.sum(np.abs(a) ** 2))))
    threshold = EIG_CONVERGENCE_TOL * scale

    for _ in range(_MAX_JACOBI_SWEEPS):
        if _off_diagonal_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 0.0:
                    _jacobi_rotate(a, v, p, q)
    else:
        raise ContractViolationError("Jacobi iteration did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(eigenvalues=w[order], eigenvectors=_fix_phases(v[:, order]))


def expm_hermitian_scaled(m: ArrayLike, t: float) -> ComplexMat:
    """Return ``exp(-i M t)`` for Hermitian ``M`` via its spectral decomposition."""
    if not np.isfinite(t) or t <= 0:
        raise InvalidParameterError(f"evolution time must be > 0, got {t!r}")
    dec = eig_hermitian(m)
    v = dec.eigenvectors
    return (v * np.exp(-1j * dec.eigenvalues * t)) @ v.conj().T


def apply(m: ArrayLike, v: ArrayLike) -> ComplexVec:
    a = as_matrix(m)
    x = as_vector(v)
    if a.shape[1] != x.shape[0]:
        raise InvalidDimensionError(f"cannot apply {a.shape} matrix to vector of length {x.shape[0]}")
    return a @ x
