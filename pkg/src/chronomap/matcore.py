"""Dense complex-matrix kernel.

Matrices are plain ``numpy`` complex128 arrays. The tensor-product basis is
``|i> (x) |j>`` with the first factor as the major index, i.e. composite index
``i * d_B + j``; every other module relies on this ordering.
"""

from __future__ import annotations

import numpy as np

ATOL = 1e-10


class ShapeError(ValueError):
    """Operand dimensions are inconsistent."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


def as_cmatrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix contains NaN or Inf entries")
    return m


def _square(a, name="matrix") -> np.ndarray:
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def hermiticity_error(a) -> float:
    """Max absolute entry of ``a - a^dagger``."""
    m = np.asarray(a)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(a, tol: float = ATOL) -> bool:
    m = np.asarray(a)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and hermiticity_error(m) <= tol


def anticommutator(a, b) -> np.ndarray:
    """Return ``ab + ba`` for two square matrices of equal size."""
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"anticommutator of {a.shape} and {b.shape}")
    return a @ b + b @ a


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def partial_trace(m, dims: tuple[int, int], which: str = "B") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : array_like, shape (d_A*d_B, d_A*d_B)
    dims : (d_A, d_B)
    which : {"A", "B"}
        The factor that is traced *out*.
    """
    m = _square(m)
    d_a, d_b = (int(d) for d in dims)
    if d_a < 1 or d_b < 1 or m.shape[0] != d_a * d_b:
        raise ShapeError(f"matrix of size {m.shape[0]} is not {d_a}x{d_b}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if which == "B":
        return np.einsum("ijkj->ik", t)
    if which == "A":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def _fix_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size:
        c = v[nz[0]]
        v = v * (np.conj(c) / abs(c))
    return v


def _canonical_basis(block: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(block) built from projected unit vectors in index order."""
    n, r = block.shape
    proj = block @ block.conj().T
    basis: list[np.ndarray] = []
    for k in range(n):
        vec = proj[:, k].copy()
        for _ in range(2):  # re-orthogonalize once for stability
            for b in basis:
                vec -= b * np.vdot(b, vec)
        nrm = np.linalg.norm(vec)
        if nrm > 1e-6:
            basis.append(vec / nrm)
            if len(basis) == r:
                break
    return np.stack(basis, axis=1)


def herm_eig(m, tol: float = ATOL, degeneracy_tol: float = 1e-9):
    """Eigendecomposition of a Hermitian matrix with a reproducible basis.

    Eigenvalues are returned in descending order. Within a degenerate
    eigenspace the basis is obtained by Gram-Schmidt on the projections of
    the computational basis vectors, taken in index order. Every eigenvector
    is phase-fixed so that its first nonzero component is real positive.

    Returns
    -------
    eigenvalues : ndarray of float, shape (n,)
    eigenvectors : ndarray, shape (n, n)
        Orthonormal columns.
    """
    m = _square(m)
    if hermiticity_error(m) > tol:
        raise DomainError("herm_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    n = w.size
    scale = max(1.0, float(np.max(np.abs(w))))
    i = 0
    while i < n:
        j = i + 1
        while j < n and w[j - 1] - w[j] <= degeneracy_tol * scale:
            j += 1
        if j - i > 1:
            v[:, i:j] = _canonical_basis(v[:, i:j])
        i = j
    for k in range(n):
        v[:, k] = _fix_phase(v[:, k])
    return w, v
