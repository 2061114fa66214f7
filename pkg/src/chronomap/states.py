"""Density matrices, observables and pure bipartite states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import ATOL, DomainError, ShapeError, as_cmatrix, hermiticity_error, partial_trace

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)


class NotHermitianError(DomainError):
    pass


class NotPositiveError(DomainError):
    pass


class TraceError(DomainError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class Observable:
    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class BipartiteState:
    rho: DensityMatrix
    d_A: int
    d_B: int

    def __post_init__(self):
        if self.rho.dim != self.d_A * self.d_B:
            raise ShapeError(f"state of dim {self.rho.dim} is not {self.d_A}x{self.d_B}")

    @property
    def mat(self) -> np.ndarray:
        return self.rho.mat

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_A, self.d_B)


@dataclass(frozen=True, eq=False)
class PureBipartite:
    """Pure state ``sum_ij amplitudes[i, j] |i>|j>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = as_cmatrix(self.amplitudes)
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > ATOL:
            raise DomainError(f"amplitudes have squared norm {norm2}, expected 1")
        object.__setattr__(self, "amplitudes", a)

    @property
    def d_A(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def d_B(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def to_state(self) -> BipartiteState:
        v = self.vector
        return BipartiteState(DensityMatrix(np.outer(v, v.conj())), self.d_A, self.d_B)


def make_density(m, tol: float = ATOL) -> DensityMatrix:
    """Validate ``m`` as a density matrix.

    Raises
    ------
    NotHermitianError, NotPositiveError, TraceError
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"density matrix must be square, got {m.shape}")
    if hermiticity_error(m) > tol:
        raise NotHermitianError("matrix is not Hermitian")
    lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if lam_min < -tol:
        raise NotPositiveError(f"matrix has negative eigenvalue {lam_min:.3e}")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise TraceError(f"trace is {tr.real:.12g}, expected 1")
    return DensityMatrix(m.copy())


def make_observable(m, tol: float = ATOL) -> Observable:
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"observable must be square, got {m.shape}")
    if hermiticity_error(m) > tol:
        raise NotHermitianError("observable is not Hermitian")
    return Observable(m.copy())


def as_density(x) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, BipartiteState):
        return x.rho
    return make_density(x)


def as_observable(x) -> Observable:
    return x if isinstance(x, Observable) else make_observable(x)


def make_bipartite(m, dims: tuple[int, int]) -> BipartiteState:
    return BipartiteState(as_density(m), int(dims[0]), int(dims[1]))


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=np.complex128) / d)


def pure_density(vec) -> DensityMatrix:
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def basis_state(d: int, k: int) -> DensityMatrix:
    v = np.zeros(d, dtype=np.complex128)
    v[k] = 1.0
    return pure_density(v)


def is_unitary_matrix(u, tol: float = ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def max_entangled(d: int, u=None) -> PureBipartite:
    """Maximally entangled state with amplitude matrix ``u / sqrt(d)``."""
    if u is None:
        u = np.eye(d, dtype=np.complex128)
    u = as_cmatrix(u)
    if u.shape != (d, d):
        raise ShapeError(f"u must be {d}x{d}, got {u.shape}")
    if not is_unitary_matrix(u):
        raise DomainError("u is not unitary")
    return PureBipartite(u / np.sqrt(d))


def product_pure(a, b) -> PureBipartite:
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    return PureBipartite(np.outer(a / np.linalg.norm(a), b / np.linalg.norm(b)))


def singlet() -> PureBipartite:
    return PureBipartite(np.array([[0, 1], [-1, 0]], dtype=np.complex128) / np.sqrt(2))


def werner(w: float) -> BipartiteState:
    """Singlet-fraction Werner state ``w |psi-><psi-| + (1-w) I/4``."""
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"Werner parameter must lie in [0, 1], got {w}")
    psi = singlet().vector
    m = w * np.outer(psi, psi.conj()) + (1 - w) * np.eye(4) / 4
    return BipartiteState(DensityMatrix(m.astype(np.complex128)), 2, 2)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_random_pure(d_A: int, d_B: int, seed=None) -> PureBipartite:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    if d_A < 2 or d_B < 2:
        raise DomainError("Haar sampling needs d_A, d_B >= 2")
    rng = _rng(seed)
    g = rng.standard_normal((d_A, d_B)) + 1j * rng.standard_normal((d_A, d_B))
    return PureBipartite(g / np.linalg.norm(g))


def random_unitary(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^dagger / Tr`` from a d x rank Ginibre matrix."""
    rng = _rng(seed)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_hermitian(d: int, seed=None) -> Observable:
    rng = _rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return Observable((g + g.conj().T) / 2)


def random_pm1_qubit_observable(seed=None) -> Observable:
    """``n . sigma`` for a uniformly random unit vector ``n``."""
    rng = _rng(seed)
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    return Observable(n[0] * SX + n[1] * SY + n[2] * SZ)


def reduced_state(psi: PureBipartite, which: str = "A") -> np.ndarray:
    a = psi.amplitudes
    return a @ a.conj().T if which == "A" else (a.T @ a.conj())


def entanglement_entropy(psi: PureBipartite) -> float:
    """Von Neumann entropy (nats) of the reduced state of the first party."""
    s = np.linalg.svd(psi.amplitudes, compute_uv=False)
    lam = s**2
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def conj_state(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.conj(as_density(rho).mat))


def conj_obs(o: Observable) -> Observable:
    return Observable(np.conj(as_observable(o).mat))


def bipartite_reduced(state: BipartiteState, which: str = "A") -> np.ndarray:
    """Reduced density matrix of party ``which``."""
    traced = "B" if which == "A" else "A"
    return partial_trace(state.mat, state.dims, traced)
