"""Finite-strength Gaussian-pointer model of two sequential measurements.

Each pointer starts in ``phi(q) ~ exp(-eps q^2 / 4)`` (position variance
``1/eps``) and is displaced by the eigenvalues of the measured observable.
The joint pointer density is a finite sum of Gaussian products weighted by
branch amplitudes ``T[a, a', b, b']``, so its moments are available in closed
form at every ``eps``. This module is used as an independent check of the
weak-limit formulas in :mod:`chronomap.correlators`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import IncompatibleBoundaryError, KrausChannel
from .matcore import DomainError, ShapeError, herm_eig
from .states import as_density, as_observable

CHUNK = 1 << 16


class ConfigurationError(ValueError):
    pass


class NumericalIntegrityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PointerConfig:
    epsilon: float
    grid_halfwidth_sigmas: float = 6.0
    grid_points: int = 512
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.grid_points < 64:
            raise ConfigurationError(f"grid_points must be >= 64, got {self.grid_points}")


def branch_tensor(rho_in, rho_fi, ch: KrausChannel, O1, O2):
    """Eigenvalues of both observables and the branch weights ``T``.

    ``T[a, a', b, b'] = Tr[rho_fi Q_b (sum_z p_z M_z P_a rho_in P_a' M_z^dag) Q_b']``
    with ``P_a``, ``Q_b`` rank-one spectral projectors of ``O1`` and ``O2``.
    ``rho_fi=None`` stands for tracing out the system.
    """
    rho = as_density(rho_in).mat
    o1 = as_observable(O1).mat
    o2 = as_observable(O2).mat
    if rho.shape[0] != ch.d_in or o1.shape[0] != ch.d_in or o2.shape[0] != ch.d_out:
        raise ShapeError("dimensions of rho_in/O1/O2 do not match the channel")
    lam1, u = herm_eig(o1)
    lam2, v = herm_eig(o2)
    rho_t = u.conj().T @ rho @ u
    if rho_fi is None:
        r = np.eye(ch.d_out, dtype=np.complex128)
    else:
        fi = as_density(rho_fi).mat
        if fi.shape[0] != ch.d_out:
            raise ShapeError("rho_fi dimension does not match the channel output")
        r = v.conj().T @ fi @ v
    k = np.einsum("bi,zij,ja->zba", v.conj().T, ch.kraus, u)
    t = np.einsum("ac,z,zba,zdc,db->acbd", rho_t, ch.weights, k, k.conj(), r)
    return lam1, lam2, t


def _overlaps(x, eps):
    """Gaussian overlap moments ``G0`` (norm) and ``G1`` (first moment)."""
    diff = x[:, None] - x[None, :]
    g0 = np.exp(-eps * diff**2 / 8)
    g1 = 0.5 * (x[:, None] + x[None, :]) * g0
    return g0, g1


def finite_eps_moments(rho_in, rho_fi, ch: KrausChannel, O1, O2, eps: float):
    """Exact ``(E[q1], E[q2], E[q1 q2])`` at measurement strength ``eps``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    lam1, lam2, t = branch_tensor(rho_in, rho_fi, ch, O1, O2)
    g0a, g1a = _overlaps(lam1, eps)
    g0b, g1b = _overlaps(lam2, eps)
    z = np.einsum("acbd,ac,bd->", t, g0a, g0b)
    if z.real <= 1e-14:
        raise IncompatibleBoundaryError("post-selection annihilates every pointer branch")
    m1 = np.einsum("acbd,ac,bd->", t, g1a, g0b) / z
    m2 = np.einsum("acbd,ac,bd->", t, g0a, g1b) / z
    m12 = np.einsum("acbd,ac,bd->", t, g1a, g1b) / z
    return m1.real, m2.real, m12.real


def finite_eps_corr(rho_in, rho_fi, ch: KrausChannel, O1, O2, eps: float) -> float:
    return finite_eps_moments(rho_in, rho_fi, ch, O1, O2, eps)[2]


def _axis(lam, cfg: PointerConfig):
    half = cfg.grid_halfwidth_sigmas / np.sqrt(cfg.epsilon)
    lo, hi = lam.min() - half, lam.max() + half
    h = (hi - lo) / cfg.grid_points
    x = lo + h * (np.arange(cfg.grid_points) + 0.5)
    phi = (cfg.epsilon / (2 * np.pi)) ** 0.25 * np.exp(-cfg.epsilon * (x[:, None] - lam[None, :]) ** 2 / 4)
    return x, h, phi


def pointer_density(rho_in, rho_fi, ch: KrausChannel, O1, O2, cfg: PointerConfig):
    """Joint pointer density on the sampling grid, normalized to unit mass.

    Returns ``(x1, x2, h1, h2, density)`` where ``density[i, j]`` is the
    probability density at cell centre ``(x1[i], x2[j])``.
    """
    lam1, lam2, t = branch_tensor(rho_in, rho_fi, ch, O1, O2)
    x1, h1, phi1 = _axis(lam1, cfg)
    x2, h2, phi2 = _axis(lam2, cfg)
    g0a, _ = _overlaps(lam1, cfg.epsilon)
    g0b, _ = _overlaps(lam2, cfg.epsilon)
    z = np.einsum("acbd,ac,bd->", t, g0a, g0b).real
    if z <= 1e-14:
        raise IncompatibleBoundaryError("post-selection annihilates every pointer branch")
    f1 = phi1[:, :, None] * phi1[:, None, :]
    f2 = phi2[:, :, None] * phi2[:, None, :]
    dens = np.einsum("acbd,iac,jbd->ij", t, f1, f2, optimize=True)
    peak = np.max(np.abs(dens.real))
    if np.max(np.abs(dens.imag)) > 1e-10 * max(peak, 1e-300):
        raise NumericalIntegrityError("pointer density has an imaginary part")
    dens = dens.real / z
    if dens.min() < -1e-9 * dens.max():
        raise NumericalIntegrityError(f"pointer density is negative ({dens.min():.3e})")
    mass = dens.sum() * h1 * h2
    if abs(1.0 - mass) > 1e-6:
        raise ConfigurationError(
            f"grid captures mass {mass:.9f}; widen grid_halfwidth_sigmas or add grid_points"
        )
    return x1, x2, h1, h2, np.clip(dens, 0.0, None)


def _chunk_stats(cdf, x1, x2, h1, h2, seed, index, size):
    rng = np.random.default_rng([seed, index])
    u = rng.random(size) * cdf[-1]
    cell = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    i, j = np.divmod(cell, x2.size)
    jitter = rng.random((2, size)) - 0.5
    q1 = x1[i] + h1 * jitter[0]
    q2 = x2[j] + h2 * jitter[1]
    prod = q1 * q2
    return prod.sum(), np.dot(prod, prod)


def mc_sample_corr(rho_in, rho_fi, ch: KrausChannel, O1, O2, cfg: PointerConfig, n_samples: int,
                   n_jobs: int = 1) -> tuple[float, float]:
    """Monte Carlo estimate of ``E[q1 q2]`` from simulated pointer readings.

    Draws come from the discretized joint density by inverse CDF over grid
    cells plus a uniform offset inside the cell. Samples are generated in
    fixed-size chunks, each with its own generator keyed by ``(seed, chunk)``,
    so the result does not depend on ``n_jobs``.

    Returns
    -------
    estimate, std_error : float
    """
    if n_samples < 1000:
        raise ConfigurationError("n_samples must be at least 1000")
    x1, x2, h1, h2, dens = pointer_density(rho_in, rho_fi, ch, O1, O2, cfg)
    cdf = np.cumsum(dens.ravel())
    sizes = [min(CHUNK, n_samples - s) for s in range(0, n_samples, CHUNK)]
    jobs = [(cdf, x1, x2, h1, h2, cfg.seed, k, n) for k, n in enumerate(sizes)]
    if n_jobs == 1:
        parts = [_chunk_stats(*a) for a in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda a: _chunk_stats(*a), jobs))
    s1 = s2 = 0.0
    for a, b in parts:  # fixed summation order
        s1 += a
        s2 += b
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean**2, 0.0) * n_samples / (n_samples - 1)
    return float(mean), float(np.sqrt(var / n_samples))
