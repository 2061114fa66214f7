"""Numerical studies: Haar typicality, decohering dynamics and the cost of
evaluating correlations temporally instead of on the full bipartite state."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .channels import KrausChannel, make_channel
from .correlators import spatial_corr, temporal_corr, temporal_corr_post
from .isomorphism import channel_to_state, pure_to_kraus, spatial_to_temporal
from .matcore import DomainError
from .states import (
    DensityMatrix,
    Observable,
    PureBipartite,
    entanglement_entropy,
    haar_random_pure,
    maximally_mixed,
    random_hermitian,
)

MAX_SPATIAL_DIM = 64


def unitarity_deviation(m) -> float:
    """``|| N M^dag M / Tr(M^dag M) - I ||_F / sqrt(N)``; zero iff ``M`` is a scaled unitary."""
    m = np.asarray(m)
    n = m.shape[1]
    g = m.conj().T @ m
    return float(np.linalg.norm(n * g / np.trace(g).real - np.eye(n)) / np.sqrt(n))


@dataclass(frozen=True)
class HaarStats:
    N: int
    n_samples: int
    mean_deviation: float
    p95_deviation: float
    mean_entropy: float
    page_entropy: float


def page_entropy(m: int, n: int) -> float:
    """Exact mean entanglement entropy of Haar states with ``m <= n``."""
    m, n = min(m, n), max(m, n)
    return float(np.sum(1.0 / np.arange(n + 1, m * n + 1)) - (m - 1) / (2 * n))


def haar_unitarity_study(N: int, n_samples: int, seed: int) -> HaarStats:
    if N < 2:
        raise DomainError("N must be at least 2")
    rng = np.random.default_rng(seed)
    dev = np.empty(n_samples)
    ent = np.empty(n_samples)
    for k in range(n_samples):
        psi = haar_random_pure(N, N, rng)
        dev[k] = unitarity_deviation(pure_to_kraus(psi))
        ent[k] = entanglement_entropy(psi)
    return HaarStats(N, n_samples, float(dev.mean()), float(np.percentile(dev, 95)),
                     float(ent.mean()), page_entropy(N, N))


def weyl_unitaries(d: int) -> list[np.ndarray]:
    """The ``d^2`` shift-clock operators ``X^a Z^b``."""
    x = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in range(d) for b in range(d)]


def decohering_channel(u, lam: float) -> KrausChannel:
    """``(1 - lam)`` unitary ``u`` mixed with a depolarizing Weyl twirl of weight ``lam``."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    u = np.asarray(u, dtype=np.complex128)
    d = u.shape[0]
    elements = []
    if lam < 1.0:
        elements.append((1.0 - lam, u))
    if lam > 0.0:
        elements += [(lam / d**2, w) for w in weyl_unitaries(d)]
    return make_channel(elements)


def decoherence_scan(u, lambda_grid, O1, O2, rho_in=None) -> list[tuple[float, float]]:
    u = np.asarray(u, dtype=np.complex128)
    rho_in = maximally_mixed(u.shape[0]) if rho_in is None else rho_in
    return [(float(lam), temporal_corr(rho_in, decohering_channel(u, float(lam)), O1, O2))
            for lam in lambda_grid]


@dataclass(frozen=True)
class BenchReport:
    dim: int
    n_settings: int
    kraus_rank: int
    t_temporal: float
    t_spatial: float
    max_abs_deviation: float
    speedup: float

    @property
    def valid(self) -> bool:
        return self.max_abs_deviation < 1e-9

    def to_dict(self) -> dict:
        return asdict(self) | {"valid": self.valid}


def random_channel(d_in: int, d_out: int, rank: int, seed=None) -> KrausChannel:
    rng = np.random.default_rng(seed)
    shape = (rank, d_out, d_in)
    mats = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return make_channel(zip(rng.dirichlet(np.ones(rank)), mats))


def _median_time(fn, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), out


def gain_bench(N: int, n_settings: int, kraus_rank: int, seed: int, repeats: int = 5,
               channel: KrausChannel | None = None) -> BenchReport:
    """Time ``n_settings`` correlators on ``N x N`` versus ``N^2 x N^2`` matrices.

    The temporal path evaluates the post-selected correlator with the
    channel; the spatial path evaluates the bipartite formula on the explicit
    state ``channel_to_state(ch)``. Both run single-threaded.
    """
    if N > MAX_SPATIAL_DIM:
        raise DomainError(f"spatial path refuses N > {MAX_SPATIAL_DIM} (memory guard)")
    if N < 2:
        raise DomainError("N must be at least 2")
    rng = np.random.default_rng(seed)
    ch = random_channel(N, N, kraus_rank, rng) if channel is None else channel
    state = channel_to_state(ch)
    obs = [(random_hermitian(N, rng), random_hermitian(N, rng)) for _ in range(n_settings)]
    bundles = [spatial_to_temporal(oa, ob) for oa, ob in obs]

    def temporal():
        return [temporal_corr_post(b.rho_in, None, ch, b.O1, b.O2) for b in bundles]

    def spatial():
        return [spatial_corr(state, oa, ob) for oa, ob in obs]

    with threadpool_limits(limits=1):
        t_temp, e_temp = _median_time(temporal, repeats)
        t_spat, e_spat = _median_time(spatial, repeats)
    dev = float(np.max(np.abs(np.array(e_temp) - np.array(e_spat))))
    return BenchReport(N, n_settings, len(ch), t_temp, t_spat, dev, t_spat / t_temp)
