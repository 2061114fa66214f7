"""CHSH and CGLMP evaluations in both the spatial and the temporal picture."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channels import KrausChannel, is_unitary
from .correlators import spatial_corr, temporal_corr_post
from .isomorphism import spatial_to_temporal, state_to_channel
from .matcore import ShapeError
from .states import SX, SZ, BipartiteState, Observable, PureBipartite, as_observable, werner

TSIRELSON = 2 * np.sqrt(2)


@dataclass(frozen=True, eq=False)
class ChshSettings:
    A1: Observable
    A2: Observable
    B1: Observable
    B2: Observable

    @classmethod
    def from_matrices(cls, a1, a2, b1, b2) -> "ChshSettings":
        return cls(*(as_observable(m) for m in (a1, a2, b1, b2)))

    def pairs(self):
        return [(self.A1, self.B1, 1), (self.A1, self.B2, 1), (self.A2, self.B1, 1), (self.A2, self.B2, -1)]


def singlet_optimal_settings() -> ChshSettings:
    """Settings reaching ``S = 2 sqrt 2`` on the singlet."""
    r = np.sqrt(2)
    return ChshSettings.from_matrices(SZ, SX, -(SZ + SX) / r, (SX - SZ) / r)


def phi_plus_optimal_settings() -> ChshSettings:
    """Settings reaching ``S = 2 sqrt 2`` on ``(|00> + |11>)/sqrt 2``."""
    r = np.sqrt(2)
    return ChshSettings.from_matrices(SZ, SX, (SZ + SX) / r, (SZ - SX) / r)


def chsh_spatial(rho_AB: BipartiteState, s: ChshSettings) -> float:
    return sum(sign * spatial_corr(rho_AB, a, b) for a, b, sign in s.pairs())


def chsh_temporal(ch: KrausChannel, s: ChshSettings, rho_in=None) -> float:
    """CHSH combination of temporal (Leggett-Garg type) correlations.

    ``s`` holds the *spatial* settings; the second-time observables are
    obtained by complex conjugation of ``B1``, ``B2``. ``rho_in`` defaults to
    the maximally mixed state, with no post-selection at the final time.
    """
    total = 0.0
    for a, b, sign in s.pairs():
        bundle = spatial_to_temporal(a, b, rho_in, None)
        total += sign * temporal_corr_post(bundle.rho_in, None, ch, bundle.O1, bundle.O2)
    return total


@dataclass(frozen=True)
class WernerScan:
    points: list[tuple[float, float]]
    threshold: float
    temporal_points: list[tuple[float, float]]
    temporal_threshold: float


def werner_scan(w_grid, settings: ChshSettings | None = None) -> WernerScan:
    """CHSH value of Werner states and of their channel images along ``w_grid``.

    The thresholds are the roots of ``|S(w)| = 2`` located by Brent's method.
    """
    s = singlet_optimal_settings() if settings is None else settings
    w_grid = [float(w) for w in w_grid]

    def spatial(w):
        return chsh_spatial(werner(w), s)

    def temporal(w):
        return chsh_temporal(state_to_channel(werner(w)), s)

    pts = [(w, spatial(w)) for w in w_grid]
    tpts = [(w, temporal(w)) for w in w_grid]
    thr = brentq(lambda w: abs(spatial(w)) - 2.0, 0.0, 1.0, xtol=1e-12)
    tthr = brentq(lambda w: abs(temporal(w)) - 2.0, 0.0, 1.0, xtol=1e-12)
    return WernerScan(pts, thr, tpts, tthr)


# CGLMP, d = 3

_D = 3
_OMEGA = np.exp(2j * np.pi / _D)
ALPHA = (0.0, 0.5)
BETA = (-0.25, 0.25)


def _fourier_basis(shift: float, sign: int) -> list[np.ndarray]:
    j = np.arange(_D)
    return [_OMEGA ** (sign * j * (k + shift)) / np.sqrt(_D) for k in range(_D)]


def cglmp_projectors():
    """Outcome projectors ``(A[a][k], B[b][l])`` of the standard CGLMP settings."""
    proj = lambda vs: [np.outer(v, v.conj()) for v in vs]
    a = [proj(_fourier_basis(al, +1)) for al in ALPHA]
    b = [proj(_fourier_basis(be, -1)) for be in BETA]
    return a, b


# (setting a, setting b, shift, sign): contributes sign * P(A_a = B_b + shift mod 3)
_CGLMP_TERMS = [
    (0, 0, 0, 1), (1, 0, -1, 1), (1, 1, 0, 1), (0, 1, 0, 1),
    (0, 0, -1, -1), (1, 0, 0, -1), (1, 1, -1, -1), (0, 1, 1, -1),
]


def cglmp_from_probabilities(prob) -> float:
    """``I_3`` from ``prob(a, b)`` returning the 3x3 joint outcome table."""
    tables = {(a, b): prob(a, b) for a in range(2) for b in range(2)}
    total = 0.0
    for a, b, shift, sign in _CGLMP_TERMS:
        p = tables[(a, b)]
        total += sign * sum(p[(l + shift) % _D, l] for l in range(_D))
    return float(total)


def schmidt_state(gamma) -> PureBipartite:
    """``sum_j gamma_j |jj>`` normalized; a scalar gives ``(1, gamma, 1)``."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    if g.size == 1:
        g = np.array([1.0, g[0], 1.0])
    if g.size != _D:
        raise ShapeError("need one or three Schmidt coefficients")
    return PureBipartite(np.diag(g / np.linalg.norm(g)).astype(np.complex128))


def cglmp3(rho_AB: BipartiteState | None = None, schmidt=None) -> float:
    """CGLMP ``I_3`` from weak spatial correlations of outcome projectors."""
    if rho_AB is None:
        if schmidt is None:
            raise ValueError("give a state or Schmidt coefficients")
        rho_AB = schmidt_state(schmidt).to_state()
    if rho_AB.dims != (_D, _D):
        raise ShapeError(f"CGLMP-3 needs a 3x3 state, got {rho_AB.dims}")
    pa, pb = cglmp_projectors()

    def prob(a, b):
        return np.array([[spatial_corr(rho_AB, pa[a][k], pb[b][l]) for l in range(_D)] for k in range(_D)])

    return cglmp_from_probabilities(prob)


def cglmp3_temporal(ch: KrausChannel, rho_in=None) -> float:
    if (ch.d_in, ch.d_out) != (_D, _D):
        raise ShapeError("CGLMP-3 needs a 3 -> 3 channel")
    pa, pb = cglmp_projectors()

    def prob(a, b):
        out = np.empty((_D, _D))
        for k in range(_D):
            for l in range(_D):
                bundle = spatial_to_temporal(pa[a][k], pb[b][l], rho_in, None)
                out[k, l] = temporal_corr_post(bundle.rho_in, None, ch, bundle.O1, bundle.O2)
        return out

    return cglmp_from_probabilities(prob)


def cglmp3_optimal_gamma(step: float = 1e-3, upper: float = 1.0) -> tuple[float, float]:
    """Scan ``gamma`` in ``[0, upper]`` for the state ``(|00> + gamma|11> + |22>)``."""
    grid = np.round(np.arange(0.0, upper + step / 2, step), 12)
    vals = [cglmp3(schmidt=g) for g in grid]
    k = int(np.argmax(vals))
    return float(grid[k]), float(vals[k])


@dataclass(frozen=True)
class AnomalyReport:
    spatial_max_entangled: float
    temporal_unitary: float
    optimal_gamma: float
    spatial_optimal: float
    temporal_optimal: float
    optimal_channel_unitary: bool
    max_entangled_channel_unitary: bool

    @property
    def anomaly(self) -> bool:
        return self.temporal_optimal > self.temporal_unitary > 2.0


def cglmp3_temporal_anomaly(step: float = 1e-3) -> AnomalyReport:
    me = schmidt_state(1.0).to_state()
    gamma, _ = cglmp3_optimal_gamma(step)
    opt = schmidt_state(gamma).to_state()
    ch_me = state_to_channel(me)
    ch_opt = state_to_channel(opt)
    return AnomalyReport(
        spatial_max_entangled=cglmp3(me),
        temporal_unitary=cglmp3_temporal(ch_me),
        optimal_gamma=gamma,
        spatial_optimal=cglmp3(opt),
        temporal_optimal=cglmp3_temporal(ch_opt),
        optimal_channel_unitary=is_unitary(ch_opt),
        max_entangled_channel_unitary=is_unitary(ch_me),
    )
