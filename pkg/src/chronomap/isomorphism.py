"""State <-> channel correspondence and the matching of observables/boundaries.

A pure state ``sum_ij a_ij |i>|j>`` maps to the single Kraus operator
``M = a^dagger`` (shape d_B x d_A). Mixed states map through their spectral
ensemble to weighted Kraus sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, make_channel
from .matcore import DomainError, ShapeError, herm_eig
from .states import (
    BipartiteState,
    DensityMatrix,
    Observable,
    PureBipartite,
    as_density,
    as_observable,
    conj_obs,
    conj_state,
    maximally_mixed,
)

EIG_CLAMP = 1e-12


@dataclass(frozen=True, eq=False)
class CorrespondenceBundle:
    O1: Observable
    O2: Observable
    rho_in: DensityMatrix
    rho_fi: DensityMatrix


def pure_to_kraus(psi: PureBipartite) -> np.ndarray:
    return psi.amplitudes.conj().T.copy()


def kraus_to_pure(m) -> PureBipartite:
    """Inverse of :func:`pure_to_kraus` after Frobenius normalization."""
    m = np.asarray(m, dtype=np.complex128)
    nrm = np.linalg.norm(m)
    if nrm == 0:
        raise DomainError("zero Kraus operator has no associated state")
    return PureBipartite(m.conj().T / nrm)


def state_to_channel(rho_AB: BipartiteState) -> KrausChannel:
    """Spectral ensemble of ``rho_AB`` mapped element-wise to Kraus operators."""
    lam, vecs = herm_eig(rho_AB.mat)
    lam = np.clip(lam, 0.0, None)
    keep = lam > EIG_CLAMP
    elements = []
    for p, v in zip(lam[keep], vecs[:, keep].T):
        alpha = v.reshape(rho_AB.d_A, rho_AB.d_B)
        elements.append((p, alpha.conj().T))
    # tiny clamped eigenvalues shift the weight sum only at round-off level
    total = sum(p for p, _ in elements)
    return make_channel([(p / total, m) for p, m in elements])


def channel_to_state(ch: KrausChannel) -> BipartiteState:
    d_a, d_b = ch.d_in, ch.d_out
    norms2 = np.array([np.sum(np.abs(m) ** 2) for m in ch.kraus])
    w = ch.weights * norms2
    if w.sum() <= 0:
        raise DomainError("channel has no nonzero weighted Kraus element")
    w = w / w.sum()
    rho = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for wz, m, n2 in zip(w, ch.kraus, norms2):
        if wz == 0:
            continue
        v = (m.conj().T / np.sqrt(n2)).reshape(-1)
        rho += wz * np.outer(v, v.conj())
    return BipartiteState(DensityMatrix(rho), d_a, d_b)


def spatial_to_temporal(O_A, O_B, rho_A_fi=None, rho_B_fi=None) -> CorrespondenceBundle:
    """Temporal observables and boundary states matching a spatial setting.

    Missing post-selections default to the maximally mixed state.
    """
    O_A = as_observable(O_A)
    O_B = as_observable(O_B)
    rho_A_fi = maximally_mixed(O_A.dim) if rho_A_fi is None else as_density(rho_A_fi)
    rho_B_fi = maximally_mixed(O_B.dim) if rho_B_fi is None else as_density(rho_B_fi)
    if rho_A_fi.dim != O_A.dim or rho_B_fi.dim != O_B.dim:
        raise ShapeError("post-selection dimensions do not match the observables")
    return CorrespondenceBundle(O_A, conj_obs(O_B), rho_A_fi, conj_state(rho_B_fi))


def swap_party_channel(ch: KrausChannel) -> KrausChannel:
    return KrausChannel(ch.weights.copy(), np.ascontiguousarray(ch.kraus.transpose(0, 2, 1)), ch.renormalized)


def swap_parties(state: BipartiteState) -> BipartiteState:
    """Exchange the tensor factors of a bipartite state."""
    d_a, d_b = state.dims
    t = state.mat.reshape(d_a, d_b, d_a, d_b).transpose(1, 0, 3, 2)
    return BipartiteState(DensityMatrix(t.reshape(d_a * d_b, d_a * d_b)), d_b, d_a)
