"""Weighted Kraus sets with state-dependent (selective) normalization.

A channel is a list of ``(p_z, M_z)`` pairs. The normalized operators
``sqrt(p_z) M_z / sqrt(D)`` are never stored: ``D`` depends on the boundary
states and is computed for each evaluation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .matcore import ShapeError, DomainError, as_cmatrix
from .states import DensityMatrix, as_density

MIN_DENOMINATOR = 1e-14
_NEG_WEIGHT_CLAMP = 1e-12


class IncompatibleBoundaryError(DomainError):
    """The post-selection probability of the boundary conditions vanishes."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    weights: np.ndarray  # (K,)
    kraus: np.ndarray  # (K, d_out, d_in)
    renormalized: bool = field(default=False)

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    @property
    def elements(self) -> list[tuple[float, np.ndarray]]:
        return [(float(p), m) for p, m in zip(self.weights, self.kraus)]

    def __len__(self) -> int:
        return len(self.weights)


def make_channel(elements) -> KrausChannel:
    """Build a validated channel from ``(weight, matrix)`` pairs.

    Weights that do not sum to one are rescaled, and the returned channel has
    ``renormalized=True`` (a ``RuntimeWarning`` is emitted as well). Negative
    weights within 1e-12 of zero are treated as round-off and clamped.
    """
    elements = list(elements)
    if not elements:
        raise DomainError("a channel needs at least one Kraus element")
    weights = np.array([float(p) for p, _ in elements])
    mats = [as_cmatrix(m) for _, m in elements]
    shape = mats[0].shape
    for k, m in enumerate(mats):
        if m.shape != shape:
            raise ShapeError(f"Kraus element {k} has shape {m.shape}, expected {shape}")
    if np.any(weights < -_NEG_WEIGHT_CLAMP):
        raise DomainError("Kraus weights must be non-negative")
    weights = np.clip(weights, 0.0, None)
    kraus = np.stack(mats)
    if not np.any(weights[:, None, None] * np.abs(kraus) > 0):
        raise DomainError("all Kraus elements are zero")
    total = weights.sum()
    renormalized = abs(total - 1.0) > 1e-10
    if renormalized:
        warnings.warn(f"Kraus weights sum to {total:.6g}; rescaled to 1", RuntimeWarning, stacklevel=2)
        weights = weights / total
    return KrausChannel(weights, kraus, renormalized)


def identity_channel(d: int) -> KrausChannel:
    return make_channel([(1.0, np.eye(d, dtype=np.complex128))])


def unitary_channel(u) -> KrausChannel:
    return make_channel([(1.0, u)])


def kraus_sandwich(ch: KrausChannel, x) -> np.ndarray:
    """``sum_z p_z M_z x M_z^dagger`` (no normalization)."""
    m = ch.kraus
    out = np.zeros((ch.d_out, ch.d_out), dtype=np.complex128)
    for p, mz in zip(ch.weights, m):
        if p:
            out += p * (mz @ x @ mz.conj().T)
    return out


def _check_dims(ch: KrausChannel, rho_in: DensityMatrix, rho_fi: DensityMatrix | None):
    if rho_in.dim != ch.d_in:
        raise ShapeError(f"rho_in has dim {rho_in.dim}, channel expects {ch.d_in}")
    if rho_fi is not None and rho_fi.dim != ch.d_out:
        raise ShapeError(f"rho_fi has dim {rho_fi.dim}, channel outputs {ch.d_out}")


def normalization_scalar(ch: KrausChannel, rho_in, rho_fi=None) -> float:
    """Common denominator ``D`` of the normalized Kraus operators.

    Without post-selection ``D = Tr[sum_z p_z M_z^dag M_z rho_in]``; with a
    final state ``D = Tr[rho_fi sum_z p_z M_z rho_in M_z^dag]``.
    """
    rho_in = as_density(rho_in)
    rho_fi = None if rho_fi is None else as_density(rho_fi)
    _check_dims(ch, rho_in, rho_fi)
    out = kraus_sandwich(ch, rho_in.mat)
    d = np.trace(out) if rho_fi is None else np.einsum("ij,ji->", rho_fi.mat, out)
    d = float(d.real)
    if d <= MIN_DENOMINATOR:
        raise IncompatibleBoundaryError(
            f"incompatible boundary conditions: post-selection probability {d:.3e}"
        )
    return d


def apply(ch: KrausChannel, rho_in, rho_fi=None) -> DensityMatrix:
    """Evolve ``rho_in`` through the normalized channel.

    ``rho_fi`` only checks that the post-selection is compatible with the
    evolved state; the returned state is always trace-normalized.
    """
    rho_in = as_density(rho_in)
    if rho_fi is not None:
        normalization_scalar(ch, rho_in, rho_fi)
    out = kraus_sandwich(ch, rho_in.mat)
    d = normalization_scalar(ch, rho_in)
    out = out / d
    return DensityMatrix((out + out.conj().T) / 2)


def is_trace_preserving(ch: KrausChannel, tol: float = 1e-8) -> bool:
    """True when the weights are uniform and ``sum_z M_z^dag M_z = I``."""
    if ch.d_in != ch.d_out:
        return False
    if np.max(np.abs(ch.weights - ch.weights.mean())) > 1e-10:
        return False
    s = np.einsum("zji,zjk->ik", ch.kraus.conj(), ch.kraus)
    return float(np.max(np.abs(s - np.eye(ch.d_in)))) <= tol


def is_unitary(ch: KrausChannel, tol: float = 1e-8) -> bool:
    """Single square Kraus element with ``M^dag M = c I``, ``c > 0``."""
    if len(ch) != 1 or ch.d_in != ch.d_out:
        return False
    m = ch.kraus[0]
    g = m.conj().T @ m
    c = np.trace(g).real / ch.d_in
    if c <= 0:
        return False
    return float(np.max(np.abs(g / c - np.eye(ch.d_in)))) <= tol
