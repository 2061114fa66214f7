"""Weak-measurement correlation functions in time and space.

All functions return real numbers. The underlying traces are real in exact
arithmetic; an imaginary part above round-off raises :class:`ImaginaryResidualError`.
"""

from __future__ import annotations

import numpy as np

from .channels import KrausChannel, IncompatibleBoundaryError, MIN_DENOMINATOR, kraus_sandwich, normalization_scalar
from .matcore import DomainError, ShapeError, anticommutator
from .states import BipartiteState, as_density, as_observable, maximally_mixed

IMAG_TOL = 1e-10


class ImaginaryResidualError(DomainError):
    pass


def _real(z, what: str) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise ImaginaryResidualError(f"{what}: imaginary residual {z.imag:.3e}")
    return z.real


def _tr(a, b) -> complex:
    """Tr[a b] without forming the product."""
    return np.einsum("ij,ji->", a, b)


def _temporal_inputs(rho_in, ch, O1=None, O2=None):
    rho_in = as_density(rho_in)
    if rho_in.dim != ch.d_in:
        raise ShapeError(f"rho_in has dim {rho_in.dim}, channel expects {ch.d_in}")
    o1 = None if O1 is None else as_observable(O1)
    o2 = None if O2 is None else as_observable(O2)
    if o1 is not None and o1.dim != ch.d_in:
        raise ShapeError(f"O1 has dim {o1.dim}, channel input is {ch.d_in}")
    if o2 is not None and o2.dim != ch.d_out:
        raise ShapeError(f"O2 has dim {o2.dim}, channel output is {ch.d_out}")
    return rho_in, o1, o2


def temporal_corr(rho_in, ch: KrausChannel, O1, O2) -> float:
    """Pointer correlation of weak measurements of ``O1`` before and ``O2`` after ``ch``."""
    rho_in, o1, o2 = _temporal_inputs(rho_in, ch, O1, O2)
    d = normalization_scalar(ch, rho_in)
    x = kraus_sandwich(ch, anticommutator(o1.mat, rho_in.mat))
    return _real(0.5 * _tr(o2.mat, x) / d, "temporal_corr")


def temporal_corr_post(rho_in, rho_fi, ch: KrausChannel, O1, O2) -> float:
    """Temporal correlation with post-selection on ``rho_fi``.

    ``rho_fi=None`` means no post-selection, equivalent to ``I/d_out``.
    """
    rho_in, o1, o2 = _temporal_inputs(rho_in, ch, O1, O2)
    rho_fi = maximally_mixed(ch.d_out) if rho_fi is None else as_density(rho_fi)
    d = normalization_scalar(ch, rho_in, rho_fi)
    x = kraus_sandwich(ch, anticommutator(o1.mat, rho_in.mat))
    num = _tr(rho_fi.mat, anticommutator(o2.mat, x))
    return _real(0.25 * num / d, "temporal_corr_post")


def temporal_single(rho_in, rho_fi, ch: KrausChannel, O, which: str = "first") -> float:
    """Mean of a single pointer, measuring ``O`` before (``first``) or after (``second``) ``ch``."""
    if which == "first":
        rho_in, o, _ = _temporal_inputs(rho_in, ch, O1=O)
    elif which == "second":
        rho_in, _, o = _temporal_inputs(rho_in, ch, O2=O)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    rho_fi = maximally_mixed(ch.d_out) if rho_fi is None else as_density(rho_fi)
    d = normalization_scalar(ch, rho_in, rho_fi)
    if which == "first":
        num = _tr(rho_fi.mat, kraus_sandwich(ch, anticommutator(o.mat, rho_in.mat)))
    else:
        num = _tr(rho_fi.mat, anticommutator(o.mat, kraus_sandwich(ch, rho_in.mat)))
    return _real(0.5 * num / d, "temporal_single")


def _spatial_filter(rho_AB: BipartiteState, rho_A_fi, rho_B_fi) -> np.ndarray:
    d_a, d_b = rho_AB.dims
    fa = maximally_mixed(d_a) if rho_A_fi is None else as_density(rho_A_fi)
    fb = maximally_mixed(d_b) if rho_B_fi is None else as_density(rho_B_fi)
    if fa.dim != d_a or fb.dim != d_b:
        raise ShapeError("post-selection dimensions do not match the bipartite state")
    return np.kron(fa.mat, fb.mat)


def _spatial_den(f, rho) -> float:
    den = _real(_tr(f, rho), "spatial denominator")
    if den <= MIN_DENOMINATOR:
        raise IncompatibleBoundaryError(
            f"incompatible boundary conditions: post-selection probability {den:.3e}"
        )
    return den


def spatial_corr(rho_AB: BipartiteState, O_A, O_B, rho_A_fi=None, rho_B_fi=None) -> float:
    """Correlation of space-like separated weak pointers on ``rho_AB``.

    Works with the full ``d_A d_B`` dimensional operators.
    """
    d_a, d_b = rho_AB.dims
    oa = as_observable(O_A)
    ob = as_observable(O_B)
    if oa.dim != d_a or ob.dim != d_b:
        raise ShapeError(f"observables of dims ({oa.dim}, {ob.dim}) for a {d_a}x{d_b} state")
    f = _spatial_filter(rho_AB, rho_A_fi, rho_B_fi)
    rho = rho_AB.mat
    big_a = np.kron(oa.mat, np.eye(d_b))
    big_b = np.kron(np.eye(d_a), ob.mat)
    num = _tr(f, anticommutator(big_b, anticommutator(big_a, rho)))
    return _real(num, "spatial_corr") / (4 * _spatial_den(f, rho))


def spatial_single(rho_AB: BipartiteState, O, party: str = "A", rho_A_fi=None, rho_B_fi=None) -> float:
    d_a, d_b = rho_AB.dims
    o = as_observable(O)
    if party == "A":
        if o.dim != d_a:
            raise ShapeError(f"observable dim {o.dim} != d_A {d_a}")
        big = np.kron(o.mat, np.eye(d_b))
    elif party == "B":
        if o.dim != d_b:
            raise ShapeError(f"observable dim {o.dim} != d_B {d_b}")
        big = np.kron(np.eye(d_a), o.mat)
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    f = _spatial_filter(rho_AB, rho_A_fi, rho_B_fi)
    num = _tr(f, anticommutator(big, rho_AB.mat))
    return _real(num, "spatial_single") / (2 * _spatial_den(f, rho_AB.mat))


def tripartite_temporal(rho_in, O1, O2, O3) -> float:
    """Three sequential weak measurements under trivial evolution: ``Tr[O3 {O2, {O1, rho}}] / 4``."""
    rho = as_density(rho_in).mat
    o1, o2, o3 = (as_observable(o).mat for o in (O1, O2, O3))
    if not (o1.shape == o2.shape == o3.shape == rho.shape):
        raise ShapeError("tripartite correlator needs equal dimensions")
    inner = anticommutator(o2, anticommutator(o1, rho))
    return _real(0.25 * _tr(o3, inner), "tripartite_temporal")


def order_dependence_search(seed: int = 0, max_trials: int = 1000, threshold: float = 0.1, dim: int = 2):
    """Random search for an instance whose tripartite correlation depends on the ordering.

    Returns ``(rho_in, (O1, O2, O3), spread)`` for the first instance where the
    largest and smallest value over all six orderings differ by more than
    ``threshold``; ``None`` when no such instance is found.
    """
    from itertools import permutations

    from .states import random_density, random_hermitian

    rng = np.random.default_rng(seed)
    for _ in range(max_trials):
        rho = random_density(dim, rng)
        obs = tuple(random_hermitian(dim, rng) for _ in range(3))
        vals = [tripartite_temporal(rho, *p) for p in permutations(obs)]
        spread = max(vals) - min(vals)
        if spread > threshold:
            return rho, obs, spread
    return None
