"""Randomized equality suites comparing the temporal and spatial pictures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import make_channel
from .correlators import spatial_corr, spatial_single, temporal_corr_post, temporal_single
from .isomorphism import spatial_to_temporal, state_to_channel
from .pointer import finite_eps_corr, finite_eps_moments
from .states import Observable, make_bipartite, random_density, random_hermitian


@dataclass
class SuiteResult:
    name: str
    trials: int
    max_deviation: float
    tol: float
    deviations: list[float] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation < self.tol)

    def to_dict(self) -> dict:
        return {"suite": self.name, "trials": self.trials, "max_deviation": float(self.max_deviation),
                "tol": self.tol, "pass": self.passed}


def random_instance(rng: np.random.Generator, dims=(2, 3, 4)):
    """Random ``(rho_AB, O_A, O_B, rho_A_fi, rho_B_fi)``; each post-selection is None half the time."""
    d_a, d_b = (int(d) for d in rng.choice(dims, size=2))
    rho = make_bipartite(random_density(d_a * d_b, rng).mat, (d_a, d_b))
    oa = random_hermitian(d_a, rng)
    ob = random_hermitian(d_b, rng)
    fa = random_density(d_a, rng) if rng.random() < 0.5 else None
    fb = random_density(d_b, rng) if rng.random() < 0.5 else None
    return rho, oa, ob, fa, fb


def theorem1_suite(trials: int = 1000, dims=(2, 3, 4), seed: int = 0, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    devs = []
    for _ in range(trials):
        rho, oa, ob, fa, fb = random_instance(rng, dims)
        b = spatial_to_temporal(oa, ob, fa, fb)
        e_t = temporal_corr_post(b.rho_in, b.rho_fi, state_to_channel(rho), b.O1, b.O2)
        devs.append(abs(e_t - spatial_corr(rho, oa, ob, fa, fb)))
    return SuiteResult("theorem1", trials, max(devs), tol, devs)


def corollary2_suite(trials: int = 500, dims=(2, 3, 4), seed: int = 0, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    devs = []
    for _ in range(trials):
        rho, oa, ob, fa, fb = random_instance(rng, dims)
        b = spatial_to_temporal(oa, ob, fa, fb)
        ch = state_to_channel(rho)
        e1 = temporal_single(b.rho_in, b.rho_fi, ch, b.O1, "first")
        e2 = temporal_single(b.rho_in, b.rho_fi, ch, b.O2, "second")
        devs.append(max(abs(e1 - spatial_single(rho, oa, "A", fa, fb)),
                        abs(e2 - spatial_single(rho, ob, "B", fa, fb))))
    return SuiteResult("corollary2", trials, max(devs), tol, devs)


def unit_norm(o: Observable) -> Observable:
    return Observable(o.mat / np.max(np.abs(np.linalg.eigvalsh(o.mat))))


def oracle_instances(n: int = 50, seed: int = 7, d: int = 2):
    """Fixed suite of temporal instances with unit spectral-norm observables.

    Yields ``(rho_in, rho_fi, channel, O1, O2)``; odd instances carry a random
    mixed post-selection, even ones none.
    """
    out = []
    for s in range(n):
        rng = np.random.default_rng([seed, s])
        k = int(rng.integers(1, 4))
        shape = (k, d, d)
        mats = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        ch = make_channel(zip(rng.dirichlet(np.ones(k)), mats))
        rho = random_density(d, rng)
        fi = None if s % 2 == 0 else random_density(d, rng)
        out.append((rho, fi, ch, unit_norm(random_hermitian(d, rng)), unit_norm(random_hermitian(d, rng))))
    return out


def oracle_limit_suite(eps: float = 1e-4, n: int = 50, seed: int = 7, tol: float = 1e-4) -> SuiteResult:
    devs = []
    for rho, fi, ch, o1, o2 in oracle_instances(n, seed):
        devs.append(abs(finite_eps_corr(rho, fi, ch, o1, o2, eps) - temporal_corr_post(rho, fi, ch, o1, o2)))
    return SuiteResult("oracle-limit", n, max(devs), tol, devs)


def oracle_singles_suite(eps: float = 1e-6, n: int = 50, seed: int = 7, tol: float = 1e-5) -> SuiteResult:
    """Single-pointer means of the finite-strength model against the weak-limit formulas."""
    devs = []
    for rho, fi, ch, o1, o2 in oracle_instances(n, seed):
        m1, m2, _ = finite_eps_moments(rho, fi, ch, o1, o2, eps)
        devs.append(max(abs(m1 - temporal_single(rho, fi, ch, o1, "first")),
                        abs(m2 - temporal_single(rho, fi, ch, o2, "second"))))
    return SuiteResult("oracle-singles", n, max(devs), tol, devs)


def convergence_slope(instance, eps_values=(1e-1, 1e-2, 1e-3)) -> float:
    """Log-log slope of ``|E(eps) - E(0)|`` against ``eps``."""
    rho, fi, ch, o1, o2 = instance
    e0 = temporal_corr_post(rho, fi, ch, o1, o2)
    dev = [abs(finite_eps_corr(rho, fi, ch, o1, o2, e) - e0) for e in eps_values]
    return float(np.polyfit(np.log(eps_values), np.log(dev), 1)[0])


def suite_convergence_slope(instances, eps_values=(1e-1, 1e-2, 1e-3)) -> float:
    """Log-log slope of the suite's worst deviation ``max_k |E_k(eps) - E_k(0)|`` against ``eps``.

    Unlike :func:`convergence_slope` this is insensitive to single instances
    whose first-order coefficient happens to nearly vanish.
    """
    e0 = [temporal_corr_post(*inst) for inst in instances]
    dev = [max(abs(finite_eps_corr(*inst, e) - ref) for inst, ref in zip(instances, e0)) for e in eps_values]
    return float(np.polyfit(np.log(eps_values), np.log(dev), 1)[0])
