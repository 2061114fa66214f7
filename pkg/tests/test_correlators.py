import numpy as np
import pytest

from chronomap.channels import IncompatibleBoundaryError, identity_channel, make_channel, unitary_channel
from chronomap.correlators import (
    spatial_corr,
    spatial_single,
    temporal_corr,
    temporal_corr_post,
    temporal_single,
    tripartite_temporal,
)
from chronomap.isomorphism import spatial_to_temporal, state_to_channel
from chronomap.states import (
    SX,
    SZ,
    BipartiteState,
    DensityMatrix,
    PureBipartite,
    make_bipartite,
    random_density,
    random_hermitian,
    random_pm1_qubit_observable,
    random_unitary,
    singlet,
    werner,
)

P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
HALF = np.eye(2) / 2


def index_sum_ratio(alpha, ra, rb, oa, ob):
    """Numerator/denominator of the spatial correlation of a pure state written
    as explicit sums over amplitude indices; no Kronecker products involved."""
    acr = ra @ oa + oa @ ra
    bcr = rb @ ob + ob @ rb
    da, db = alpha.shape
    num = den = 0
    for i in range(da):
        for j in range(db):
            for k in range(da):
                for l in range(db):
                    w = alpha[i, j] * np.conj(alpha[k, l])
                    num += w * acr[k, i] * bcr[l, j]
                    den += w * ra[k, i] * rb[l, j]
    return (num / (4 * den)).real


def test_temporal_corr_examples(rng):
    ch = identity_channel(2)
    # (1/2) Tr[sz {sz, I/2}] = 1
    assert temporal_corr(HALF, ch, SZ, SZ) == pytest.approx(1, abs=1e-14)
    assert temporal_corr(HALF, ch, SZ, SX) == pytest.approx(0, abs=1e-14)


def test_unitary_pm1_state_independence(rng):
    for _ in range(20):
        u = random_unitary(2, rng)
        o1 = random_pm1_qubit_observable(rng).mat
        o2 = random_pm1_qubit_observable(rng).mat
        expected = 0.25 * np.trace(o1 @ u.conj().T @ o2 @ u + u.conj().T @ o2 @ u @ o1).real
        vals = [temporal_corr(random_density(2, rng), unitary_channel(u), o1, o2) for _ in range(30)]
        assert max(abs(v - expected) for v in vals) < 1e-10


def test_temporal_corr_post_examples(rng):
    for _ in range(20):
        d_in, d_out = (int(d) for d in rng.integers(2, 5, 2))
        mats = rng.standard_normal((2, d_out, d_in)) + 1j * rng.standard_normal((2, d_out, d_in))
        ch = make_channel(zip([0.3, 0.7], mats))
        rho = random_density(d_in, rng)
        o1, o2 = random_hermitian(d_in, rng), random_hermitian(d_out, rng)
        a = temporal_corr_post(rho, np.eye(d_out) / d_out, ch, o1, o2)
        assert a == pytest.approx(temporal_corr(rho, ch, o1, o2), abs=1e-12)
        assert temporal_corr_post(rho, None, ch, o1, o2) == pytest.approx(a, abs=1e-12)
    assert temporal_corr_post(P0, P0, identity_channel(2), SZ, SZ) == pytest.approx(1)
    with pytest.raises(IncompatibleBoundaryError):
        temporal_corr_post(P0, P1, identity_channel(2), SZ, SZ)


def test_spatial_corr_examples(rng):
    assert spatial_corr(singlet().to_state(), SZ, SZ) == pytest.approx(-1, abs=1e-14)
    ra, rb = random_density(2, rng), random_density(3, rng)
    prod = make_bipartite(np.kron(ra.mat, rb.mat), (2, 3))
    oa, ob = random_hermitian(2, rng), random_hermitian(3, rng)
    expected = np.trace(oa.mat @ ra.mat).real * np.trace(ob.mat @ rb.mat).real
    assert spatial_corr(prod, oa, ob) == pytest.approx(expected, abs=1e-12)
    for w in (0, 0.3, 0.5, 1):
        assert spatial_corr(werner(w), SZ, SZ) == pytest.approx(-w, abs=1e-14)


def test_spatial_corr_matches_index_sum_oracle(rng):
    for _ in range(50):
        da, db = (int(d) for d in rng.integers(2, 4, 2))
        a = rng.standard_normal((da, db)) + 1j * rng.standard_normal((da, db))
        psi = PureBipartite(a / np.linalg.norm(a))
        ra, rb = random_density(da, rng).mat, random_density(db, rng).mat
        oa, ob = random_hermitian(da, rng).mat, random_hermitian(db, rng).mat
        got = spatial_corr(psi.to_state(), oa, ob, ra, rb)
        assert got == pytest.approx(index_sum_ratio(psi.amplitudes, ra, rb, oa, ob), abs=1e-10)


def test_spatial_default_reduces_to_expectation(rng):
    worst = 0.0
    for _ in range(1000):
        da, db = (int(d) for d in rng.integers(2, 5, 2))
        rho = make_bipartite(random_density(da * db, rng).mat, (da, db))
        oa, ob = random_hermitian(da, rng).mat, random_hermitian(db, rng).mat
        expected = np.trace(np.kron(oa, ob) @ rho.mat).real
        worst = max(worst, abs(spatial_corr(rho, oa, ob) - expected))
    assert worst < 1e-12


def test_spatial_bilinear(rng):
    for _ in range(50):
        rho = make_bipartite(random_density(6, rng).mat, (2, 3))
        fa, fb = random_density(2, rng), random_density(3, rng)
        a1, a2 = random_hermitian(2, rng).mat, random_hermitian(2, rng).mat
        b1, b2 = random_hermitian(3, rng).mat, random_hermitian(3, rng).mat
        x, y = rng.standard_normal(2)
        lhs = spatial_corr(rho, x * a1 + y * a2, b1, fa, fb)
        rhs = x * spatial_corr(rho, a1, b1, fa, fb) + y * spatial_corr(rho, a2, b1, fa, fb)
        assert abs(lhs - rhs) < 1e-12
        lhs = spatial_corr(rho, a1, x * b1 + y * b2, fa, fb)
        rhs = x * spatial_corr(rho, a1, b1, fa, fb) + y * spatial_corr(rho, a1, b2, fa, fb)
        assert abs(lhs - rhs) < 1e-12


def test_singles_examples(rng):
    rho = random_density(3, rng)
    o = random_hermitian(3, rng)
    born = np.trace(o.mat @ rho.mat).real
    assert temporal_single(rho, None, identity_channel(3), o, "first") == pytest.approx(born, abs=1e-12)
    st = make_bipartite(random_density(6, rng).mat, (3, 2))
    expected = np.trace(np.kron(o.mat, np.eye(2)) @ st.mat).real
    assert spatial_single(st, o, "A") == pytest.approx(expected, abs=1e-12)
    assert spatial_single(singlet().to_state(), SZ, "A") == pytest.approx(0, abs=1e-14)
    prod = BipartiteState(DensityMatrix(np.kron(P0, P1)), 2, 2)
    assert spatial_single(prod, SZ, "B") == pytest.approx(-1)


def test_theorem_and_singles_small_sample(rng):
    for _ in range(200):
        da, db = (int(d) for d in rng.integers(2, 5, 2))
        rho = make_bipartite(random_density(da * db, rng).mat, (da, db))
        oa, ob = random_hermitian(da, rng), random_hermitian(db, rng)
        fa, fb = random_density(da, rng), random_density(db, rng)
        b = spatial_to_temporal(oa, ob, fa, fb)
        ch = state_to_channel(rho)
        assert abs(temporal_corr_post(b.rho_in, b.rho_fi, ch, b.O1, b.O2) - spatial_corr(rho, oa, ob, fa, fb)) < 1e-9
        assert abs(temporal_single(b.rho_in, b.rho_fi, ch, b.O1, "first") - spatial_single(rho, oa, "A", fa, fb)) < 1e-9
        assert abs(temporal_single(b.rho_in, b.rho_fi, ch, b.O2, "second") - spatial_single(rho, ob, "B", fa, fb)) < 1e-9


def test_tripartite_reduces_to_pairwise(rng):
    for _ in range(20):
        rho = random_density(3, rng)
        o2, o3 = random_hermitian(3, rng), random_hermitian(3, rng)
        pair = temporal_corr(rho, identity_channel(3), o2, o3)
        assert tripartite_temporal(rho, np.eye(3), o2, o3) == pytest.approx(pair, abs=1e-12)


def test_monogamy_violation():
    ch = identity_channel(2)
    assert temporal_corr(HALF, ch, SZ, SZ) == pytest.approx(1, abs=1e-12)
    assert tripartite_temporal(HALF, SZ, SZ, SZ) == pytest.approx(0, abs=1e-12)


def test_imaginary_residual_is_small(rng):
    # complex Hermitian inputs still give real traces
    rho = make_bipartite(random_density(9, rng).mat, (3, 3))
    spatial_corr(rho, random_hermitian(3, rng), random_hermitian(3, rng), random_density(3, rng), random_density(3, rng))


def test_order_dependence_search():
    from itertools import permutations

    from chronomap.correlators import order_dependence_search
    rho, obs, spread = order_dependence_search(seed=0)
    vals = [tripartite_temporal(rho, *p) for p in permutations(obs)]
    assert max(vals) - min(vals) == pytest.approx(spread) and spread > 0.1
    # all three observables commuting makes the ordering irrelevant
    diag = [np.diag(v) for v in ([1.0, -2.0], [0.5, 3.0], [-1.0, 1.0])]
    vals = [tripartite_temporal(np.diag([0.3, 0.7]), *p) for p in permutations(diag)]
    assert max(vals) - min(vals) < 1e-14
