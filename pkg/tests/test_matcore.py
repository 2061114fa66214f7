import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chronomap.matcore import DomainError, ShapeError, anticommutator, herm_eig, kron, partial_trace
from chronomap.states import I2, SX, SZ

P0 = np.diag([1, 0]).astype(complex)


def brute_kron(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(rb):
            for k in range(ca):
                for l in range(cb):
                    out[i * rb + j, k * cb + l] = a[i, k] * b[j, l]
    return out


def brute_ptrace_b(m, da, db):
    out = np.zeros((da, da), dtype=complex)
    for i in range(da):
        for k in range(da):
            out[i, k] = sum(m[i * db + j, k * db + j] for j in range(db))
    return out


def random_herm(rng, n):
    g = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    return (g + g.conj().T) / 2


def test_anticommutator_examples():
    assert np.allclose(anticommutator(SX, SZ), 0)
    a = np.arange(9).reshape(3, 3) + 1j
    assert np.allclose(anticommutator(a, np.eye(3)), 2 * a)
    assert np.allclose(anticommutator(SZ, P0), 2 * P0)


def test_anticommutator_shape_error():
    with pytest.raises(ShapeError):
        anticommutator(np.eye(2), np.eye(3))
    with pytest.raises(ShapeError):
        anticommutator(np.ones((2, 3)), np.ones((2, 3)))


def test_kron_examples():
    assert np.array_equal(kron(I2, I2), np.eye(4))
    assert np.array_equal(kron(SZ, I2), np.diag([1, 1, -1, -1]))
    got = kron(P0, SX)
    assert np.array_equal(got, brute_kron(P0, SX))
    assert np.array_equal(got[:2, :2], SX)
    assert np.all(got[2:, :] == 0) and np.all(got[:, 2:] == 0)


def test_kron_rectangular_matches_brute(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    b = rng.standard_normal((3, 1)) + 1j * rng.standard_normal((3, 1))
    assert np.allclose(kron(a, b), brute_kron(a, b), atol=1e-14)


int_mats = arrays(np.int64, st.tuples(st.integers(1, 3), st.integers(1, 3)), elements=st.integers(-5, 5))


@given(int_mats, int_mats, int_mats)
def test_kron_associative(a, b, c):
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_partial_trace_examples(rng):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(phi, phi), (2, 2), "B"), I2 / 2)
    ra = random_herm(rng, 3) + 3 * np.eye(3)
    ra /= np.trace(ra)
    rb = random_herm(rng, 2) + 2 * np.eye(2)
    rb /= np.trace(rb)
    assert np.allclose(partial_trace(np.kron(ra, rb), (3, 2), "B"), ra, atol=1e-12)
    assert np.allclose(partial_trace(np.kron(ra, rb), (3, 2), "A"), rb, atol=1e-12)
    m = random_herm(rng, 4)
    assert np.isclose(np.trace(partial_trace(m, (2, 2), "B")), np.trace(m))


def test_partial_trace_matches_brute(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.allclose(partial_trace(m, (2, 3), "B"), brute_ptrace_b(m, 2, 3), atol=1e-13)
    swap = np.zeros((6, 6))
    for i in range(2):
        for j in range(3):
            swap[j * 2 + i, i * 3 + j] = 1
    assert np.allclose(partial_trace(m, (2, 3), "A"), brute_ptrace_b(swap @ m @ swap.T, 3, 2), atol=1e-13)


def test_partial_trace_bad_dims():
    with pytest.raises(ShapeError):
        partial_trace(np.eye(6), (2, 2))


@settings(max_examples=50)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31))
def test_partial_trace_of_product(da, db, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((da, da)) + 1j * rng.standard_normal((da, da))
    b = random_herm(rng, db) + db * np.eye(db)
    b /= np.trace(b)
    assert np.max(np.abs(partial_trace(np.kron(a, b), (da, db), "B") - a)) < 1e-12


@settings(max_examples=50)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_anticommutator_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    x = anticommutator(random_herm(rng, n), random_herm(rng, n))
    assert np.max(np.abs(x - x.conj().T)) < 1e-12


def test_herm_eig_examples():
    w, v = herm_eig(SZ)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v, np.eye(2))
    w, v = herm_eig(np.eye(3))
    assert np.allclose(w, 1)
    assert np.array_equal(v, np.eye(3))


@pytest.mark.parametrize("n", [2, 6, 9])
def test_herm_eig_reconstruction(rng, n):
    m = random_herm(rng, n)
    w, v = herm_eig(m)
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - m) < 1e-10
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_herm_eig_degenerate_basis_is_canonical(rng):
    # same eigenspaces under a random unitary rotation of the degenerate block
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    m1 = q @ np.diag([2.0, 1.0, 1.0, 0.0]) @ q.conj().T
    u2 = np.eye(4, dtype=complex)
    u2[1:3, 1:3] = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    m2 = (q @ u2) @ np.diag([2.0, 1.0, 1.0, 0.0]) @ (q @ u2).conj().T
    _, v1 = herm_eig(m1)
    _, v2 = herm_eig(m2)
    assert np.allclose(v1, v2, atol=1e-9)
    for k in range(4):
        first = v1[np.flatnonzero(np.abs(v1[:, k]) > 1e-10)[0], k]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(DomainError):
        herm_eig(np.array([[0, 1], [0, 0]]))
