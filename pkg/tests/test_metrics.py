from math import sqrt

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from twoway_teleport import metrics, statevec as sv
from twoway_teleport.metrics import LinalgError, fidelity, hermitian_eig, psd_sqrt

from conftest import random_density, random_state

seeds = st.integers(0, 2 ** 32 - 1)


def random_hermitian(n, rng):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m + m.conj().T


def scipy_fidelity(rho, sigma):
    # independent route: scipy's Schur-based sqrtm
    sr = scipy.linalg.sqrtm(rho)
    return float(np.real(np.trace(scipy.linalg.sqrtm(sr @ sigma @ sr))) ** 2)


def gate_set_unitary(rng, depth=12):
    """Random 2-qubit circuit over H, X, Z, CNOT as a dense matrix."""
    h = np.array([[1, 1], [1, -1]]) / sqrt(2)
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    cnots = [np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
             np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])]
    u = np.eye(4, dtype=complex)
    for _ in range(depth):
        k = rng.integers(0, 5)
        if k < 3:
            g = (h, x, z)[k]
            u = (np.kron(g, np.eye(2)) if rng.integers(0, 2) else np.kron(np.eye(2), g)) @ u
        else:
            u = cnots[k - 3] @ u
    return u


def test_eig_diagonal():
    w, v = hermitian_eig(np.diag([0.3, 0.7]))
    np.testing.assert_allclose(w, [0.7, 0.3])
    np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]])


def test_eig_rank_one_projector():
    w, _ = hermitian_eig(np.full((2, 2), 0.5))
    np.testing.assert_allclose(w, [1, 0], atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_eig_reconstruction(n, rng):
    for _ in range(20):
        a = random_hermitian(n, rng)
        w, v = hermitian_eig(a)
        assert np.all(np.diff(w) <= 0)
        np.testing.assert_allclose((v * w) @ v.conj().T, a, atol=1e-9)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-9)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-9)


def test_eig_degenerate_spectrum(rng):
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    a = q @ np.diag([0.5, 0.5, 0, 0]) @ q.conj().T
    w, v = hermitian_eig(a)
    np.testing.assert_allclose(w, [0.5, 0.5, 0, 0], atol=1e-12)
    np.testing.assert_allclose((v * w) @ v.conj().T, a, atol=1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(LinalgError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(LinalgError):
        hermitian_eig(np.ones((2, 3)))


def test_eig_accepts_density_matrix():
    rho = sv.to_density(sv.basis_state(["q"], "1"))
    w, _ = hermitian_eig(rho)
    np.testing.assert_allclose(w, [1, 0])


def test_sqrt_diagonal():
    np.testing.assert_allclose(psd_sqrt(np.diag([4, 9]) / 13), np.diag([2, 3]) / sqrt(13), atol=1e-12)


def test_sqrt_scalar():
    np.testing.assert_allclose(psd_sqrt(np.eye(4) / 4), np.eye(4) / 2, atol=1e-12)


def test_sqrt_squares_back(rng):
    for rank in (1, 2, 4):
        a = random_density(4, rng, rank)
        r = psd_sqrt(a)
        np.testing.assert_allclose(r @ r, a, atol=1e-9)
        np.testing.assert_allclose(r, r.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(r).min() > -1e-9
        if rank == 4:
            np.testing.assert_allclose(r, scipy.linalg.sqrtm(a), atol=1e-9)


def test_sqrt_clamps_tiny_negative():
    a = np.diag([1.0, -5e-10])
    np.testing.assert_allclose(psd_sqrt(a), np.diag([1.0, 0.0]))


def test_sqrt_rejects_negative():
    with pytest.raises(LinalgError):
        psd_sqrt(np.diag([1.0, -1e-3]))


def test_fidelity_self(rng):
    for rank in (1, 2, 4):
        rho = random_density(4, rng, rank)
        assert fidelity(rho, rho) == pytest.approx(1, abs=1e-9)


def test_fidelity_orthogonal():
    zero = sv.to_density(sv.basis_state(["q"], "0"))
    one = sv.to_density(sv.basis_state(["q"], "1"))
    assert fidelity(zero, one) == pytest.approx(0, abs=1e-12)


def test_fidelity_against_maximally_mixed(rng):
    for _ in range(5):
        psi = random_state(["a", "b"], rng)
        assert fidelity(np.eye(4) / 4, sv.to_density(psi)) == pytest.approx(0.25, abs=1e-9)


def test_fidelity_pure_is_squared_overlap(rng):
    for _ in range(50):
        u, v = random_state(["a", "b"], rng), random_state(["a", "b"], rng)
        overlap = abs(np.vdot(u.amplitudes, v.amplitudes)) ** 2
        assert fidelity(sv.to_density(u), sv.to_density(v)) == pytest.approx(overlap, abs=1e-9)


def test_fidelity_matches_scipy_route(rng):
    for _ in range(30):
        rho, sigma = random_density(4, rng), random_density(4, rng)
        assert fidelity(rho, sigma) == pytest.approx(scipy_fidelity(rho, sigma), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_fidelity_symmetric_and_unitarily_invariant(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(4, rng, rng.integers(1, 5)), random_density(4, rng, rng.integers(1, 5))
    f = fidelity(rho, sigma)
    assert 0 <= f <= 1
    assert fidelity(sigma, rho) == pytest.approx(f, abs=1e-9)
    u = gate_set_unitary(rng)
    assert fidelity(u @ rho @ u.conj().T, u @ sigma @ u.conj().T) == pytest.approx(f, abs=1e-9)


def test_fidelity_global_phase_invariant(rng):
    psi = random_state(["a", "b"], rng)
    shifted = sv.PureState(psi.labels, np.exp(0.83j) * psi.amplitudes)
    assert fidelity(sv.to_density(psi), sv.to_density(shifted)) == pytest.approx(1, abs=1e-12)


def test_fidelity_dimension_mismatch():
    with pytest.raises(LinalgError):
        fidelity(np.eye(2) / 2, np.eye(4) / 4)


def test_fidelity_precomputed_root(rng):
    rho, sigma = random_density(4, rng, 1), random_density(4, rng)
    assert fidelity(rho, sigma, rho_sqrt=psd_sqrt(rho)) == fidelity(rho, sigma)


def test_max_sweeps_guard(monkeypatch, rng):
    monkeypatch.setattr(metrics, "MAX_SWEEPS", 0)
    with pytest.raises(LinalgError):
        hermitian_eig(random_hermitian(4, rng))
