"""Small Hermitian linear algebra and the Uhlmann fidelity.

The eigensolver is a cyclic complex Jacobi sweep; matrices here are at most
4x4 so convergence takes a handful of sweeps.
"""
from __future__ import annotations

from math import hypot, sqrt

import numpy as np

from .statevec import DensityMatrix

HERMITIAN_TOL = 1e-9
NEG_EIG_TOL = 1e-9
# eigenvalues this far below the largest are round-off: sqrt would inflate
# 1e-17 noise to 3e-9
RANK_RTOL = 1e-13
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


class LinalgError(ValueError):
    pass


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        m = m.entries
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {m.shape}")
    return m


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition ``A = V diag(w) V^dagger`` of a Hermitian matrix.

    Eigenvalues come back in descending order with eigenvectors as the
    matching columns of ``V``.
    """
    a = _as_matrix(matrix)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise LinalgError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(MAX_SWEEPS):
        if _offdiag_norm(a) < OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                # rotate the real 2x2 block [[app, mag], [mag, aqq]] to diagonal
                tau = (a[q, q].real - a[p, p].real) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + hypot(1.0, tau))
                c = 1 / sqrt(1 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * phase.conjugate(), c * phase.conjugate()
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                a[p, q] = a[q, p] = 0
                col_p, col_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = col_p * g_pp + col_q * g_qp
                v[:, q] = col_p * g_pq + col_q * g_qq
    else:
        if _offdiag_norm(a) >= OFFDIAG_TOL * scale:
            raise LinalgError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def psd_sqrt(matrix) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    w, v = hermitian_eig(matrix)
    if w.size and w.min() < -NEG_EIG_TOL:
        raise LinalgError(f"matrix has eigenvalue {w.min():.3g} < 0")
    cutoff = RANK_RTOL * max(float(w[0]), 0.0) if w.size else 0.0
    w = np.where(w > cutoff, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma, rho_sqrt: np.ndarray | None = None) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2`` in [0, 1].

    ``rho_sqrt`` may be passed when the caller already holds ``sqrt(rho)``.
    """
    r, s = _as_matrix(rho), _as_matrix(sigma)
    if r.shape != s.shape:
        raise LinalgError(f"dimension mismatch: {r.shape} vs {s.shape}")
    sr = psd_sqrt(r) if rho_sqrt is None else rho_sqrt
    m = sr @ s @ sr
    m = (m + m.conj().T) / 2
    value = float(np.real(np.trace(psd_sqrt(m))) ** 2)
    return min(1.0, max(0.0, value))
