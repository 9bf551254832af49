"""Dense pure-state register over labelled qubits.

Basis convention: the leftmost label is the most significant bit of the
basis index, so ``|q1 q2 ... qn>`` reads left to right like the label list.
Gates sweep index pairs of the amplitude vector; no 2^n x 2^n matrices are
ever built.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence

import numpy as np

NORM_TOL = 1e-9
IMPOSSIBLE_TOL = 1e-12

_SQRT2_INV = 1 / sqrt(2)


class RegisterError(ValueError):
    """Bad label, shape mismatch or violated register precondition."""


class ImpossibleOutcomeError(RegisterError):
    """A projection onto an outcome whose probability is (numerically) zero."""


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(lbl) for lbl in labels)
    if len(set(labels)) != len(labels):
        raise RegisterError(f"duplicate qubit labels in {labels}")
    return labels


@dataclass(frozen=True)
class PureState:
    labels: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise RegisterError(
                f"{len(labels)} labels need {2 ** len(labels)} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise RegisterError(f"unknown qubit label {label!r}; register has {self.labels}") from None

    def amplitude(self, bitstring: str) -> complex:
        """Amplitude of the basis ket written as a bit string over ``labels``."""
        if len(bitstring) != self.num_qubits or set(bitstring) - {"0", "1"}:
            raise RegisterError(f"bad bit string {bitstring!r} for {self.num_qubits} qubits")
        return complex(self.amplitudes[int(bitstring, 2)])

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def nonzero_terms(self, tol: float = 1e-12) -> dict[str, complex]:
        n = self.num_qubits
        return {format(i, f"0{n}b"): complex(a)
                for i, a in enumerate(self.amplitudes) if abs(a) > tol}

    def reorder(self, labels: Sequence[str]) -> "PureState":
        """Same state, tensor factors permuted into ``labels`` order."""
        labels = _check_labels(labels)
        if sorted(labels) != sorted(self.labels):
            raise RegisterError(f"reorder needs a permutation of {self.labels}, got {labels}")
        axes = [self.position(lbl) for lbl in labels]
        return PureState(labels, np.transpose(self.tensor_view(), axes).reshape(-1))


@dataclass(frozen=True)
class DensityMatrix:
    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        m = np.asarray(self.entries, dtype=complex)
        dim = 2 ** len(labels)
        if m.shape != (dim, dim):
            raise RegisterError(f"density matrix over {len(labels)} qubits must be {dim}x{dim}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "entries", m)

    def check(self, tol: float = NORM_TOL) -> None:
        """Raise unless Hermitian, unit trace and PSD within ``tol``."""
        m = self.entries
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise RegisterError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > tol:
            raise RegisterError(f"density matrix trace is {np.trace(m).real:.3g}, not 1")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -tol:
            raise RegisterError("density matrix has a negative eigenvalue")

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def basis_state(labels: Sequence[str], bitstring: str) -> PureState:
    labels = _check_labels(labels)
    if len(bitstring) != len(labels) or set(bitstring) - {"0", "1"}:
        raise RegisterError(f"bit string {bitstring!r} does not match {len(labels)} labels")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[int(bitstring, 2) if labels else 0] = 1
    return PureState(labels, amps)


def _pair_slices(state: PureState, target: str) -> tuple[np.ndarray, tuple, tuple]:
    """Copy of the tensor plus index tuples selecting target=0 and target=1."""
    pos = state.position(target)
    psi = state.tensor_view().copy()
    lo = [slice(None)] * state.num_qubits
    hi = list(lo)
    lo[pos], hi[pos] = 0, 1
    return psi, tuple(lo), tuple(hi)


def apply_h(state: PureState, target: str) -> PureState:
    psi, lo, hi = _pair_slices(state, target)
    a, b = psi[lo].copy(), psi[hi].copy()
    psi[lo] = (a + b) * _SQRT2_INV
    psi[hi] = (a - b) * _SQRT2_INV
    return PureState(state.labels, psi.reshape(-1))


def apply_x(state: PureState, target: str) -> PureState:
    psi, lo, hi = _pair_slices(state, target)
    psi[lo], psi[hi] = psi[hi].copy(), psi[lo].copy()
    return PureState(state.labels, psi.reshape(-1))


def apply_z(state: PureState, target: str) -> PureState:
    psi, _, hi = _pair_slices(state, target)
    psi[hi] *= -1
    return PureState(state.labels, psi.reshape(-1))


def apply_cnot(state: PureState, control: str, target: str) -> PureState:
    if control == target:
        raise RegisterError(f"CNOT control and target are both {control!r}")
    c, t = state.position(control), state.position(target)
    psi = state.tensor_view().copy()
    idx10 = [slice(None)] * state.num_qubits
    idx11 = list(idx10)
    idx10[c] = idx11[c] = 1
    idx10[t], idx11[t] = 0, 1
    idx10, idx11 = tuple(idx10), tuple(idx11)
    psi[idx10], psi[idx11] = psi[idx11].copy(), psi[idx10].copy()
    return PureState(state.labels, psi.reshape(-1))


def tensor(left: PureState, right: PureState) -> PureState:
    overlap = set(left.labels) & set(right.labels)
    if overlap:
        raise RegisterError(f"cannot tensor registers sharing labels {sorted(overlap)}")
    return PureState(left.labels + right.labels, np.kron(left.amplitudes, right.amplitudes))


def _match_mask(state: PureState, targets: Sequence[str], bits: str) -> np.ndarray:
    if len(targets) != len(bits) or set(bits) - {"0", "1"}:
        raise RegisterError(f"bits {bits!r} do not match targets {list(targets)}")
    mask = np.ones((2,) * state.num_qubits, dtype=bool)
    for lbl, bit in zip(targets, bits):
        sel = [slice(None)] * state.num_qubits
        sel[state.position(lbl)] = 1 - int(bit)
        mask[tuple(sel)] = False
    return mask.reshape(-1)


def outcome_probability(state: PureState, targets: Sequence[str], bits: str) -> float:
    mask = _match_mask(state, targets, bits)
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def project(state: PureState, targets: Sequence[str], bits: str) -> tuple[float, PureState]:
    """Computational-basis projection of ``targets`` onto ``bits``.

    Returns the outcome probability and the renormalised post-measurement
    state.  Measured qubits stay in the register; see :func:`drop_qubits`.
    """
    mask = _match_mask(state, targets, bits)
    amps = np.where(mask, state.amplitudes, 0)
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob < IMPOSSIBLE_TOL:
        raise ImpossibleOutcomeError(
            f"outcome {bits} on {list(targets)} has probability {prob:.3g}")
    return prob, PureState(state.labels, amps / sqrt(prob))


def drop_qubits(state: PureState, targets: Sequence[str]) -> PureState:
    """Remove qubits that sit in a definite computational basis value.

    Raises if any target is not classical to within ``1 - 1e-9``: dropping an
    entangled or superposed qubit would silently discard information.
    """
    psi = state.tensor_view()
    idx: list = [slice(None)] * state.num_qubits
    for lbl in targets:
        pos = state.position(lbl)
        weights = np.sum(np.abs(np.moveaxis(psi, pos, 0).reshape(2, -1)) ** 2, axis=1)
        if max(weights) < 1 - NORM_TOL:
            raise RegisterError(
                f"qubit {lbl!r} is not in a definite basis state (P0={weights[0]:.3g}, P1={weights[1]:.3g})")
        idx[pos] = int(np.argmax(weights))
    kept = tuple(lbl for lbl in state.labels if lbl not in set(targets))
    amps = psi[tuple(idx)].reshape(-1)
    return PureState(kept, amps / np.linalg.norm(amps))


def to_density(state: PureState) -> DensityMatrix:
    v = state.amplitudes
    return DensityMatrix(state.labels, np.outer(v, v.conj()))


def partial_trace(state: PureState, keep: Sequence[str]) -> DensityMatrix:
    """Reduced density matrix of ``keep`` (in the given order)."""
    keep = _check_labels(keep)
    keep_pos = [state.position(lbl) for lbl in keep]
    rest = [i for i in range(state.num_qubits) if i not in keep_pos]
    psi = np.transpose(state.tensor_view(), keep_pos + rest).reshape(2 ** len(keep), -1)
    return DensityMatrix(keep, psi @ psi.conj().T)
