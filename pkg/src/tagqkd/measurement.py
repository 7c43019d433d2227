"""Bob's measurements on the post-selected pair.

Two procedures live here: the beamsplitter circuit that measures the encoded
qubit in an arbitrary basis with a Pauli-frame record, and the QKD
computational/diagonal measurement that can flag HH/VV contamination.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from tagqkd.pairstate import H, V, PairState, PolPairState
from tagqkd.qcore import SQRT_HALF, RngStream, Unitary2

CODE_TOL = 1e-12

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI["XZ"] = PAULI["X"] @ PAULI["Z"]

PLUS = np.array([1, 1], dtype=complex) * SQRT_HALF
MINUS = np.array([1, -1], dtype=complex) * SQRT_HALF

# (p, k) -> correction such that the branch-b2 photon is P(alpha|H> + beta|V>).
# p = 0 means photon A went to b1, so b2 holds photon B, which carries the
# logical value with H and V exchanged. Frozen from the brute-force oracle in
# tests/test_measurement.py.
PAULI_FRAME = {
    (0, 0): "X",
    (0, 1): "XZ",
    (1, 0): "I",
    (1, 1): "Z",
}


class Basis(enum.Enum):
    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"


class QkdOutcome(enum.Enum):
    BIT0 = 0
    BIT1 = 1
    CONTAMINATED = "contaminated"
    INCONCLUSIVE = "inconclusive"

    @property
    def bit(self) -> int | None:
        return self.value if isinstance(self.value, int) else None

    @classmethod
    def from_bit(cls, b: int) -> "QkdOutcome":
        return cls.BIT1 if b else cls.BIT0


@dataclass(frozen=True)
class BeamsplitterRecord:
    """Classical record of one pass through the beamsplitter circuit.

    ``p`` and ``k`` are None unless ``split``. ``final_outcome`` is the logical
    outcome (index into the target basis), or None when the pair did not split
    or the Pauli frame does not map the target basis onto itself.
    """

    split: bool
    p: int | None = None
    k: int | None = None
    final_outcome: int | None = None

    @property
    def success(self) -> bool:
        return self.final_outcome is not None


def pauli_frame(p: int, k: int) -> str:
    """Correction label in {I, X, Z, XZ} for the record ``(p, k)``."""
    return PAULI_FRAME[(int(p), int(k))]


def bloch_basis(theta: float, phi: float) -> np.ndarray:
    """Measurement basis along Bloch direction (theta, phi); columns are the two states."""
    m0 = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    m1 = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return np.column_stack([m0, m1])


def _basis_matrix(target) -> np.ndarray:
    if isinstance(target, Unitary2):
        return np.array(target.entries)
    m = np.asarray(target, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("target basis must be a 2x2 unitary (columns = basis states)")
    return m


def frame_relabeling(basis: np.ndarray, label: str) -> np.ndarray | None:
    """Permutation the Pauli frame induces on ``basis``, or None if it is not preserved.

    Entry ``j`` is the logical outcome to report when the physical photon is
    found in ``basis[:, j]``.
    """
    overlaps = np.abs(basis.conj().T @ PAULI[label] @ basis)
    perm = np.argmax(overlaps, axis=1)
    if np.allclose(overlaps[np.arange(2), perm], 1.0, atol=1e-9) and perm[0] != perm[1]:
        return perm
    return None


def beamsplitter_measure(state: PolPairState, target, rng: RngStream) -> BeamsplitterRecord:
    """One run of the symmetric-beamsplitter measurement circuit.

    The photons reach the beamsplitter at different times and are routed
    independently. When they split, the b1 photon is measured in {|+>, |->};
    the b2 photon is measured in ``target`` (2x2, columns = basis states) and
    the outcome is translated back to the logical qubit through the Pauli
    frame.
    """
    if state.contamination > CODE_TOL:
        raise ValueError("contaminated input: discard HH/VV content before this circuit")
    a_in_b1 = rng.bit() == 0
    b_in_b1 = rng.bit() == 0
    if a_in_b1 == b_in_b1:
        return BeamsplitterRecord(split=False)
    p = 0 if a_in_b1 else 1
    m = state.matrix
    # project the b1 photon onto |+>/|->; row index = photon A
    if p == 0:
        plus_branch, minus_branch = PLUS.conj() @ m, MINUS.conj() @ m
    else:
        plus_branch, minus_branch = m @ PLUS.conj(), m @ MINUS.conj()
    w_plus = float(np.vdot(plus_branch, plus_branch).real)
    w_minus = float(np.vdot(minus_branch, minus_branch).real)
    k = 0 if rng.uniform() * (w_plus + w_minus) < w_plus else 1
    remaining = plus_branch if k == 0 else minus_branch
    remaining = remaining / np.linalg.norm(remaining)

    basis = _basis_matrix(target)
    perm = frame_relabeling(basis, pauli_frame(p, k))
    if perm is None:
        return BeamsplitterRecord(split=True, p=p, k=k)
    probs = np.abs(basis.conj().T @ remaining) ** 2
    j = 0 if rng.uniform() * probs.sum() < probs[0] else 1
    return BeamsplitterRecord(split=True, p=p, k=k, final_outcome=int(perm[j]))


def beamsplitter_success_probability(target) -> float:
    """Exact success probability of :func:`beamsplitter_measure` for ``target``.

    Each split branch (p, k) has weight 1/8 for any code-space input.
    """
    basis = _basis_matrix(target)
    return sum(0.125 for lab in PAULI_FRAME.values() if frame_relabeling(basis, lab) is not None)


def qkd_probabilities(state: PolPairState, basis: Basis) -> dict[QkdOutcome, float]:
    m = state.matrix
    if basis is Basis.DIAGONAL:
        m = HADAMARD @ m @ HADAMARD.T
        same = abs(m[H, H]) ** 2 + abs(m[V, V]) ** 2
        diff = abs(m[H, V]) ** 2 + abs(m[V, H]) ** 2
        return {QkdOutcome.BIT0: same, QkdOutcome.BIT1: diff, QkdOutcome.CONTAMINATED: 0.0}
    return {
        QkdOutcome.BIT0: abs(m[H, V]) ** 2,
        QkdOutcome.BIT1: abs(m[V, H]) ** 2,
        QkdOutcome.CONTAMINATED: abs(m[H, H]) ** 2 + abs(m[V, V]) ** 2,
    }


def qkd_measure(state: PolPairState, basis: Basis, rng: RngStream) -> QkdOutcome:
    """Polarization readout of both photons, after H x H for the diagonal basis.

    Computational: HV -> bit 0, VH -> bit 1, HH/VV -> contaminated.
    Diagonal: equal polarizations -> bit 0 (Psi+), different -> bit 1 (Psi-).
    """
    probs = qkd_probabilities(state, basis)
    outcomes = list(probs)
    weights = np.array([probs[o] for o in outcomes])
    r = rng.uniform() * weights.sum()
    idx = int(np.searchsorted(np.cumsum(weights), r, side="right"))
    return outcomes[min(idx, len(outcomes) - 1)]


def random_phase_gate(state, theta: float):
    """Phase ``e^{i theta n_V}`` where n_V counts V-polarized photons.

    Accepts a :class:`PolPairState` or a full :class:`PairState`.
    """
    n_v = np.add.outer([0, 1], [0, 1])
    if isinstance(state, PolPairState):
        return PolPairState(state.matrix * np.exp(1j * theta * n_v))
    if isinstance(state, PairState):
        phase = np.exp(1j * theta * n_v)[:, None, :, None]
        return PairState(state.amplitudes * phase)
    raise TypeError(f"unsupported state type {type(state).__name__}")
