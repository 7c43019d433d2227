"""Joint polarization x time-bin state of a photon pair.

Photon A is emitted first and photon B ``pair_separation`` later. Each photon
carries a polarization (H=0, V=1) and a tag count tau in {0, 1, 2}: the number
of tag delays it has been through. The amplitude tensor is indexed
``[pol_A, tau_A, pol_B, tau_B]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from tagqkd.qcore import EXACT_TOL, Unitary2, bell_decompose

H, V = 0, 1
MAX_TAGS = 2
N_BINS = MAX_TAGS + 1
EMPTY_TOL = 1e-15
NORM_TOL = 1e-9

POL_LABELS = ("H", "V")
# Ordering of the post-selected amplitudes gamma_1..gamma_4.
GAMMA_ORDER = ((H, V), (V, H), (V, V), (H, H))


@dataclass(frozen=True)
class TimingConfig:
    pair_separation: float = 10.0
    tag_delay: float = 1.0

    def __post_init__(self):
        if self.pair_separation <= 0 or self.tag_delay <= 0:
            raise ValueError("pair_separation and tag_delay must be positive")
        if not 2 * self.tag_delay < self.pair_separation:
            raise ValueError(
                "tags could reorder the photons: need 2 * tag_delay < pair_separation"
            )


@dataclass(frozen=True)
class TagSpec:
    """Delay applied to photons polarized along ``axis``, with arm phase ``phase``."""

    axis: int
    phase: float = 0.0

    def __post_init__(self):
        if self.axis not in (H, V):
            raise ValueError(f"tag axis must be H (0) or V (1), got {self.axis!r}")


class PairState:
    """Immutable 36-amplitude pair state."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        amps = np.array(amplitudes, dtype=complex).reshape(2, N_BINS, 2, N_BINS)
        amps.setflags(write=False)
        self.amplitudes = amps

    @classmethod
    def ket(cls, pol_a: int, tau_a: int, pol_b: int, tau_b: int) -> "PairState":
        amps = np.zeros((2, N_BINS, 2, N_BINS), dtype=complex)
        amps[pol_a, tau_a, pol_b, tau_b] = 1
        return cls(amps)

    @classmethod
    def from_terms(cls, terms: dict) -> "PairState":
        """Build from ``{(pol_a, tau_a, pol_b, tau_b): amplitude}``."""
        amps = np.zeros((2, N_BINS, 2, N_BINS), dtype=complex)
        for idx, c in terms.items():
            amps[idx] += c
        return cls(amps)

    def amp(self, pol_a: int, tau_a: int, pol_b: int, tau_b: int) -> complex:
        return complex(self.amplitudes[pol_a, tau_a, pol_b, tau_b])

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: "PairState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "PairState") -> float:
        return abs(self.overlap(other)) ** 2

    def __add__(self, other: "PairState") -> "PairState":
        return PairState(self.amplitudes + other.amplitudes)

    def __mul__(self, c: complex) -> "PairState":
        return PairState(self.amplitudes * c)

    __rmul__ = __mul__

    def terms(self, tol: float = EXACT_TOL) -> dict:
        """Nonzero amplitudes keyed by ``(pol_a, tau_a, pol_b, tau_b)``."""
        nz = np.argwhere(np.abs(self.amplitudes) > tol)
        return {tuple(int(i) for i in idx): self.amplitudes[tuple(idx)] for idx in nz}

    def __repr__(self):
        parts = [
            f"({c:.4g})|{POL_LABELS[pa]},{ta};{POL_LABELS[pb]},{tb}>"
            for (pa, ta, pb, tb), c in self.terms().items()
        ]
        return "PairState(" + " + ".join(parts) + ")"


class PolPairState:
    """Post-selected two-photon polarization state.

    Stored as a 2x2 array indexed ``[pol_A, pol_B]``; :attr:`gamma` exposes the
    amplitudes in the order (HV, VH, VV, HH).
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex).reshape(2, 2)
        m.setflags(write=False)
        self.matrix = m

    @classmethod
    def from_gamma(cls, g1, g2, g3=0.0, g4=0.0) -> "PolPairState":
        m = np.zeros((2, 2), dtype=complex)
        for idx, c in zip(GAMMA_ORDER, (g1, g2, g3, g4)):
            m[idx] = c
        return cls(m)

    @classmethod
    def from_vector(cls, vec) -> "PolPairState":
        """From a 4-vector in the ``2*pol_A + pol_B`` ordering (HH, HV, VH, VV)."""
        return cls(np.asarray(vec, dtype=complex).reshape(2, 2))

    @property
    def gamma(self) -> np.ndarray:
        return np.array([self.matrix[idx] for idx in GAMMA_ORDER])

    @property
    def vector(self) -> np.ndarray:
        return self.matrix.reshape(4)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    @property
    def contamination(self) -> float:
        """Weight outside span{HV, VH}."""
        return float(abs(self.matrix[H, H]) ** 2 + abs(self.matrix[V, V]) ** 2)

    def fidelity(self, other: "PolPairState") -> float:
        return abs(np.vdot(self.matrix, other.matrix)) ** 2

    def __repr__(self):
        g = ", ".join(f"{c:.4g}" for c in self.gamma)
        return f"PolPairState(gamma=[{g}])"


def _require_unitary(u) -> np.ndarray:
    # Unitary2 validates on construction; raw matrices are validated here.
    if not isinstance(u, Unitary2):
        u = Unitary2(u)
    return u.entries


def apply_tag(state: PairState, spec: TagSpec) -> PairState:
    """Delay every photon polarized along ``spec.axis`` by one tag step."""
    amps = state.amplitudes
    ax = spec.axis
    if amps[ax, MAX_TAGS].any() or amps[:, :, ax, MAX_TAGS].any():
        raise ValueError("tag overflow: a photon would exceed two tag delays")
    shift = np.exp(1j * spec.phase)
    out = amps.copy()
    # photon A
    out[ax, 1:, :, :] = out[ax, :-1, :, :] * shift
    out[ax, 0, :, :] = 0
    # photon B
    out[:, :, ax, 1:] = out[:, :, ax, :-1] * shift
    out[:, :, ax, 0] = 0
    return PairState(out)


def encode(alpha: complex, beta: complex, alice_phase: float = 0.0) -> PairState:
    """Alice's tagged state ``alpha|H,0;V,1> + beta|V,1;H,0>`` (times e^{i phase})."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > NORM_TOL:
        raise ValueError("(alpha, beta) must satisfy |alpha|^2 + |beta|^2 = 1")
    raw = PairState.from_terms({(H, 0, V, 0): alpha, (V, 0, H, 0): beta})
    return apply_tag(raw, TagSpec(V, alice_phase))


def apply_collective(state: PairState, u: Unitary2) -> PairState:
    """Apply ``U`` to both photons' polarization; tag counts untouched."""
    m = _require_unitary(u)
    return PairState(np.einsum("ai,bj,isjt->asbt", m, m, state.amplitudes))


def apply_single(state: PairState, slot: str, u: Unitary2) -> PairState:
    """Apply ``U`` to photon ``slot`` ('A' or 'B') only."""
    m = _require_unitary(u)
    if slot == "A":
        out = np.einsum("ai,isjt->asjt", m, state.amplitudes)
    elif slot == "B":
        out = np.einsum("bj,isjt->isbt", m, state.amplitudes)
    else:
        raise ValueError(f"slot must be 'A' or 'B', got {slot!r}")
    return PairState(out)


def arrival_separation(tau_a: int, tau_b: int, timing: TimingConfig) -> float:
    """Time between the two photon arrivals."""
    if not (0 <= tau_a <= MAX_TAGS and 0 <= tau_b <= MAX_TAGS):
        raise ValueError("tag counts must lie in {0, 1, 2}")
    return timing.pair_separation + (tau_b - tau_a) * timing.tag_delay


@lru_cache(maxsize=None)
def _accepted_bins(timing: TimingConfig) -> tuple[tuple[int, int], ...]:
    return tuple(
        (tau_a, tau_b)
        for tau_a in range(N_BINS)
        for tau_b in range(N_BINS)
        if arrival_separation(tau_a, tau_b, timing) == timing.pair_separation
    )


def postselect(
    state: PairState, timing: TimingConfig | None = None
) -> tuple[PolPairState | None, float]:
    """Keep only pairs arriving exactly ``pair_separation`` apart.

    Returns
    -------
    (PolPairState or None, float)
        Renormalized polarization state on the accepted kets and the
        acceptance probability. The state is None when the probability is
        below 1e-15 (the pair is always discarded).

    Raises
    ------
    ValueError
        If the accepted amplitude is spread over several absolute tag levels;
        such content is a time-bin mixture and has no pure polarization state.
        The encode/noise/tag pipeline never produces it.
    """
    timing = timing or TimingConfig()
    amps = state.amplitudes
    accepted = None
    levels = 0
    prob = 0.0
    for tau_a, tau_b in _accepted_bins(timing):
        block = amps[:, tau_a, :, tau_b]
        w = float(np.vdot(block, block).real)
        if w > EMPTY_TOL:
            levels += 1
            accepted = block
        prob += w
    if prob < EMPTY_TOL:
        return None, prob
    if levels > 1:
        raise ValueError("accepted content spans several tag levels")
    return PolPairState(accepted / np.sqrt(prob)), prob


def postselect_probability_closed_form(u: Unitary2) -> float:
    """Acceptance ``|(1 + delta1)/2|^2``; equals ``|U00|^4`` on SU(2)."""
    return bell_decompose(u).acceptance
