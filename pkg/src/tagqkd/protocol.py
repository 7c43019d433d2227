"""BB84-style session over the tag-encoded pair channel."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from tagqkd.measurement import Basis, QkdOutcome, qkd_measure, random_phase_gate
from tagqkd.pairstate import (
    H,
    V,
    PairState,
    TagSpec,
    apply_collective,
    apply_tag,
    encode,
    postselect,
)
from tagqkd.qcore import SQRT_HALF, RngStream, Unitary2, haar_su2

# Stream ids under the session seed.
NOISE_STREAM = 0
PAIR_STREAM = 1
SAMPLE_STREAM = 2

NOISE_KINDS = ("fixed", "iid-haar", "random-walk")
POLICY_KINDS = ("identity", "uniform-haar", "feedback")
EVE_KINDS = ("none", "intercept-resend")

LOGICAL_AMPLITUDES = {
    (Basis.COMPUTATIONAL, 0): (1.0, 0.0),
    (Basis.COMPUTATIONAL, 1): (0.0, 1.0),
    (Basis.DIAGONAL, 0): (SQRT_HALF, SQRT_HALF),
    (Basis.DIAGONAL, 1): (SQRT_HALF, -SQRT_HALF),
}


@dataclass(frozen=True)
class AliceRecord:
    bit: int
    basis: Basis
    pair_index: int


@dataclass(frozen=True)
class BobResult:
    pair_index: int
    arrived: bool
    accepted: bool
    basis: Basis | None
    outcome: QkdOutcome


@dataclass(frozen=True)
class SiftedBit:
    pair_index: int
    alice_bit: int
    bob_bit: int


@dataclass(frozen=True)
class BobPolicy:
    """How Bob picks the rotation B applied to both photons before his tag.

    ``feedback`` uses B = (R U)^dagger where U is the current channel and R a
    rotation by ``epsilon`` radians about a random axis (the estimate error).
    """

    kind: str = "identity"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")
        if self.epsilon < 0:
            raise ValueError("feedback epsilon must be >= 0")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def uniform_haar(cls):
        return cls("uniform-haar")

    @classmethod
    def feedback(cls, epsilon: float):
        return cls("feedback", float(epsilon))

    def operator(self, channel_u: Unitary2 | None, rng: RngStream) -> Unitary2:
        if self.kind == "identity":
            return Unitary2.identity()
        if self.kind == "uniform-haar":
            return haar_su2(rng)
        if channel_u is None:
            raise ValueError("feedback policy needs the current channel unitary")
        estimate = Unitary2.rotation(self.epsilon, rng.unit_vector()) @ channel_u
        return estimate.dagger


@dataclass(frozen=True)
class NoiseModel:
    """Description of the birefringence process U(t), one draw per pair.

    ``fixed`` holds ``u`` (identity if None); ``iid-haar`` draws a fresh Haar
    element per pair; ``random-walk`` starts at ``u`` and multiplies by a
    rotation of Gaussian angle (std ``step_sigma``) about a random axis
    after each pair.
    """

    kind: str = "fixed"
    u: Unitary2 | None = None
    step_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.step_sigma < 0:
            raise ValueError("step_sigma must be >= 0")
        if self.u is not None and not self.u.is_special():
            raise ValueError("channel unitaries must have determinant 1")

    def start(self, rng: RngStream) -> "NoiseProcess":
        return NoiseProcess(self, rng)


class NoiseProcess:
    """Running state of a :class:`NoiseModel`; ``current`` is this pair's U."""

    def __init__(self, model: NoiseModel, rng: RngStream):
        self.model = model
        self.rng = rng
        if model.kind == "iid-haar":
            self.current = haar_su2(rng)
        else:
            self.current = model.u or Unitary2.identity()

    @property
    def kind(self) -> str:
        return self.model.kind

    def advance(self) -> None:
        if self.kind == "iid-haar":
            self.current = haar_su2(self.rng)
        elif self.kind == "random-walk":
            angle = self.rng.normal(self.model.step_sigma)
            step = Unitary2.rotation(angle, self.rng.unit_vector())
            self.current = step @ self.current


@dataclass(frozen=True)
class SessionConfig:
    n_pairs: int = 1000
    noise: NoiseModel = field(default_factory=NoiseModel)
    policy: BobPolicy = field(default_factory=BobPolicy)
    eve: str = "none"
    loss_per_photon: float = 0.0
    seed: int = 0
    sample_fraction_for_qber: float = 0.25

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if not 0 <= self.loss_per_photon < 1:
            raise ValueError("loss_per_photon must lie in [0, 1)")
        if self.eve not in EVE_KINDS:
            raise ValueError(f"unknown eve {self.eve!r}; expected one of {EVE_KINDS}")
        if not 0 <= self.sample_fraction_for_qber <= 1:
            raise ValueError("sample_fraction_for_qber must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SessionStats:
    sent: int
    surviving_loss: int
    post_selected: int
    sifted: int
    sample_size: int
    errors_in_sample: int
    qber: float
    post_select_rate: float
    intrinsic_efficiency: float

    def as_dict(self) -> dict:
        return asdict(self)


def alice_prepare(bit: int, basis: Basis, alice_phase: float = 0.0) -> PairState:
    """One of the four BB84 states in the tagged pair encoding."""
    alpha, beta = LOGICAL_AMPLITUDES[(basis, int(bit))]
    return encode(alpha, beta, alice_phase)


def channel_transmit(
    state: PairState, noise: NoiseProcess, loss_per_photon: float, rng: RngStream
) -> PairState | None:
    """Send the pair through the fibre; returns None if a photon was lost.

    The noise process advances whether or not the pair survives.
    """
    u = noise.current
    noise.advance()
    # both draws always happen so later draws do not depend on the loss rate
    lost_a = rng.uniform() < loss_per_photon
    lost_b = rng.uniform() < loss_per_photon
    if lost_a or lost_b:
        return None
    return apply_collective(state, u)


def _logical_amplitudes(state: PairState) -> tuple[complex, complex]:
    c0 = state.amp(H, 0, V, 1)
    c1 = state.amp(V, 1, H, 0)
    w = abs(c0) ** 2 + abs(c1) ** 2
    if w < 1e-15:
        raise ValueError("state has no support on Alice's encoded subspace")
    return c0 / np.sqrt(w), c1 / np.sqrt(w)


def eve_intercept_resend(state: PairState, rng: RngStream) -> PairState:
    """Measure the logical qubit in a random BB84 basis and resend the result."""
    basis = Basis.COMPUTATIONAL if rng.bit() == 0 else Basis.DIAGONAL
    c0, c1 = _logical_amplitudes(state)
    if basis is Basis.COMPUTATIONAL:
        p0 = abs(c0) ** 2
    else:
        p0 = abs(c0 + c1) ** 2 / 2
    bit = 0 if rng.uniform() < p0 else 1
    return alice_prepare(bit, basis, rng.phase())


def bob_receive(
    state: PairState,
    policy: BobPolicy,
    rng: RngStream,
    channel_u: Unitary2 | None = None,
) -> tuple[bool, Basis | None, QkdOutcome]:
    """Bob's rotation, tag, random phase gate, post-selection and readout."""
    b = policy.operator(channel_u, rng)
    state = apply_collective(state, b)
    state = apply_tag(state, TagSpec(H, rng.phase()))
    state = random_phase_gate(state, rng.phase())
    pol, prob = postselect(state)
    if pol is None or not rng.uniform() < prob:
        return False, None, QkdOutcome.INCONCLUSIVE
    basis = Basis.COMPUTATIONAL if rng.bit() == 0 else Basis.DIAGONAL
    return True, basis, qkd_measure(pol, basis, rng)


def sift(alice: Sequence[AliceRecord], bob: Sequence[BobResult]) -> list[SiftedBit]:
    """Keep accepted, conclusive pairs measured in Alice's basis."""
    if len(alice) != len(bob):
        raise ValueError(f"record count mismatch: {len(alice)} vs {len(bob)}")
    out = []
    for a, b in zip(alice, bob):
        if a.pair_index != b.pair_index:
            raise ValueError(f"misaligned records at pair {a.pair_index} / {b.pair_index}")
        if b.accepted and b.outcome.bit is not None and b.basis is a.basis:
            out.append(SiftedBit(a.pair_index, a.bit, b.outcome.bit))
    return out


def simulate_pairs(config: SessionConfig) -> tuple[list[AliceRecord], list[BobResult]]:
    """Run every pair of a session; returns aligned Alice and Bob records."""
    noise = config.noise.start(RngStream(config.seed, NOISE_STREAM))
    alice, bob = [], []
    for i in range(config.n_pairs):
        rng = RngStream(config.seed, PAIR_STREAM, i)
        bit = rng.bit()
        basis = Basis.COMPUTATIONAL if rng.bit() == 0 else Basis.DIAGONAL
        state = alice_prepare(bit, basis, rng.phase())
        alice.append(AliceRecord(bit, basis, i))
        if config.eve == "intercept-resend":
            state = eve_intercept_resend(state, rng)
        u = noise.current
        received = channel_transmit(state, noise, config.loss_per_photon, rng)
        if received is None:
            bob.append(BobResult(i, False, False, None, QkdOutcome.INCONCLUSIVE))
            continue
        accepted, bob_basis, outcome = bob_receive(received, config.policy, rng, u)
        bob.append(BobResult(i, True, accepted, bob_basis, outcome))
    return alice, bob


def session_stats(
    config: SessionConfig, alice: Sequence[AliceRecord], bob: Sequence[BobResult]
) -> SessionStats:
    sifted = sift(alice, bob)
    arrived = sum(b.arrived for b in bob)
    accepted = sum(b.accepted for b in bob)
    n_sample = int(round(config.sample_fraction_for_qber * len(sifted)))
    errors = 0
    if n_sample:
        idx = RngStream(config.seed, SAMPLE_STREAM).choice(len(sifted), n_sample)
        errors = sum(sifted[j].alice_bit != sifted[j].bob_bit for j in idx)
    return SessionStats(
        sent=len(alice),
        surviving_loss=arrived,
        post_selected=accepted,
        sifted=len(sifted),
        sample_size=n_sample,
        errors_in_sample=int(errors),
        qber=errors / n_sample if n_sample else 0.0,
        post_select_rate=accepted / arrived if arrived else 0.0,
        intrinsic_efficiency=len(sifted) / len(alice),
    )


def run_session(config: SessionConfig) -> SessionStats:
    alice, bob = simulate_pairs(config)
    return session_stats(config, alice, bob)
