"""Two-photon tag-encoded QKD over collective birefringence noise.

Exact state-vector simulation of a polarization qubit carried by a photon
pair, protected by time-delay tags and post-selection, together with a
BB84-style session model.
"""

from tagqkd.qcore import (
    BellWeights,
    RngStream,
    Unitary2,
    bell_decompose,
    haar_su2,
    singlet_image,
)
from tagqkd.pairstate import (
    H,
    V,
    PairState,
    PolPairState,
    TagSpec,
    TimingConfig,
    apply_collective,
    apply_single,
    apply_tag,
    arrival_separation,
    encode,
    postselect,
    postselect_probability_closed_form,
)
from tagqkd.measurement import (
    Basis,
    BeamsplitterRecord,
    QkdOutcome,
    beamsplitter_measure,
    pauli_frame,
    qkd_measure,
    random_phase_gate,
)
from tagqkd.protocol import (
    BobPolicy,
    NoiseProcess,
    SessionConfig,
    SessionStats,
    alice_prepare,
    bob_receive,
    channel_transmit,
    eve_intercept_resend,
    run_session,
    sift,
)

__version__ = "0.1.0"
