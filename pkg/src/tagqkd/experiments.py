"""Experiment drivers behind the command-line interface.

Each driver returns ``(summary, rows)``: a summary dict and a list of
per-trial (or per-basis) dicts, both ready for :mod:`tagqkd.records`.
Randomness for trial ``t`` of experiment stream ``s`` comes from
``RngStream(seed, s, t)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math

import numpy as np

from tagqkd.config import config_to_dict
from tagqkd.measurement import (
    beamsplitter_measure,
    beamsplitter_success_probability,
    bloch_basis,
)
from tagqkd.pairstate import (
    H,
    PolPairState,
    TagSpec,
    apply_collective,
    apply_tag,
    encode,
    postselect,
    postselect_probability_closed_form,
)
from tagqkd.protocol import SessionConfig, run_session
from tagqkd.qcore import RngStream, Unitary2, bell_decompose, haar_su2
from tagqkd.records import cplx, make_record

POSTSELECT_STREAM = 10
CIRCUIT_STREAM = 11

NAMED_BASES = {
    "computational": (0.0, 0.0),
    "diagonal": (math.pi / 2, 0.0),
    "circular": (math.pi / 2, math.pi / 2),
}
DEFAULT_BASES = ("computational", "diagonal", "circular", "0.785398:0", "1.0:0.5", "2.0:1.3")


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def random_qubit(rng: RngStream) -> tuple[complex, complex]:
    alpha, beta = haar_su2(rng).entries[:, 0]
    return complex(alpha), complex(beta)


def bell_decompose_report(u: Unitary2) -> dict:
    w = bell_decompose(u)
    return make_record(
        "bell-decompose",
        u=[cplx(z) for z in u.entries.ravel()],
        delta1=cplx(w.delta1),
        delta2=cplx(w.delta2),
        delta3=cplx(w.delta3),
        norm_residual=w.norm_residual,
        acceptance=w.acceptance,
    )


def simulated_acceptance(u: Unitary2, rng: RngStream) -> float:
    """Acceptance from the full pair-state pipeline with random input and arm phases."""
    alpha, beta = random_qubit(rng)
    state = encode(alpha, beta, rng.phase())
    state = apply_collective(state, u)
    state = apply_tag(state, TagSpec(H, rng.phase()))
    return postselect(state)[1]


def postselect_stats(trials: int, seed: int) -> tuple[dict, list[dict]]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    sims = np.empty(trials)
    worst = 0.0
    for t in range(trials):
        rng = RngStream(seed, POSTSELECT_STREAM, t)
        u = haar_su2(rng)
        closed = postselect_probability_closed_form(u)
        sim = simulated_acceptance(u, rng)
        gap = abs(sim - closed)
        worst = max(worst, gap)
        sims[t] = sim
        rows.append(
            make_record("postselect-trial", trial=t, closed_form=closed, simulated=sim, discrepancy=gap)
        )
    summary = make_record(
        "postselect-stats",
        trials=trials,
        seed=seed,
        mean_acceptance=float(sims.mean()),
        stderr=_stderr(sims),
        max_discrepancy=worst,
    )
    return summary, rows


def parse_basis(spec: str) -> tuple[float, float]:
    if spec in NAMED_BASES:
        return NAMED_BASES[spec]
    try:
        theta, phi = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(
            f"bad basis {spec!r}: use a name ({', '.join(NAMED_BASES)}) or 'theta:phi'"
        ) from None
    return theta, phi


def measure_circuit_stats(
    trials: int, seed: int, bases=DEFAULT_BASES
) -> tuple[dict, list[dict]]:
    """Monte Carlo of the beamsplitter circuit for each target basis."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for b_idx, spec in enumerate(bases):
        theta, phi = parse_basis(spec)
        target = bloch_basis(theta, phi)
        split = success = p0k0 = 0
        for t in range(trials):
            rng = RngStream(seed, CIRCUIT_STREAM, b_idx, t)
            alpha, beta = random_qubit(rng)
            rec = beamsplitter_measure(PolPairState.from_gamma(alpha, beta), target, rng)
            split += rec.split
            success += rec.success
            p0k0 += rec.split and rec.p == 0 and rec.k == 0
        rate = success / trials
        rows.append(
            make_record(
                "circuit-basis",
                basis=spec,
                theta=theta,
                phi=phi,
                trials=trials,
                success_rate=rate,
                stderr=math.sqrt(rate * (1 - rate) / trials),
                split_rate=split / trials,
                p0k0_rate=p0k0 / trials,
                exact_success=beamsplitter_success_probability(target),
            )
        )
    worst = min(rows, key=lambda r: r["success_rate"])
    summary = make_record(
        "measure-circuit-stats",
        trials=trials,
        seed=seed,
        bases=rows,
        min_success_rate=worst["success_rate"],
        min_success_stderr=worst["stderr"],
        min_success_basis=worst["basis"],
    )
    return summary, rows


def qkd_run(config: SessionConfig) -> dict:
    stats = run_session(config)
    return make_record("qkd-run", seed=config.seed, config=config_to_dict(config), **stats.as_dict())
