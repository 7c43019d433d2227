"""Flat ``key = value`` session configuration files."""

from __future__ import annotations

import numpy as np

from tagqkd.protocol import (
    EVE_KINDS,
    NOISE_KINDS,
    POLICY_KINDS,
    BobPolicy,
    NoiseModel,
    SessionConfig,
)
from tagqkd.qcore import Unitary2

FORMATS = ("records", "summary")


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def parse_complex_list(text: str) -> list[complex]:
    return [complex(tok.replace(" ", "").replace("i", "j")) for tok in text.split(",")]


def parse_unitary(entries: str | None = None, euler: str | None = None) -> Unitary2:
    """SU(2) element from 4 row-major complex entries or Hurwitz angles ``xi phi1 phi2``.

    Raises ValueError for malformed, non-unitary, or det != 1 input.
    """
    if (entries is None) == (euler is None):
        raise ValueError("give exactly one of entries or euler angles")
    if entries is not None:
        vals = parse_complex_list(entries)
        if len(vals) != 4:
            raise ValueError(f"expected 4 complex entries, got {len(vals)}")
        u = Unitary2(np.array(vals).reshape(2, 2))
    else:
        angles = [float(t) for t in euler.replace(",", " ").split()]
        if len(angles) != 3:
            raise ValueError(f"expected 3 angles (xi phi1 phi2), got {len(angles)}")
        u = Unitary2.from_hurwitz(*angles)
    if not u.is_special():
        raise ValueError(f"determinant must be 1, got {u.det:.6g}")
    return u


def _int(v):
    return int(v, 0)


_SCALAR_KEYS = {
    "n_pairs": _int,
    "seed": _int,
    "loss_per_photon": float,
    "sample_fraction_for_qber": float,
    "eve": str,
    "noise": str,
    "noise_step_sigma": float,
    "noise_entries": str,
    "noise_euler": str,
    "policy": str,
    "policy_epsilon": float,
    "experiment": str,
    "out": str,
    "format": str,
}

_CHOICES = {
    "eve": EVE_KINDS,
    "noise": NOISE_KINDS,
    "policy": POLICY_KINDS,
    "experiment": ("qkd-run",),
    "format": FORMATS,
}

DEFAULTS = {
    "n_pairs": 1000,
    "seed": 0,
    "loss_per_photon": 0.0,
    "sample_fraction_for_qber": 0.25,
    "eve": "none",
    "noise": "fixed",
    "noise_step_sigma": 0.0,
    "policy": "identity",
    "policy_epsilon": 0.0,
}


def parse_config_text(text: str) -> tuple[SessionConfig, dict]:
    """Parse a config file body.

    Returns the session config and any run options (``out``, ``format``).
    Blank lines and ``#`` comments are ignored. Errors carry key and line.
    """
    raw: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCALAR_KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in raw:
            raise ConfigError("duplicate key", key, lineno)
        try:
            parsed = _SCALAR_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r} ({exc})", key, lineno) from None
        if key in _CHOICES and parsed not in _CHOICES[key]:
            raise ConfigError(f"must be one of {', '.join(_CHOICES[key])}", key, lineno)
        raw[key] = (parsed, lineno)

    def get(key):
        return raw[key][0] if key in raw else DEFAULTS.get(key)

    def fail(key, message):
        line = raw[key][1] if key in raw else None
        return ConfigError(message, key, line)

    u = None
    if "noise_entries" in raw or "noise_euler" in raw:
        key = "noise_entries" if "noise_entries" in raw else "noise_euler"
        try:
            u = parse_unitary(get("noise_entries"), get("noise_euler"))
        except ValueError as exc:
            raise fail(key, str(exc)) from None

    try:
        noise = NoiseModel(get("noise"), u, get("noise_step_sigma"))
    except ValueError as exc:
        raise fail("noise", str(exc)) from None
    try:
        policy = BobPolicy(get("policy"), get("policy_epsilon"))
    except ValueError as exc:
        raise fail("policy_epsilon" if "policy_epsilon" in raw else "policy", str(exc)) from None

    scalar = {k: get(k) for k in ("n_pairs", "eve", "loss_per_photon", "seed", "sample_fraction_for_qber")}
    for k, v in scalar.items():
        try:
            SessionConfig(**{**{kk: DEFAULTS[kk] for kk in scalar}, k: v})
        except ValueError as exc:
            raise fail(k, str(exc)) from None
    config = SessionConfig(noise=noise, policy=policy, **scalar)
    options = {k: raw[k][0] for k in ("out", "format") if k in raw}
    return config, options


def load_config(path) -> tuple[SessionConfig, dict]:
    with open(path) as fh:
        return parse_config_text(fh.read())


def config_to_dict(config: SessionConfig) -> dict:
    """Echo of a session config using the file's key names."""
    noise = config.noise
    out = {
        "n_pairs": config.n_pairs,
        "seed": config.seed,
        "loss_per_photon": config.loss_per_photon,
        "sample_fraction_for_qber": config.sample_fraction_for_qber,
        "eve": config.eve,
        "noise": noise.kind,
        "noise_step_sigma": noise.step_sigma,
        "policy": config.policy.kind,
        "policy_epsilon": config.policy.epsilon,
    }
    if noise.u is not None:
        out["noise_entries"] = ",".join(repr(complex(z)) for z in noise.u.entries.ravel())
    return out
