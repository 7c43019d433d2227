"""Small complex linear algebra kernel: SU(2) sampling and Bell decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

EXACT_TOL = 1e-12
UNITARITY_TOL = 1e-9

SQRT_HALF = np.sqrt(0.5)

# Two-photon polarization basis, index = 2 * pol_A + pol_B with H=0, V=1.
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) * SQRT_HALF
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) * SQRT_HALF
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) * SQRT_HALF
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) * SQRT_HALF


class RngStream:
    """Seeded random stream.

    A stream is identified by a root ``seed`` plus an optional key path, e.g.
    ``RngStream(seed, stream_id, trial_index)``. Streams with equal seed and key
    produce bit-identical sequences; distinct keys give independent streams.
    """

    def __init__(self, seed: int, *key: int):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key))
        )

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, *self.key, *key)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * self._gen.random()

    def normal(self, scale: float = 1.0) -> float:
        return float(self._gen.normal(0.0, scale))

    def phase(self) -> float:
        """Uniform angle on [0, 2*pi)."""
        return 2 * np.pi * self._gen.random()

    def bit(self) -> int:
        return int(self._gen.integers(0, 2))

    def bernoulli(self, p: float) -> bool:
        return bool(self._gen.random() < p)

    def choice(self, n: int, size: int) -> np.ndarray:
        """``size`` distinct indices from ``range(n)``, in increasing order."""
        return np.sort(self._gen.choice(n, size=size, replace=False))

    def unit_vector(self) -> np.ndarray:
        v = self._gen.normal(size=3)
        return v / np.linalg.norm(v)


_EYE2 = np.eye(2)


def unitarity_residual(m: np.ndarray) -> float:
    """Max absolute entry of ``m m^dagger - I``."""
    eye = _EYE2 if m.shape == (2, 2) else np.eye(m.shape[0])
    return float(np.abs(m @ m.conj().T - eye).max())


@dataclass(frozen=True, eq=False)
class Unitary2:
    """A 2x2 unitary acting on one photon's polarization (rows/cols H, V)."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        res = unitarity_residual(m)
        if not res < UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (residual {res:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls) -> "Unitary2":
        return cls(np.eye(2))

    @classmethod
    def from_hurwitz(cls, xi: float, phi1: float, phi2: float) -> "Unitary2":
        """SU(2) element ``[[cos xi e^{i phi1}, sin xi e^{i phi2}], [-c.c., c.c.]]``."""
        a = np.cos(xi) * np.exp(1j * phi1)
        b = np.sin(xi) * np.exp(1j * phi2)
        return cls(np.array([[a, b], [-np.conj(b), np.conj(a)]]))

    @classmethod
    def rotation(cls, angle: float, axis: Sequence[float]) -> "Unitary2":
        """Bloch-sphere rotation ``exp(-i angle/2 n.sigma)`` about unit vector ``axis``."""
        nx, ny, nz = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return cls(
            np.array(
                [
                    [c - 1j * s * nz, -1j * s * nx - s * ny],
                    [-1j * s * nx + s * ny, c + 1j * s * nz],
                ]
            )
        )

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    @property
    def dagger(self) -> "Unitary2":
        return Unitary2(self.entries.conj().T)

    @property
    def residual(self) -> float:
        return unitarity_residual(self.entries)

    def is_special(self, tol: float = UNITARITY_TOL) -> bool:
        return abs(self.det - 1) < tol

    def __matmul__(self, other: "Unitary2") -> "Unitary2":
        return Unitary2(self.entries @ other.entries)

    def __repr__(self):
        return f"Unitary2({self.entries.tolist()!r})"


@dataclass(frozen=True)
class BellWeights:
    """Amplitudes of |Psi+>, |Phi+>, |Phi-> in ``(U x U)|Psi+>``."""

    delta1: complex
    delta2: complex
    delta3: complex

    @property
    def norm_residual(self) -> float:
        return abs(abs(self.delta1) ** 2 + abs(self.delta2) ** 2 + abs(self.delta3) ** 2 - 1)

    @property
    def acceptance(self) -> float:
        """Post-selection probability ``|(1 + delta1)/2|^2``."""
        return abs((1 + self.delta1) / 2) ** 2


def haar_su2(rng: RngStream) -> Unitary2:
    """Draw a Haar-random element of SU(2).

    ``|U00|^2`` is drawn uniform on [0, 1] and the two phases uniform on
    [0, 2 pi), which is the uniform measure on the 3-sphere of unit quaternions.
    """
    u = rng.uniform()
    phi1 = rng.phase()
    phi2 = rng.phase()
    return Unitary2.from_hurwitz(np.arccos(np.sqrt(u)), phi1, phi2)


def two_photon(u: Unitary2) -> np.ndarray:
    """``U x U`` on the 4-dim polarization space."""
    return np.kron(u.entries, u.entries)


def _check_unitary(u) -> Unitary2:
    return u if isinstance(u, Unitary2) else Unitary2(u)


def bell_decompose(u) -> BellWeights:
    """Decompose ``(U x U)|Psi+>`` over the triplet Bell states.

    Parameters
    ----------
    u : Unitary2 or array_like
        Channel unitary; raw matrices are validated (residual < 1e-9). For det(U) = 1 the Psi- image vanishes and the three
        weights exhaust the norm; delta1 is then real.

    Returns
    -------
    BellWeights
    """
    u = _check_unitary(u)
    image = two_photon(u) @ PSI_PLUS
    return BellWeights(
        complex(np.vdot(PSI_PLUS, image)),
        complex(np.vdot(PHI_PLUS, image)),
        complex(np.vdot(PHI_MINUS, image)),
    )


def singlet_image(u) -> complex:
    """``<Psi-|U x U|Psi->``, which equals det(U)."""
    u = _check_unitary(u)
    return complex(np.vdot(PSI_MINUS, two_photon(u) @ PSI_MINUS))
