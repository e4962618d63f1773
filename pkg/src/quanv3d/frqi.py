"""FRQI encoding of voxel blocks.

An n^3 block becomes angles theta_i in [0, 2pi); the encoded state entangles
a color qubit with the position register:

    |B> = (1/sqrt(M)) * sum_i (cos theta_i |0> + sin theta_i |1>) |i>

with M = 2^ceil(log2(n^3)) positions (angles zero-padded up to M when n^3
is not a power of two, which also keeps the state normalized).  The color
qubit is the most significant; position index bit b lives on qubit b.

:func:`frqi_state` builds the amplitudes analytically; :func:`frqi_circuit`
synthesizes an equivalent circuit from H, Ry and CNOT only, decomposing each
position-controlled color rotation through a closed Gray-code walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate
from .errors import InvalidParameterError
from .validation import check_count, check_finite_array, check_real

__all__ = [
    "AngleBlock",
    "FrqiResources",
    "position_qubits",
    "normalize_block",
    "frqi_amplitudes",
    "frqi_state",
    "frqi_encoding_circuit",
    "frqi_circuit",
    "frqi_resources",
]

TWO_PI = 2.0 * np.pi
# Keeps the top of the value range strictly below 2*pi.
_RANGE_EPS = 1e-12


@dataclass
class AngleBlock:
    """n^3 rotation angles for one block, each in [0, 2pi)."""

    n: int
    angles: np.ndarray

    def __post_init__(self):
        self.n = check_count(self.n, "n", minimum=1)
        self.angles = np.asarray(self.angles, dtype=np.float64).ravel()
        if self.angles.size != self.n**3:
            raise InvalidParameterError(
                f"expected {self.n**3} angles for n={self.n}, got {self.angles.size}")
        check_finite_array(self.angles, "angles")
        if self.angles.min(initial=0.0) < 0.0 or self.angles.max(initial=0.0) >= TWO_PI:
            raise InvalidParameterError("angles must lie in [0, 2*pi)")

    @property
    def position_qubits(self) -> int:
        return position_qubits(self.n)

    @property
    def qubits(self) -> int:
        return self.position_qubits + 1


@dataclass(frozen=True)
class FrqiResources:
    qubits: int
    gates: int


def position_qubits(n: int) -> int:
    """Position-register width for an n^3 block: ceil(log2(n^3))."""
    return max(int(n**3 - 1).bit_length(), 0)


def normalize_block(raw_block, global_min: float, global_max: float) -> AngleBlock:
    """Map raw voxel values to angles on the whole-grid scale.

    theta_i = 2*pi * (v_i - global_min) / (global_max - global_min + 1e-12);
    the epsilon keeps every angle strictly below 2*pi, and a degenerate
    range (min = max) maps everything to 0.  The min/max must come from the
    whole grid so that all blocks share one scale.
    """
    global_min = check_real(global_min, "global_min")
    global_max = check_real(global_max, "global_max")
    if global_min > global_max:
        raise InvalidParameterError(
            f"global_min={global_min} exceeds global_max={global_max}")
    raw = check_finite_array(np.asarray(raw_block, dtype=np.float64), "block").ravel()
    n = round(raw.size ** (1.0 / 3.0))
    if n**3 != raw.size:
        raise InvalidParameterError(f"block size {raw.size} is not a cube")
    if raw.min() < global_min or raw.max() > global_max:
        raise InvalidParameterError(
            "block values fall outside [global_min, global_max]")
    theta = TWO_PI * (raw - global_min) / (global_max - global_min + _RANGE_EPS)
    return AngleBlock(n, theta)


def _pad_to_power_of_two(angles: np.ndarray) -> np.ndarray:
    k = max(int(angles.size - 1).bit_length(), 0)
    theta = np.zeros(1 << k)
    theta[:angles.size] = angles
    return theta


def frqi_amplitudes(angles) -> np.ndarray:
    """Encode any angle list (length padded up to a power of two M): the
    amplitude at basis index (b << k) + i is cos(theta_i)/sqrt(M) for color
    bit b=0 and sin(theta_i)/sqrt(M) for b=1.  Always normalized."""
    angles = np.asarray(angles, dtype=np.float64).ravel()
    if angles.size < 1:
        raise InvalidParameterError("needs at least one angle")
    theta = _pad_to_power_of_two(angles)
    scale = 1.0 / np.sqrt(theta.size)
    return np.concatenate([np.cos(theta), np.sin(theta)]).astype(complex) * scale


def frqi_state(block: AngleBlock) -> np.ndarray:
    """The encoded statevector of a block, built analytically."""
    return frqi_amplitudes(block.angles)


def frqi_encoding_circuit(angles) -> Circuit:
    """An H/Ry/CNOT circuit preparing :func:`frqi_amplitudes` from |0...0>.

    Construction: H on every position qubit, then for each nonzero angle a
    rotation of the color qubit by 2*theta_i controlled on position pattern
    i.  The controlled rotation unrolls into 2^k alternating Ry/CNOT steps
    along the closed Gray-code cycle g(j) = j ^ (j >> 1): step j rotates by

        beta_j = (2*theta_i / 2^k) * (-1)^popcount(i & g(j))

    and the CNOT flips the color qubit from the control bit on which g(j)
    and g(j+1) differ.  Summed along the walk the rotations cancel for every
    position except i, and the closed cycle flips each control an even
    number of times, so no correcting X gates are needed.  Zero angles emit
    nothing.
    """
    angles = np.asarray(angles, dtype=np.float64).ravel()
    k = max(int(angles.size - 1).bit_length(), 0)
    color = k
    gates: list[Gate] = [Gate.h(q) for q in range(k)]
    denom = 1 << k
    for i, theta in enumerate(angles):
        if theta == 0.0:
            continue
        if k == 0:
            gates.append(Gate.ry(color, 2.0 * theta))
            continue
        base = 2.0 * theta / denom
        for j in range(denom):
            gray = j ^ (j >> 1)
            sign = -1.0 if (i & gray).bit_count() & 1 else 1.0
            gates.append(Gate.ry(color, sign * base))
            succ = (j + 1) % denom
            diff = gray ^ (succ ^ (succ >> 1))
            gates.append(Gate.cnot(diff.bit_length() - 1, color))
    return Circuit(k + 1, tuple(gates))


def frqi_circuit(block: AngleBlock) -> Circuit:
    """The encoding circuit for a block (see :func:`frqi_encoding_circuit`)."""
    return frqi_encoding_circuit(block.angles)


def frqi_resources(block: AngleBlock) -> FrqiResources:
    """Qubit and gate cost of encoding this block."""
    return FrqiResources(qubits=block.qubits, gates=len(frqi_circuit(block)))
