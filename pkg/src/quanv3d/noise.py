"""Kraus noise channels and the noisy (density-matrix) circuit executor.

Three single-qubit channels, each with one knob p in [0, 1]:

- ``depolarizing``: with total probability p the state is hit by X, Y or Z
  (p/3 each); Kraus set {sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}.
- ``amplitude_damping`` (gamma = p): energy loss |1> -> |0>,
  K0 = [[1, 0], [0, sqrt(1-p)]], K1 = [[0, sqrt(p)], [0, 0]].
- ``phase_damping`` (lambda = p): coherence loss without energy loss,
  K0 = [[1, 0], [0, sqrt(1-p)]], K1 = [[0, 0], [0, sqrt(p)]]; populations
  (the density diagonal) are untouched.

The executor inserts the channel after every gate on every qubit the gate
touches (one qubit for H/T/X/Y/Z/Ry, both for CNOT).  Internally each gate
kind is folded with its trailing noise into one superoperator (4x4 for
single-qubit gates, 16x16 for CNOT) applied by moving the affected row/
column axes to the front and hitting them with one GEMM — much faster than
summing Kraus terms gate by gate, and exactly equivalent (asserted in the
test suite against :func:`apply_channel`).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuits import Circuit, Gate, gate_matrix
from .errors import InvalidParameterError, RepresentationError, ResourceLimitError
from .simulator import measure_probs, pure_to_density, zero_state
from .validation import check_probability

__all__ = [
    "CHANNELS",
    "NoiseSpec",
    "kraus_ops",
    "apply_channel",
    "run_noisy",
    "iter_noisy_states",
]

CHANNELS = ("depolarizing", "amplitude_damping", "phase_damping")

_RUN_MAX_QUBITS = 10

_I2 = np.eye(2, dtype=complex)
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class NoiseSpec:
    """Channel name plus its single error-probability knob."""

    channel: str
    p: float

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise InvalidParameterError(
                f"channel must be one of {CHANNELS}, got {self.channel!r}")
        object.__setattr__(self, "p", check_probability(self.p))


def kraus_ops(spec: NoiseSpec) -> list[np.ndarray]:
    """The channel's Kraus operators; complete (sum K+K = I) by
    construction.  p=0 collapses to the single identity operator."""
    p = spec.p
    if p == 0.0:
        return [_I2.copy()]
    if spec.channel == "depolarizing":
        return [
            np.sqrt(1.0 - p) * _I2,
            np.sqrt(p / 3.0) * _PAULI_X,
            np.sqrt(p / 3.0) * _PAULI_Y,
            np.sqrt(p / 3.0) * _PAULI_Z,
        ]
    if spec.channel == "amplitude_damping":
        return [
            np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex),
            np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex),
        ]
    # phase_damping
    return [
        np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex),
        np.array([[0.0, 0.0], [0.0, np.sqrt(p)]], dtype=complex),
    ]


def apply_channel(rho: np.ndarray, qubit: int, spec: NoiseSpec) -> np.ndarray:
    """One application of the channel to one qubit of a density matrix:
    rho <- sum_k K_k rho K_k+.  Trace and Hermiticity are preserved."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise RepresentationError(
            "apply_channel needs a density matrix; convert pure states with "
            "pure_to_density first")
    rho = rho.astype(complex, copy=False)
    dim = rho.shape[0]
    q = dim.bit_length() - 1
    if qubit < 0 or qubit >= q:
        raise InvalidParameterError(f"qubit {qubit} out of range for {q} qubits")

    # Row/column axes of the affected qubit in the (2,)*2q tensor view.
    tensor = rho.reshape((2,) * (2 * q))
    row_ax, col_ax = q - 1 - qubit, 2 * q - 1 - qubit
    out = np.zeros_like(tensor)
    for k in kraus_ops(spec):
        term = np.moveaxis(np.tensordot(k, tensor, axes=([1], [row_ax])), 0, row_ax)
        term = np.moveaxis(np.tensordot(k.conj(), term, axes=([1], [col_ax])), 0, col_ax)
        out += term
    return out.reshape(dim, dim)


# -- fused gate+noise superoperators ------------------------------------

class _FusedOps:
    """Per-run cache mapping gate kind/angle to its noise-fused superop."""

    def __init__(self, spec: NoiseSpec):
        self.kraus = kraus_ops(spec)
        self._cache: dict = {}

    def superop(self, gate: Gate) -> np.ndarray:
        key = (gate.kind, gate.angle)
        sop = self._cache.get(key)
        if sop is None:
            u = gate_matrix(gate)
            if gate.kind == "CNOT":
                sop = np.zeros((16, 16), dtype=complex)
                for k1, k2 in product(self.kraus, self.kraus):
                    b = np.kron(k1, k2) @ u
                    sop += np.kron(b, b.conj())
            else:
                sop = np.zeros((4, 4), dtype=complex)
                for k in self.kraus:
                    a = k @ u
                    sop += np.kron(a, a.conj())
            self._cache[key] = sop
        return sop


def _superop_axes(gate: Gate, q: int) -> tuple[int, ...]:
    if gate.kind == "CNOT":
        c, t = gate.qubits
        return (q - 1 - c, q - 1 - t, 2 * q - 1 - c, 2 * q - 1 - t)
    (qb,) = gate.qubits
    return (q - 1 - qb, 2 * q - 1 - qb)


def _apply_superop(tensor: np.ndarray, sop: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    rest = tuple(a for a in range(tensor.ndim) if a not in axes)
    perm = axes + rest
    work = np.ascontiguousarray(np.transpose(tensor, perm))
    shaped = sop @ work.reshape(sop.shape[0], -1)
    return np.transpose(shaped.reshape(work.shape), np.argsort(perm))


def _initial_density(circuit: Circuit, initial) -> np.ndarray:
    if initial is None:
        return zero_state(circuit.qubits, density=True)
    initial = np.asarray(initial, dtype=complex)
    if initial.ndim == 1:
        initial = pure_to_density(initial)
    if initial.shape != (1 << circuit.qubits,) * 2:
        raise InvalidParameterError(
            f"initial state shape {initial.shape} does not match "
            f"{circuit.qubits}-qubit circuit")
    return initial


def iter_noisy_states(circuit: Circuit, spec: NoiseSpec, initial=None):
    """Diagnostic iterator: the density matrix after each gate (noise
    included).  Yields fresh (2^q, 2^q) arrays; same math as
    :func:`run_noisy`."""
    q = circuit.qubits
    if q > _RUN_MAX_QUBITS:
        raise ResourceLimitError(
            f"noisy simulation supports at most {_RUN_MAX_QUBITS} qubits, got {q}")
    dim = 1 << q
    fused = _FusedOps(spec)
    tensor = _initial_density(circuit, initial).reshape((2,) * (2 * q))
    for gate in circuit.gates:
        tensor = _apply_superop(tensor, fused.superop(gate), _superop_axes(gate, q))
        yield np.ascontiguousarray(tensor).reshape(dim, dim)


def run_noisy(circuit: Circuit, spec: NoiseSpec, initial=None) -> np.ndarray:
    """Execute the circuit with the channel inserted after every gate on
    every touched qubit; returns the final outcome probabilities."""
    q = circuit.qubits
    if q > _RUN_MAX_QUBITS:
        raise ResourceLimitError(
            f"noisy simulation supports at most {_RUN_MAX_QUBITS} qubits, got {q}")
    dim = 1 << q
    fused = _FusedOps(spec)
    tensor = _initial_density(circuit, initial).reshape((2,) * (2 * q))
    for gate in circuit.gates:
        tensor = _apply_superop(tensor, fused.superop(gate), _superop_axes(gate, q))
    rho = np.ascontiguousarray(tensor).reshape(dim, dim)
    return measure_probs(rho)
