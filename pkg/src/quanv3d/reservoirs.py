"""Reservoir transformations: random G3 circuits and Ising time evolution.

A reservoir is a fixed, untrained transformation applied after encoding.
Two families are provided: circuits sampled uniformly from the universal
G3 = {CNOT, H, T} set, and exact time evolution U = exp(-i H T) under a
transverse-field Ising Hamiltonian

    H = sum_{i<j} J_ij Z_i Z_j + sum_i h X_i,   J_ij ~ U(-Js/2, Js/2).

Both are deterministic functions of their spec (including its seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate
from .errors import InvalidParameterError, ResourceLimitError
from .seeding import rng_from_seed
from .simulator import apply_circuit
from .validation import check_count, check_real, check_seed

__all__ = [
    "G3Spec",
    "IsingSpec",
    "sample_g3",
    "ising_unitary",
    "apply_reservoir",
]

_ISING_MAX_QUBITS = 10


@dataclass(frozen=True)
class G3Spec:
    """Random-circuit reservoir: ``gate_count`` gates over ``qubits``."""

    qubits: int
    gate_count: int
    seed: int

    def __post_init__(self):
        check_count(self.qubits, "qubits", minimum=2)
        check_count(self.gate_count, "gate_count", minimum=0)
        check_seed(self.seed)


@dataclass(frozen=True)
class IsingSpec:
    """Ising-evolution reservoir.  Defaults keep h/Js = 0.1 and T = 10."""

    qubits: int
    Js: float = 1.0
    h: float = 0.1
    T: float = 10.0
    seed: int = 0

    def __post_init__(self):
        check_count(self.qubits, "qubits", minimum=1)
        check_real(self.Js, "Js", minimum=0.0, strict=True)
        check_real(self.h, "h")
        check_real(self.T, "T")
        check_seed(self.seed)


def sample_g3(spec: G3Spec) -> Circuit:
    """Sample a G3 circuit: per gate, kind uniform over {CNOT, H, T}; H/T
    target uniform over qubits; CNOT uniform over ordered distinct pairs.
    Deterministic per seed."""
    rng = rng_from_seed(spec.seed)
    q = spec.qubits
    gates: list[Gate] = []
    for _ in range(spec.gate_count):
        kind = int(rng.integers(0, 3))
        if kind == 0:
            control = int(rng.integers(0, q))
            target = int(rng.integers(0, q - 1))
            if target >= control:
                target += 1
            gates.append(Gate.cnot(control, target))
        elif kind == 1:
            gates.append(Gate.h(int(rng.integers(0, q))))
        else:
            gates.append(Gate.t(int(rng.integers(0, q))))
    return Circuit(q, tuple(gates))


def build_ising_hamiltonian(spec: IsingSpec) -> np.ndarray:
    """The dense 2^q x 2^q Hamiltonian (real symmetric).

    Couplings J_ij are drawn once from U(-Js/2, Js/2) in lexicographic
    (i, j) pair order from ``spec.seed``; fields are constant h.
    """
    q = spec.qubits
    dim = 1 << q
    rng = rng_from_seed(spec.seed)
    pairs = [(i, j) for i in range(q) for j in range(i + 1, q)]
    couplings = rng.uniform(-spec.Js / 2.0, spec.Js / 2.0, size=len(pairs))

    # Z_i Z_j is diagonal: eigenvalue product of (+1, -1) per bit.
    basis = np.arange(dim)
    z = 1.0 - 2.0 * ((basis[:, None] >> np.arange(q)[None, :]) & 1)
    diag = np.zeros(dim)
    for (i, j), J in zip(pairs, couplings):
        diag += J * z[:, i] * z[:, j]

    ham = np.diag(diag)
    # X_i couples s <-> s with bit i flipped.
    for i in range(q):
        flipped = basis ^ (1 << i)
        ham[basis, flipped] += spec.h
    return ham


def ising_unitary(spec: IsingSpec) -> np.ndarray:
    """U = exp(-i H T) via dense Hermitian eigendecomposition (exact at
    these sizes; no Trotter step to tune).  T=0 returns the identity
    exactly."""
    if spec.qubits > _ISING_MAX_QUBITS:
        raise ResourceLimitError(
            f"ising_unitary supports at most {_ISING_MAX_QUBITS} qubits, got {spec.qubits}")
    dim = 1 << spec.qubits
    if spec.T == 0.0:
        return np.eye(dim, dtype=complex)
    ham = build_ising_hamiltonian(spec)
    evals, evecs = np.linalg.eigh(ham)
    phases = np.exp(-1j * evals * spec.T)
    return (evecs * phases) @ evecs.conj().T


def apply_reservoir(state: np.ndarray, reservoir) -> np.ndarray:
    """Apply a reservoir (a Circuit or a unitary matrix) to a pure state or
    density matrix."""
    if isinstance(reservoir, Circuit):
        return apply_circuit(state, reservoir)
    unitary = np.asarray(reservoir)
    if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
        raise InvalidParameterError(
            f"reservoir must be a Circuit or square unitary, got shape {unitary.shape}")
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != unitary.shape[0]:
        raise InvalidParameterError(
            f"dimension mismatch: state {state.shape[0]}, reservoir {unitary.shape[0]}")
    if state.ndim == 1:
        return unitary @ state
    if state.ndim == 2:
        return unitary @ state @ unitary.conj().T
    raise InvalidParameterError(f"state must be a vector or matrix, got ndim={state.ndim}")
