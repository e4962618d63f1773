"""Dense statevector and density-matrix simulation.

States are plain numpy arrays: a pure state is a length-2^q complex vector,
a density matrix is 2^q x 2^q.  Qubit 0 is the least-significant bit of the
basis index.

Gates are applied in place over strided views of the amplitude array; the
full 2^q x 2^q unitary is only ever built by :func:`circuit_unitary`, the
small-circuit test oracle.
"""

from __future__ import annotations

import numpy as np

from .circuits import Circuit, Gate, gate_matrix
from .errors import InvalidParameterError, RepresentationError, ResourceLimitError
from .seeding import rng_from_seed
from .validation import check_count, check_seed

__all__ = [
    "zero_state",
    "pure_to_density",
    "num_qubits",
    "apply_circuit",
    "measure_probs",
    "sample_counts",
    "circuit_unitary",
    "allclose_up_to_phase",
]

_ORACLE_MAX_QUBITS = 6


def zero_state(qubits: int, density: bool = False) -> np.ndarray:
    """|0...0> as a statevector, or |0...0><0...0| if ``density``."""
    qubits = check_count(qubits, "qubits", minimum=1)
    dim = 1 << qubits
    if density:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    return psi


def pure_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def num_qubits(state: np.ndarray) -> int:
    dim = state.shape[0]
    q = dim.bit_length() - 1
    if dim != 1 << q:
        raise InvalidParameterError(f"state dimension {dim} is not a power of two")
    return q


# -- in-place kernels ----------------------------------------------------

def _apply_1q(arr: np.ndarray, m: np.ndarray, qubit: int, trailing: int) -> None:
    """Left-multiply a 2x2 matrix onto one qubit of a flat C-contiguous array.

    ``trailing`` is the number of flat entries below the qubit's bit: 1 for
    a statevector qubit, 2^q for a density-matrix *row* qubit (the whole
    column index rides below every row bit).
    """
    view = arr.reshape(-1, 2, trailing << qubit)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    view[:, 1, :] = m[1, 0] * a + m[1, 1] * b


def _apply_cnot(arr: np.ndarray, control: int, target: int, trailing: int) -> None:
    """Swap target-bit slices where the control bit is 1 (in place)."""
    if control > target:
        # axes: [..., control, ..., target, ..., trailing]
        view = arr.reshape(-1, 2, 1 << (control - target - 1), 2, trailing << target)
        lo = view[:, 1, :, 0, :].copy()
        view[:, 1, :, 0, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = lo
    else:
        view = arr.reshape(-1, 2, 1 << (target - control - 1), 2, trailing << control)
        lo = view[:, 0, :, 1, :].copy()
        view[:, 0, :, 1, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = lo


def _apply_gate_pure(psi: np.ndarray, gate: Gate) -> None:
    if gate.kind == "CNOT":
        _apply_cnot(psi, gate.qubits[0], gate.qubits[1], 1)
    else:
        _apply_1q(psi, gate_matrix(gate), gate.qubits[0], 1)


def _apply_gate_density(rho: np.ndarray, gate: Gate) -> None:
    # rho <- U rho U+: U on the row index, conj(U) on the column index.
    dim = rho.shape[0]
    flat = rho.reshape(-1)
    if gate.kind == "CNOT":
        c, t = gate.qubits
        _apply_cnot(flat, c, t, dim)  # rows
        _apply_cnot(flat, c, t, 1)   # columns (swap is real)
    else:
        m = gate_matrix(gate)
        _apply_1q(flat, m, gate.qubits[0], dim)      # rows
        _apply_1q(flat, m.conj(), gate.qubits[0], 1)  # columns


# -- public operations ---------------------------------------------------

def apply_circuit(state: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Run the circuit gate by gate: U|psi> or U rho U+.

    Accepts a statevector or a density matrix; returns a new array of the
    same representation.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim not in (1, 2):
        raise RepresentationError(
            f"state must be a vector or square matrix, got ndim={state.ndim}")
    if state.ndim == 2 and state.shape[0] != state.shape[1]:
        raise InvalidParameterError(f"density matrix must be square, got {state.shape}")
    if num_qubits(state) != circuit.qubits:
        raise InvalidParameterError(
            f"state has {num_qubits(state)} qubits, circuit needs {circuit.qubits}")

    out = state.copy()
    if out.ndim == 1:
        for gate in circuit.gates:
            _apply_gate_pure(out, gate)
    else:
        for gate in circuit.gates:
            _apply_gate_density(out, gate)
    return out


def measure_probs(state: np.ndarray) -> np.ndarray:
    """Computational-basis probabilities: |a_i|^2, or Re(rho_ii) for a
    density matrix (tiny negative diagonals from round-off clipped at 0)."""
    state = np.asarray(state)
    if state.ndim == 1:
        return np.abs(state) ** 2
    if state.ndim == 2:
        diag = np.real(np.diagonal(state)).copy()
        if diag.min() < -1e-10:
            raise InvalidParameterError(
                f"density diagonal has entry {diag.min():.3e} < -1e-10; not a state")
        np.clip(diag, 0.0, None, out=diag)
        return diag
    raise RepresentationError(f"state must be a vector or matrix, got ndim={state.ndim}")


def sample_counts(probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Multinomial shot counts over the outcome distribution; deterministic
    per seed; counts sum to ``shots`` exactly."""
    shots = check_count(shots, "shots", minimum=1)
    seed = check_seed(seed)
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.min() < 0:
        raise InvalidParameterError("probs must be a nonnegative vector")
    total = probs.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise InvalidParameterError(f"probs must sum to 1, got {total}")
    rng = rng_from_seed(seed)
    return rng.multinomial(shots, probs / total)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """The full circuit unitary, built gate matrix by gate matrix.

    Test oracle only — quadratic memory, so limited to 6 qubits.  Built by
    explicit kron embedding, independently of the strided kernels above.
    """
    q = circuit.qubits
    if q > _ORACLE_MAX_QUBITS:
        raise ResourceLimitError(
            f"circuit_unitary supports at most {_ORACLE_MAX_QUBITS} qubits, got {q}")
    dim = 1 << q

    def embed_1q(m: np.ndarray, qubit: int) -> np.ndarray:
        return np.kron(np.eye(1 << (q - 1 - qubit)), np.kron(m, np.eye(1 << qubit)))

    unitary = np.eye(dim, dtype=complex)
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            c, t = gate.qubits
            full = embed_1q(p0, c) + embed_1q(p1, c) @ embed_1q(x, t)
        else:
            full = embed_1q(gate_matrix(gate), gate.qubits[0])
        unitary = full @ unitary
    return unitary


def allclose_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-8) -> bool:
    """True when two statevectors agree up to one global phase."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < 1e-12:
        return bool(np.allclose(a, b, atol=atol))
    phase = a[k] / b[k]
    mag = abs(phase)
    if mag < 1e-12:
        return False
    return bool(np.allclose(a, (phase / mag) * b, atol=atol))
