"""Gate and circuit types, gate matrices, and the circuit JSON format.

Gate set: H, T, X, Y, Z, Ry(theta), CNOT.  Qubit 0 is the least-significant
bit of a basis-state index; this convention is shared by every module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "Gate",
    "Circuit",
    "gate_matrix",
    "inverse_circuit",
    "circuit_to_json",
    "circuit_from_json",
]

_SINGLE_KINDS = frozenset({"H", "T", "X", "Y", "Z", "Ry"})

_SQ2 = 1.0 / math.sqrt(2.0)

_FIXED_MATRICES = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "T": np.array([[1.0, 0.0], [0.0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1j], [1j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    # Local ordering: control is the high bit, target the low bit.
    "CNOT": np.array([[1, 0, 0, 0],
                      [0, 1, 0, 0],
                      [0, 0, 0, 1],
                      [0, 0, 1, 0]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    """One gate: ``kind``, the qubits it acts on, and an angle for Ry.

    For CNOT, ``qubits`` is (control, target).
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind == "CNOT":
            if len(self.qubits) != 2:
                raise InvalidParameterError("CNOT takes exactly two qubits")
            if self.qubits[0] == self.qubits[1]:
                raise InvalidParameterError("CNOT control must differ from target")
            if self.angle is not None:
                raise InvalidParameterError("CNOT takes no angle")
        elif self.kind in _SINGLE_KINDS:
            if len(self.qubits) != 1:
                raise InvalidParameterError(f"{self.kind} takes exactly one qubit")
            if self.kind == "Ry":
                if self.angle is None or not math.isfinite(self.angle):
                    raise InvalidParameterError("Ry requires a finite angle")
            elif self.angle is not None:
                raise InvalidParameterError(f"{self.kind} takes no angle")
        else:
            raise InvalidParameterError(f"unknown gate kind {self.kind!r}")
        if any(q < 0 for q in self.qubits):
            raise InvalidParameterError("qubit indices must be nonnegative")

    # -- constructors ----------------------------------------------------
    @staticmethod
    def h(q: int) -> "Gate":
        return Gate("H", (q,))

    @staticmethod
    def t(q: int) -> "Gate":
        return Gate("T", (q,))

    @staticmethod
    def x(q: int) -> "Gate":
        return Gate("X", (q,))

    @staticmethod
    def y(q: int) -> "Gate":
        return Gate("Y", (q,))

    @staticmethod
    def z(q: int) -> "Gate":
        return Gate("Z", (q,))

    @staticmethod
    def ry(q: int, theta: float) -> "Gate":
        return Gate("Ry", (q,), float(theta))

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate("CNOT", (control, target))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``qubits`` qubits."""

    qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.qubits < 1:
            raise InvalidParameterError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.qubits:
                raise InvalidParameterError(
                    f"gate {g.kind} on qubits {g.qubits} exceeds circuit size {self.qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def gate_matrix(gate: Gate) -> np.ndarray:
    """The gate's unitary: 2x2, or 4x4 for CNOT (control = high local bit)."""
    if gate.kind == "Ry":
        half = 0.5 * gate.angle
        c, s = math.cos(half), math.sin(half)
        return np.array([[c, -s], [s, c]], dtype=complex)
    return _FIXED_MATRICES[gate.kind].copy()


def inverse_circuit(circuit: Circuit) -> Circuit:
    """A circuit undoing ``circuit`` within the same gate set.

    H, X, Y, Z, CNOT are self-inverse; Ry(theta) inverts to Ry(-theta);
    T inverts to seven T's (T^8 = identity up to global phase).
    """
    inv: list[Gate] = []
    for g in reversed(circuit.gates):
        if g.kind == "Ry":
            inv.append(Gate.ry(g.qubits[0], -g.angle))
        elif g.kind == "T":
            inv.extend(Gate.t(g.qubits[0]) for _ in range(7))
        else:
            inv.append(g)
    return Circuit(circuit.qubits, tuple(inv))


# -- JSON format ---------------------------------------------------------
#   {"qubits": q, "gates": [{"kind":"H","q":0},
#                           {"kind":"CNOT","c":1,"t":3},
#                           {"kind":"Ry","q":2,"theta":1.5708}, ...]}

def _gate_to_dict(gate: Gate) -> dict:
    if gate.kind == "CNOT":
        return {"kind": "CNOT", "c": gate.qubits[0], "t": gate.qubits[1]}
    d = {"kind": gate.kind, "q": gate.qubits[0]}
    if gate.kind == "Ry":
        d["theta"] = gate.angle
    return d


def _gate_from_dict(d: dict) -> Gate:
    try:
        kind = d["kind"]
        if kind == "CNOT":
            return Gate.cnot(int(d["c"]), int(d["t"]))
        if kind == "Ry":
            return Gate.ry(int(d["q"]), float(d["theta"]))
        if kind in _SINGLE_KINDS:
            return Gate(kind, (int(d["q"]),))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameterError(f"malformed gate record {d!r}") from exc
    raise InvalidParameterError(f"unknown gate kind {kind!r}")


def circuit_to_json(circuit: Circuit) -> str:
    return json.dumps({
        "qubits": circuit.qubits,
        "gates": [_gate_to_dict(g) for g in circuit.gates],
    })


def circuit_from_json(text: str) -> Circuit:
    try:
        payload = json.loads(text)
        qubits = int(payload["qubits"])
        gates = tuple(_gate_from_dict(d) for d in payload["gates"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidParameterError(f"malformed circuit JSON: {exc}") from exc
    return Circuit(qubits, gates)
