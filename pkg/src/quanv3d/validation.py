"""Input-validation helpers.

Small check_* functions in the sklearn style: validate, normalize, and
return the value (or raise :class:`~quanv3d.errors.InvalidParameterError`).
Used at the public entry points; internal code trusts its inputs.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import InvalidParameterError


def check_count(value, name: str, minimum: int = 0) -> int:
    """Validate an integer count >= minimum."""
    if not isinstance(value, numbers.Integral):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_seed(value, name: str = "seed") -> int:
    if not isinstance(value, numbers.Integral):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise InvalidParameterError(f"{name} must be nonnegative, got {value}")
    return value


def check_real(value, name: str, minimum: float | None = None,
               strict: bool = False) -> float:
    if not isinstance(value, numbers.Real) or not np.isfinite(float(value)):
        raise InvalidParameterError(f"{name} must be a finite real, got {value!r}")
    value = float(value)
    if minimum is not None:
        if strict and value <= minimum:
            raise InvalidParameterError(f"{name} must be > {minimum}, got {value}")
        if not strict and value < minimum:
            raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_probability(value, name: str = "p") -> float:
    value = check_real(value, name, minimum=0.0)
    if value > 1.0:
        raise InvalidParameterError(f"{name} must be <= 1, got {value}")
    return value


def check_qubit_index(value, qubits: int, name: str = "qubit") -> int:
    value = check_count(value, name)
    if value >= qubits:
        raise InvalidParameterError(
            f"{name}={value} out of range for {qubits} qubits")
    return value


def check_finite_array(arr, name: str) -> np.ndarray:
    arr = np.asarray(arr)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains NaN or Inf")
    return arr
