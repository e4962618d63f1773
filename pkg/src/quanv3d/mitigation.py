"""Data-regression error mitigation.

Pairs (X_i = noisy outcome vector, y_i = noiseless outcome vector) from the
same random circuits train a linear corrector W that pulls noisy outcome
distributions back toward their noiseless counterparts:

    W = argmin  sum_i ||W X_i - y_i||^2  +  alpha ||W||_F^2

solved in closed form via the normal equations (X^T X + alpha I) W^T = X^T Y
(rows are samples), with no intercept.  The penalty enters unscaled by the
sample count: with outcome vectors on the probability scale the structure
worth inverting sits at eigenvalues comparable to the per-component noise
MSE (1e-7 .. 1e-5 here), and multiplying alpha by N would push the entire
usable grid past it.

Quality is reported as plain MSE against the noiseless vectors plus
*tendency accuracy*: the fraction of (sample, component) positions where
mitigation strictly moved the value toward the noiseless one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .errors import FormatError, IllConditionedError, InvalidParameterError
from .noise import NoiseSpec, run_noisy
from .reservoirs import G3Spec, sample_g3
from .seeding import TAG_SAMPLE, derive_seed
from .simulator import apply_circuit, measure_probs, sample_counts, zero_state
from .validation import check_count, check_real, check_seed

__all__ = [
    "DrerDataset",
    "RidgeModel",
    "gen_dataset",
    "ridge_solve",
    "fit_ridge",
    "mitigate",
    "score",
    "alpha_sweep",
    "write_dataset",
    "read_dataset",
    "RidgeErrorMitigator",
    "DEFAULT_ALPHA_GRID",
]

DEFAULT_ALPHA_GRID = (0.1, 0.01, 1e-4, 1e-5, 1e-6)


@dataclass
class DrerDataset:
    """Noisy/noiseless outcome pairs, rows as samples, plus provenance."""

    X: np.ndarray
    Y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.Y = np.atleast_2d(np.asarray(self.Y, dtype=np.float64))
        if self.X.shape != self.Y.shape:
            raise InvalidParameterError(
                f"X and Y must have equal shape, got {self.X.shape} vs {self.Y.shape}")
        if self.X.shape[0] < 1:
            raise InvalidParameterError("dataset needs at least one pair")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise InvalidParameterError("dataset contains non-finite values")
        if self.X.min() < 0 or self.Y.min() < 0:
            raise InvalidParameterError("outcome vectors must be nonnegative")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class RidgeModel:
    """Fitted corrector: mitigated = W @ noisy."""

    W: np.ndarray
    alpha: float

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim != 2 or not np.all(np.isfinite(W)):
            raise InvalidParameterError("W must be a finite matrix")
        object.__setattr__(self, "W", W)


def _one_pair(qubits: int, gate_count: int, noise: NoiseSpec, shots, seed: int,
              index: int) -> tuple[np.ndarray, np.ndarray]:
    circuit = sample_g3(G3Spec(qubits, gate_count,
                               derive_seed(seed, TAG_SAMPLE, index)))
    y = measure_probs(apply_circuit(zero_state(qubits), circuit))
    x = run_noisy(circuit, noise)
    if shots != "exact":
        x = sample_counts(x, shots, derive_seed(seed, TAG_SAMPLE, index, 1)).astype(float)
        y = sample_counts(y, shots, derive_seed(seed, TAG_SAMPLE, index, 2)).astype(float)
    return x, y


def gen_dataset(n_samples: int, qubits: int, gate_count: int, noise: NoiseSpec,
                shots="exact", seed: int = 0, jobs: int = 1) -> DrerDataset:
    """Generate pairs from fresh seeded G3 circuits on |0...0>.

    Each sample runs one circuit both noiselessly (pure state) and noisily
    (density matrix).  ``shots="exact"`` stores exact probabilities; an
    integer stores multinomial counts, with X and Y drawn on the same shot
    budget.  Deterministic per seed, for any ``jobs``.
    """
    n_samples = check_count(n_samples, "n_samples", minimum=1)
    qubits = check_count(qubits, "qubits", minimum=2)
    if qubits > 10:
        raise InvalidParameterError(f"qubits must be <= 10, got {qubits}")
    gate_count = check_count(gate_count, "gate_count", minimum=0)
    seed = check_seed(seed)
    if shots != "exact":
        shots = check_count(shots, "shots", minimum=1)

    if jobs == 1:
        pairs = [_one_pair(qubits, gate_count, noise, shots, seed, i)
                 for i in range(n_samples)]
    else:
        pairs = Parallel(n_jobs=jobs)(
            delayed(_one_pair)(qubits, gate_count, noise, shots, seed, i)
            for i in range(n_samples))
    X = np.stack([p[0] for p in pairs])
    Y = np.stack([p[1] for p in pairs])
    meta = {
        "qubits": qubits,
        "gate_count": gate_count,
        "channel": noise.channel,
        "p": noise.p,
        "shots": shots,
        "seed": seed,
    }
    return DrerDataset(X, Y, meta)


def ridge_solve(X: np.ndarray, Y: np.ndarray, alpha: float) -> np.ndarray:
    """Closed-form minimizer B of sum_i ||x_i B - y_i||^2 + alpha ||B||_F^2.

    X is (n, f), Y is (n, k); returns B as (f, k) via the Cholesky-factored
    normal equations.  Shared by the mitigation fit and the layer readout.
    """
    lhs = X.T @ X + alpha * np.eye(X.shape[1])
    try:
        B = cho_solve(cho_factor(lhs), X.T @ Y)
    except LinAlgError as exc:
        raise IllConditionedError(
            f"normal equations are singular at alpha={alpha}; "
            "use alpha > 0 to regularize") from exc
    if not np.all(np.isfinite(B)):
        raise IllConditionedError(
            f"normal equations produced non-finite weights at alpha={alpha}; "
            "use a larger alpha")
    return B


def fit_ridge(dataset: DrerDataset, alpha: float) -> RidgeModel:
    """Solve the ridge normal equations (X^T X + alpha I) W^T = X^T Y.

    alpha=0 is permitted when X has full column rank; a singular system
    raises :class:`IllConditionedError` advising alpha > 0.
    """
    alpha = check_real(alpha, "alpha", minimum=0.0)
    Wt = ridge_solve(dataset.X, dataset.Y, alpha)
    return RidgeModel(Wt.T, alpha)


def mitigate(model: RidgeModel, noisy: np.ndarray, clip: bool = False) -> np.ndarray:
    """Apply the corrector: W @ x (or row-wise for a batch).

    Raw values are returned by default and used for all scoring; small
    negative entries are genuine regression output.  ``clip=True`` zeroes
    them, intended only for human-facing reports.
    """
    noisy = np.asarray(noisy, dtype=np.float64)
    d = model.W.shape[1]
    if noisy.shape[-1] != d:
        raise InvalidParameterError(
            f"expected vectors of dimension {d}, got {noisy.shape}")
    out = noisy @ model.W.T
    if clip:
        out = np.clip(out, 0.0, None)
    return out


def score(model: RidgeModel, test: DrerDataset) -> dict:
    """MSE of noisy and mitigated vectors against noiseless, plus tendency
    accuracy.

    All metrics average over every (sample, component) position.  Tendency
    counts positions where |mitigated - noiseless| < |noisy - noiseless|
    holds strictly; ties — including positions the noise never moved —
    count as failures.
    """
    mitigated = mitigate(model, test.X)
    err_noisy = test.X - test.Y
    err_mit = mitigated - test.Y
    return {
        "mse_noisy": float(np.mean(err_noisy**2)),
        "mse_mitigated": float(np.mean(err_mit**2)),
        "tendency_accuracy": float(np.mean(np.abs(err_mit) < np.abs(err_noisy))),
    }


def alpha_sweep(train: DrerDataset, validation: DrerDataset,
                grid=DEFAULT_ALPHA_GRID) -> tuple[float, dict]:
    """Fit once per grid alpha on ``train``, score on ``validation``.

    Returns (best alpha, {alpha: scores}); best = minimum validation
    mse_mitigated, ties broken toward the larger alpha.
    """
    grid = [check_real(a, "alpha", minimum=0.0) for a in grid]
    if not grid:
        raise InvalidParameterError("alpha grid must be nonempty")
    results: dict[float, dict] = {}
    for alpha in grid:
        results[alpha] = score(fit_ridge(train, alpha), validation)
    best = min(results, key=lambda a: (results[a]["mse_mitigated"], -a))
    return best, results


# -- dataset persistence (JSON lines) ------------------------------------

def write_dataset(dataset: DrerDataset, path) -> None:
    """One header line of metadata, then one ``{"x": [...], "y": [...]}``
    line per pair."""
    header = {"format": "drer-dataset", "version": 1,
              "n_samples": dataset.n_samples, "dim": dataset.dim}
    header.update(dataset.meta)
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for x, y in zip(dataset.X, dataset.Y):
            fh.write(json.dumps({"x": x.tolist(), "y": y.tolist()}) + "\n")


def read_dataset(path) -> DrerDataset:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty dataset file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed dataset header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != "drer-dataset":
        raise FormatError("missing drer-dataset header line")
    xs, ys = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            pair = json.loads(line)
            xs.append(pair["x"])
            ys.append(pair["y"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"malformed pair on line {lineno}: {exc}") from exc
    meta = {k: v for k, v in header.items()
            if k not in ("format", "version", "n_samples", "dim")}
    dataset = DrerDataset(np.asarray(xs), np.asarray(ys), meta)
    declared = header.get("n_samples")
    if declared is not None and declared != dataset.n_samples:
        raise FormatError(
            f"header declares {declared} samples, file has {dataset.n_samples}")
    return dataset


# -- sklearn facade ------------------------------------------------------

class RidgeErrorMitigator(RegressorMixin, BaseEstimator):
    """sklearn-style wrapper around :func:`fit_ridge` / :func:`mitigate`.

    fit(X, y) takes noisy vectors X and noiseless targets y (both
    (n_samples, dim)); predict applies the learned corrector.
    """

    def __init__(self, alpha: float = 1e-6):
        self.alpha = alpha

    def fit(self, X, y):
        X = check_array(X)
        y = check_array(y)
        model = fit_ridge(DrerDataset(X, y), self.alpha)
        self.model_ = model
        self.W_ = model.W
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError(
                "This RidgeErrorMitigator instance is not fitted yet; "
                "call fit first")
        X = check_array(X)
        return mitigate(self.model_, X)
