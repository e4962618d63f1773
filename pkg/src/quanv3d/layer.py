"""The quantum convolutional layer: grid -> blocks -> FRQI -> reservoir ->
measurement -> feature maps.

One *quantum filter* is one fixed reservoir drawn from the master seed and
reused for every block, mirroring the weight sharing of a classical conv
filter.  Each input channel is processed independently; each n^3 block
contributes its full 2^q outcome-probability vector, so a (C, N, N, N)
input becomes a (C * 2^q, N/n, N/n, N/n) feature map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .circuits import Circuit
from .errors import InvalidParameterError
from .frqi import frqi_state, normalize_block, position_qubits
from .mitigation import ridge_solve
from .noise import NoiseSpec, run_noisy
from .reservoirs import G3Spec, IsingSpec, apply_reservoir, ising_unitary, sample_g3
from .seeding import TAG_BLOCK, TAG_RESERVOIR, derive_seed
from .simulator import measure_probs, sample_counts
from .validation import check_count, check_real, check_seed
from .voxels import VoxelGrid, partition

__all__ = [
    "QConvConfig",
    "qconv_forward",
    "reservoir_sweep",
    "readout_fit",
    "mean_feature_support",
    "QuantumConv3D",
]


@dataclass(frozen=True)
class QConvConfig:
    """Layer configuration.

    ``reservoir`` is a G3 or Ising spec template; its own ``seed`` field is
    ignored and replaced by one derived from ``master_seed``, so a config's
    outputs are a function of ``master_seed`` alone.  ``filter_index``
    distinguishes multiple filters sharing one master seed.
    """

    n: int
    reservoir: "G3Spec | IsingSpec"
    noise: NoiseSpec | None = None
    shots: "int | str" = "exact"
    master_seed: int = 0
    filter_index: int = 0

    def __post_init__(self):
        check_count(self.n, "n", minimum=1)
        check_seed(self.master_seed, "master_seed")
        check_count(self.filter_index, "filter_index")
        if not isinstance(self.reservoir, (G3Spec, IsingSpec)):
            raise InvalidParameterError(
                f"reservoir must be a G3Spec or IsingSpec, got {type(self.reservoir)!r}")
        q = position_qubits(self.n) + 1
        if self.reservoir.qubits != q:
            raise InvalidParameterError(
                f"reservoir spans {self.reservoir.qubits} qubits but n={self.n} "
                f"blocks need {q}")
        if self.shots != "exact":
            check_count(self.shots, "shots", minimum=1)

    @property
    def qubits(self) -> int:
        return position_qubits(self.n) + 1


def draw_reservoir(config: QConvConfig):
    """Instantiate the filter's fixed reservoir from the master seed."""
    seed = derive_seed(config.master_seed, TAG_RESERVOIR, config.filter_index)
    spec = replace(config.reservoir, seed=seed)
    if isinstance(spec, G3Spec):
        return sample_g3(spec)
    return ising_unitary(spec)


def _block_features(cube: np.ndarray, vmin: float, vmax: float, reservoir,
                    config: QConvConfig, block_seed: int) -> np.ndarray:
    block = normalize_block(cube, vmin, vmax)
    psi = frqi_state(block)
    if config.noise is not None:
        if not isinstance(reservoir, Circuit):
            raise InvalidParameterError(
                "noisy execution needs a gate-level reservoir (G3); the Ising "
                "unitary has no gate decomposition to attach noise to")
        probs = run_noisy(reservoir, config.noise, initial=psi)
    else:
        probs = measure_probs(apply_reservoir(psi, reservoir))
    if config.shots != "exact":
        probs = sample_counts(probs, config.shots, block_seed) / config.shots
    return probs


def qconv_forward(grid: VoxelGrid, config: QConvConfig, jobs: int = 1) -> VoxelGrid:
    """Run the layer over every block of the grid.

    The FRQI normalization scale (min/max) is computed once over the whole
    grid, so all blocks share it.  Output channel c*2^q + j holds outcome
    j's probability for input channel c.  Bit-identical for any ``jobs``.
    """
    if grid.side % config.n != 0:
        raise InvalidParameterError(
            f"block side n={config.n} must divide grid side N={grid.side}")
    vmin, vmax = grid.value_range()
    reservoir = draw_reservoir(config)
    blocks = partition(grid, config.n)
    seeds = [derive_seed(config.master_seed, TAG_BLOCK, i) for i in range(len(blocks))]

    if jobs == 1:
        feats = [_block_features(cube, vmin, vmax, reservoir, config, s)
                 for (_, cube), s in zip(blocks, seeds)]
    else:
        feats = Parallel(n_jobs=jobs)(
            delayed(_block_features)(cube, vmin, vmax, reservoir, config, s)
            for (_, cube), s in zip(blocks, seeds))

    dim = 1 << config.qubits
    per_axis = grid.side // config.n
    out = np.zeros((grid.channels * dim, per_axis, per_axis, per_axis))
    for (index, _), probs in zip(blocks, feats):
        lo = index.channel * dim
        out[lo:lo + dim, index.bx, index.by, index.bz] = probs
    return VoxelGrid(out)


def reservoir_sweep(grid: VoxelGrid, gate_counts, master_seed: int, n: int = 4,
                    noise: NoiseSpec | None = None, shots="exact",
                    jobs: int = 1) -> list[VoxelGrid]:
    """qconv_forward once per G3 gate count, sharing one seed schedule.

    With a shared master seed the sampled circuits are prefix-extensions of
    one another, so feature maps differ only through reservoir depth.
    """
    master_seed = check_seed(master_seed, "master_seed")
    qubits = position_qubits(n) + 1
    maps = []
    for count in gate_counts:
        config = QConvConfig(n=n,
                             reservoir=G3Spec(qubits, check_count(count, "gate_count"), 0),
                             noise=noise, shots=shots, master_seed=master_seed)
        maps.append(qconv_forward(grid, config, jobs=jobs))
    return maps


def readout_fit(features: "list[VoxelGrid]", targets, alpha: float,
                validation_fraction: float = 0.3) -> dict:
    """Ridge readout (with intercept) from flattened feature maps to
    scalar targets.

    Features and targets are centered on their training means before the
    ridge solve, so the intercept is unpenalized; as alpha grows the
    predictor degrades gracefully to the train-mean baseline rather than
    to zero.  The trailing ``validation_fraction`` of samples is held out
    (order is the caller's; keep it fixed for reproducibility).  Returns
    weights, intercept, and train/validation MSE, plus the MSE of
    predicting the training-target mean as a signal baseline.
    """
    alpha = check_real(alpha, "alpha", minimum=0.0)
    validation_fraction = check_real(validation_fraction, "validation_fraction",
                                     minimum=0.0)
    if len(features) != len(np.atleast_1d(targets)):
        raise InvalidParameterError("one target per feature map is required")
    if len(features) < 2:
        raise InvalidParameterError("readout_fit needs at least 2 samples")
    shapes = {fm.data.shape for fm in features}
    if len(shapes) != 1:
        raise InvalidParameterError(f"feature maps disagree in shape: {shapes}")

    X = np.stack([fm.data.ravel() for fm in features])
    y = np.asarray(targets, dtype=np.float64).reshape(-1, 1)
    n_val = min(max(1, round(validation_fraction * len(features))), len(features) - 1)
    X_train, X_val = X[:-n_val], X[-n_val:]
    y_train, y_val = y[:-n_val], y[-n_val:]

    x_mean = X_train.mean(axis=0)
    y_mean = float(y_train.mean())
    weights = ridge_solve(X_train - x_mean, y_train - y_mean, alpha)  # (F, 1)
    pred_train = (X_train - x_mean) @ weights + y_mean
    pred_val = (X_val - x_mean) @ weights + y_mean
    baseline = float(np.mean((y_val - y_mean) ** 2))
    return {
        "weights": weights.ravel(),
        "intercept": y_mean - float(x_mean @ weights[:, 0]),
        "alpha": alpha,
        "n_train": len(y_train),
        "n_validation": n_val,
        "train_mse": float(np.mean((pred_train - y_train) ** 2)),
        "validation_mse": float(np.mean((pred_val - y_val) ** 2)),
        "baseline_mse": baseline,
    }


def mean_feature_support(feature_map: VoxelGrid, qubits: int,
                         threshold: float = 1e-6) -> float:
    """Average, over blocks, of how many of the 2^q outcomes carry at least
    ``threshold`` probability — a crude spread measure for reservoir depth
    comparisons."""
    dim = 1 << qubits
    if feature_map.channels % dim != 0:
        raise InvalidParameterError(
            f"feature map channels {feature_map.channels} are not a multiple "
            f"of 2^qubits = {dim}")
    s = feature_map.side
    slices = feature_map.data.reshape(feature_map.channels // dim, dim, s**3)
    return float((slices >= threshold).sum(axis=1).mean())


# -- sklearn facade ------------------------------------------------------

class QuantumConv3D(TransformerMixin, BaseEstimator):
    """sklearn-style wrapper around :func:`qconv_forward`.

    fit() draws the fixed reservoir from ``master_seed`` (inputs only get
    validated — the filter is untrained); transform() maps each VoxelGrid
    to its feature map.  Accepts a single grid or a list of grids.
    """

    def __init__(self, n: int = 4, reservoir: str = "g3", gate_count: int = 300,
                 Js: float = 1.0, h: float = 0.1, T: float = 10.0,
                 noise_channel: str | None = None, noise_p: float = 0.0,
                 shots="exact", master_seed: int = 0, jobs: int = 1):
        self.n = n
        self.reservoir = reservoir
        self.gate_count = gate_count
        self.Js = Js
        self.h = h
        self.T = T
        self.noise_channel = noise_channel
        self.noise_p = noise_p
        self.shots = shots
        self.master_seed = master_seed
        self.jobs = jobs

    def _build_config(self) -> QConvConfig:
        qubits = position_qubits(self.n) + 1
        if self.reservoir == "g3":
            spec = G3Spec(qubits, self.gate_count, 0)
        elif self.reservoir == "ising":
            spec = IsingSpec(qubits, Js=self.Js, h=self.h, T=self.T, seed=0)
        else:
            raise InvalidParameterError(
                f"reservoir must be 'g3' or 'ising', got {self.reservoir!r}")
        noise = None
        if self.noise_channel is not None:
            noise = NoiseSpec(self.noise_channel, self.noise_p)
        return QConvConfig(n=self.n, reservoir=spec, noise=noise,
                           shots=self.shots, master_seed=self.master_seed)

    def fit(self, X, y=None):
        self.config_ = self._build_config()
        self.reservoir_ = draw_reservoir(self.config_)
        return self

    def transform(self, X):
        if not hasattr(self, "config_"):
            raise NotFittedError(
                "This QuantumConv3D instance is not fitted yet; call fit first")
        if isinstance(X, VoxelGrid):
            return qconv_forward(X, self.config_, jobs=self.jobs)
        return [qconv_forward(grid, self.config_, jobs=self.jobs) for grid in X]
