"""quanv3d: a quantum convolutional layer for 3D voxel data.

Voxel grids are cut into n^3 blocks, FRQI-encoded into a small register,
transformed by a fixed random quantum reservoir (G3 circuit or Ising
evolution), and measured; the outcome probabilities form the layer's
feature maps.  Noisy execution under Kraus channels and regression-based
error mitigation round out the toolkit, together with a CLI that emits the
scaling and mitigation reports.
"""

from .circuits import (Circuit, Gate, circuit_from_json, circuit_to_json,
                       gate_matrix, inverse_circuit)
from .errors import (FormatError, IllConditionedError, InvalidParameterError,
                     QuanvError, RepresentationError, ResourceLimitError)
from .frqi import (AngleBlock, FrqiResources, frqi_amplitudes, frqi_circuit,
                   frqi_encoding_circuit, frqi_resources, frqi_state,
                   normalize_block, position_qubits)
from .layer import (QConvConfig, QuantumConv3D, mean_feature_support,
                    qconv_forward, readout_fit, reservoir_sweep)
from .mitigation import (DEFAULT_ALPHA_GRID, DrerDataset, RidgeErrorMitigator,
                         RidgeModel, alpha_sweep, fit_ridge, gen_dataset,
                         mitigate, read_dataset, ridge_solve, score,
                         write_dataset)
from .noise import (CHANNELS, NoiseSpec, apply_channel, iter_noisy_states,
                    kraus_ops, run_noisy)
from .reservoirs import (G3Spec, IsingSpec, apply_reservoir,
                         build_ising_hamiltonian, ising_unitary, sample_g3)
from .seeding import derive_seed, rng_from_seed
from .simulator import (allclose_up_to_phase, apply_circuit, circuit_unitary,
                        measure_probs, pure_to_density, sample_counts,
                        zero_state)
from .voxels import (BlockIndex, VoxelGrid, gaussian_blur, partition,
                     read_grid, synth_grid, write_grid)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # voxels
    "VoxelGrid", "BlockIndex", "synth_grid", "gaussian_blur", "partition",
    "read_grid", "write_grid",
    # circuits / simulator
    "Gate", "Circuit", "gate_matrix", "inverse_circuit", "circuit_to_json",
    "circuit_from_json", "zero_state", "pure_to_density", "apply_circuit",
    "measure_probs", "sample_counts", "circuit_unitary", "allclose_up_to_phase",
    # frqi
    "AngleBlock", "FrqiResources", "position_qubits", "normalize_block",
    "frqi_amplitudes", "frqi_state", "frqi_encoding_circuit", "frqi_circuit",
    "frqi_resources",
    # reservoirs
    "G3Spec", "IsingSpec", "sample_g3", "build_ising_hamiltonian",
    "ising_unitary", "apply_reservoir",
    # seeding
    "rng_from_seed", "derive_seed",
    # noise
    "CHANNELS", "NoiseSpec", "kraus_ops", "apply_channel", "run_noisy",
    "iter_noisy_states",
    # mitigation
    "DrerDataset", "RidgeModel", "gen_dataset", "ridge_solve", "fit_ridge",
    "mitigate", "score", "alpha_sweep", "write_dataset", "read_dataset",
    "RidgeErrorMitigator", "DEFAULT_ALPHA_GRID",
    # layer
    "QConvConfig", "qconv_forward", "reservoir_sweep", "readout_fit",
    "mean_feature_support", "QuantumConv3D",
    # errors
    "QuanvError", "InvalidParameterError", "RepresentationError",
    "ResourceLimitError", "FormatError", "IllConditionedError",
]
