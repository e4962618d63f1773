import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from quanv3d import (G3Spec, InvalidParameterError, IsingSpec, NoiseSpec,
                     QConvConfig, QuantumConv3D, VoxelGrid, mean_feature_support,
                     qconv_forward, readout_fit, reservoir_sweep, synth_grid)


def g3_config(n=2, gates=40, seed=0, **kw):
    from quanv3d import position_qubits
    return QConvConfig(n=n, reservoir=G3Spec(position_qubits(n) + 1, gates, 0),
                       master_seed=seed, **kw)


def test_output_geometry():
    grid = synth_grid(3, 8, seed=1)
    out = qconv_forward(grid, g3_config(n=2))
    assert out.channels == 3 * 16  # one 2^4 slice per input channel
    assert out.side == 4


def test_zero_grid_identity_reservoir():
    """All-zero input + empty reservoir: every block measures the bare
    encoding of theta = 0 — uniform 1/8 over the cos branch."""
    grid = VoxelGrid.zeros(1, 4)
    out = qconv_forward(grid, g3_config(n=2, gates=0))
    expected = np.zeros(16)
    expected[:8] = 1.0 / 8.0
    for bx in range(2):
        for by in range(2):
            for bz in range(2):
                np.testing.assert_allclose(out.data[:, bx, by, bz], expected,
                                           atol=1e-15)


def test_forward_deterministic_and_jobs_invariant():
    grid = synth_grid(2, 4, seed=5)
    config = g3_config(n=2, gates=60, seed=9)
    a = qconv_forward(grid, config)
    b = qconv_forward(grid, config)
    c = qconv_forward(grid, config, jobs=2)
    assert np.array_equal(a.data, b.data)
    assert np.array_equal(a.data, c.data)


def test_master_seed_changes_features():
    grid = synth_grid(1, 4, seed=5)
    a = qconv_forward(grid, g3_config(n=2, gates=60, seed=0))
    b = qconv_forward(grid, g3_config(n=2, gates=60, seed=1))
    assert not np.array_equal(a.data, b.data)


def test_feature_slices_are_distributions():
    grid = synth_grid(2, 8, seed=3)
    out = qconv_forward(grid, g3_config(n=4, gates=100))
    dim = 128
    for c in range(2):
        sums = out.data[c * dim:(c + 1) * dim].sum(axis=0)
        np.testing.assert_allclose(sums, 1.0, atol=1e-6)


def test_weight_sharing_equal_blocks_equal_features():
    """Two blocks with identical voxel content get identical features —
    one reservoir is shared across all blocks."""
    grid = VoxelGrid.zeros(1, 4)
    pattern = np.arange(8.0).reshape(2, 2, 2)
    grid.data[0, :2, :2, :2] = pattern
    grid.data[0, 2:, 2:, 2:] = pattern
    out = qconv_forward(grid, g3_config(n=2, gates=80, seed=4))
    np.testing.assert_array_equal(out.data[:, 0, 0, 0], out.data[:, 1, 1, 1])
    # a block with different content differs
    assert not np.array_equal(out.data[:, 0, 0, 0], out.data[:, 0, 1, 0])


def test_ising_reservoir_forward():
    from quanv3d import position_qubits
    grid = synth_grid(1, 4, seed=2)
    config = QConvConfig(n=2, reservoir=IsingSpec(position_qubits(2) + 1),
                         master_seed=3)
    out = qconv_forward(grid, config)
    sums = out.data.sum(axis=0)
    np.testing.assert_allclose(sums, 1.0, atol=1e-6)


def test_noisy_forward_differs_and_still_normalized():
    grid = synth_grid(1, 4, seed=7)
    clean = qconv_forward(grid, g3_config(n=2, gates=50, seed=1))
    noisy = qconv_forward(grid, g3_config(n=2, gates=50, seed=1,
                                          noise=NoiseSpec("depolarizing", 0.05)))
    assert not np.array_equal(clean.data, noisy.data)
    np.testing.assert_allclose(noisy.data.sum(axis=0), 1.0, atol=1e-6)


def test_ising_with_noise_rejected():
    from quanv3d import position_qubits
    grid = synth_grid(1, 4, seed=1)
    config = QConvConfig(n=2, reservoir=IsingSpec(position_qubits(2) + 1),
                         noise=NoiseSpec("depolarizing", 0.01), master_seed=0)
    with pytest.raises(InvalidParameterError, match="gate"):
        qconv_forward(grid, config)


def test_shots_mode_deterministic_normalized():
    grid = synth_grid(1, 4, seed=8)
    config = g3_config(n=2, gates=40, seed=2, shots=512)
    a = qconv_forward(grid, config)
    b = qconv_forward(grid, config)
    assert np.array_equal(a.data, b.data)
    np.testing.assert_allclose(a.data.sum(axis=0), 1.0, atol=1e-12)
    # counts are multiples of 1/shots
    assert np.allclose(a.data * 512, np.round(a.data * 512))


def test_config_rejects_mismatched_reservoir_width():
    with pytest.raises(InvalidParameterError, match="qubits"):
        QConvConfig(n=2, reservoir=G3Spec(5, 10, 0), master_seed=0)


def test_forward_rejects_non_divisor_block():
    grid = synth_grid(1, 6, seed=0)
    with pytest.raises(InvalidParameterError):
        qconv_forward(grid, g3_config(n=4, gates=10))


def test_reservoir_sweep_prefix_consistency():
    """Sweep maps share the seed schedule; depth 0 equals the bare encoding."""
    grid = synth_grid(1, 4, seed=6)
    maps = reservoir_sweep(grid, [0, 30, 60], master_seed=5, n=2)
    assert len(maps) == 3
    bare = qconv_forward(grid, g3_config(n=2, gates=0, seed=5))
    np.testing.assert_array_equal(maps[0].data, bare.data)
    assert not np.array_equal(maps[1].data, maps[2].data)


def test_mean_feature_support_counts_thresholded_outcomes():
    fm = VoxelGrid.zeros(4, 1)  # one block, 2-qubit slice
    fm.data[:, 0, 0, 0] = [0.5, 0.5, 0.0, 0.0]
    assert mean_feature_support(fm, 2) == 2.0
    fm.data[:, 0, 0, 0] = [1.0, 1e-9, 0.0, 0.0]
    assert mean_feature_support(fm, 2) == 1.0
    with pytest.raises(InvalidParameterError):
        mean_feature_support(fm, 3)  # 4 channels don't split into 8


def test_readout_fit_recovers_linear_target():
    """With more samples than features, a target that is an exact linear
    functional of the features fits to ~zero train and validation MSE and
    beats the predict-the-mean baseline."""
    grids = [synth_grid(1, 2, seed=s, kind="uniform-noise") for s in range(40)]
    config = g3_config(n=2, gates=30, seed=1)
    features = [qconv_forward(g, config) for g in grids]
    X = np.stack([f.data.ravel() for f in features])
    c = np.random.default_rng(0).normal(size=X.shape[1])
    result = readout_fit(features, X @ c, alpha=1e-10)
    assert result["train_mse"] < 1e-12
    assert result["validation_mse"] < 1e-12
    assert result["validation_mse"] < result["baseline_mse"]
    assert result["n_train"] + result["n_validation"] == 40


def test_readout_fit_validation():
    grids = [synth_grid(1, 4, seed=s) for s in range(3)]
    config = g3_config(n=2, gates=10)
    features = [qconv_forward(g, config) for g in grids]
    with pytest.raises(InvalidParameterError):
        readout_fit(features, [1.0, 2.0], alpha=1e-6)  # count mismatch
    with pytest.raises(InvalidParameterError):
        readout_fit(features[:1], [1.0], alpha=1e-6)  # too few samples


def test_estimator_facade():
    grid = synth_grid(1, 4, seed=3)
    est = QuantumConv3D(n=2, gate_count=40, master_seed=7)
    with pytest.raises(NotFittedError):
        est.transform(grid)
    est.fit([grid])
    out = est.transform(grid)
    assert isinstance(out, VoxelGrid)
    direct = qconv_forward(grid, g3_config(n=2, gates=40, seed=7))
    np.testing.assert_array_equal(out.data, direct.data)
    # list input -> list output
    outs = est.transform([grid, grid])
    assert len(outs) == 2
    np.testing.assert_array_equal(outs[0].data, outs[1].data)


def test_estimator_sklearn_plumbing():
    est = QuantumConv3D(n=2, gate_count=10, master_seed=1)
    params = est.get_params()
    assert params["n"] == 2 and params["gate_count"] == 10
    fresh = clone(est)
    assert not hasattr(fresh, "config_")
    est.set_params(noise_channel="depolarizing", noise_p=0.02)
    est.fit([])
    assert est.config_.noise == NoiseSpec("depolarizing", 0.02)


def test_estimator_ising_variant():
    grid = synth_grid(1, 4, seed=2)
    est = QuantumConv3D(n=2, reservoir="ising", T=5.0, master_seed=4).fit([grid])
    out = est.transform(grid)
    np.testing.assert_allclose(out.data.sum(axis=0), 1.0, atol=1e-6)
