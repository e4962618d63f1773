import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quanv3d import (BlockIndex, FormatError, InvalidParameterError, VoxelGrid,
                     gaussian_blur, partition, read_grid, synth_grid,
                     write_grid)


def test_grid_shape_and_properties():
    g = VoxelGrid(np.zeros((3, 4, 4, 4)))
    assert g.channels == 3
    assert g.side == 4


@pytest.mark.parametrize("bad", [
    np.zeros((4, 4, 4)),            # missing channel axis
    np.zeros((1, 4, 4, 2)),         # not cubic
    np.zeros((0, 4, 4, 4)),         # no channels
])
def test_grid_rejects_bad_shapes(bad):
    with pytest.raises(InvalidParameterError):
        VoxelGrid(bad)


def test_grid_rejects_non_finite():
    data = np.zeros((1, 2, 2, 2))
    data[0, 0, 0, 0] = np.nan
    with pytest.raises(InvalidParameterError):
        VoxelGrid(data)


def test_synth_grid_deterministic():
    a = synth_grid(2, 8, seed=42)
    b = synth_grid(2, 8, seed=42)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, synth_grid(2, 8, seed=43).data)


def test_synth_grid_kinds():
    z = synth_grid(1, 4, seed=0, kind="zeros")
    assert not z.data.any()
    u = synth_grid(1, 4, seed=0, kind="uniform-noise")
    assert (u.data >= 0).all() and (u.data < 1).all()
    s = synth_grid(1, 8, seed=0, kind="sparse-atoms")
    # sparse: most voxels stay empty
    assert (s.data > 0).sum() < s.data.size // 4
    assert (s.data > 0).sum() >= 1


def test_partition_covers_grid_once():
    g = synth_grid(2, 8, seed=7)
    blocks = partition(g, 4)
    assert len(blocks) == 2 * (8 // 4) ** 3
    # reassemble and compare
    rebuilt = np.zeros_like(g.data)
    for idx, block in blocks:
        assert isinstance(idx, BlockIndex)
        assert block.shape == (4, 4, 4)
        sl = (idx.channel,
              slice(4 * idx.bx, 4 * idx.bx + 4),
              slice(4 * idx.by, 4 * idx.by + 4),
              slice(4 * idx.bz, 4 * idx.bz + 4))
        rebuilt[sl] = block
    assert np.array_equal(rebuilt, g.data)


def test_partition_order_is_row_major():
    g = synth_grid(1, 4, seed=0)
    indices = [idx for idx, _ in partition(g, 2)]
    assert indices[0] == BlockIndex(0, 0, 0, 0)
    assert indices[1] == BlockIndex(0, 0, 0, 1)  # bz fastest
    assert indices[2] == BlockIndex(0, 0, 1, 0)


def test_partition_rejects_non_divisor():
    g = synth_grid(1, 8, seed=0)
    with pytest.raises(InvalidParameterError):
        partition(g, 3)


def test_blur_preserves_mass_and_is_linear():
    g = synth_grid(1, 8, seed=3)
    h = synth_grid(1, 8, seed=4)
    sigma = 1.0
    bg = gaussian_blur(g, sigma)
    # kernel is renormalized, so an interior point mass keeps its total
    mid = VoxelGrid.zeros(1, 9)
    mid.data[0, 4, 4, 4] = 2.0
    assert gaussian_blur(mid, 0.7).data.sum() == pytest.approx(2.0, rel=1e-12)
    # linearity
    combo = VoxelGrid(g.data + 0.5 * h.data)
    lhs = gaussian_blur(combo, sigma).data
    rhs = bg.data + 0.5 * gaussian_blur(h, sigma).data
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_blur_rejects_nonpositive_sigma():
    g = synth_grid(2, 4, seed=9)
    with pytest.raises(InvalidParameterError):
        gaussian_blur(g, 0.0)
    with pytest.raises(InvalidParameterError):
        gaussian_blur(g, -1.0)


def test_blur_spreads_point_mass():
    g = VoxelGrid.zeros(1, 7)
    g.data[0, 3, 3, 3] = 1.0
    b = gaussian_blur(g, 1.0)
    assert b.data[0, 3, 3, 3] < 1.0
    assert b.data[0, 3, 3, 4] > 0.0
    # isotropy at the center
    assert b.data[0, 3, 3, 4] == pytest.approx(b.data[0, 4, 3, 3])


def test_voxg_round_trip(tmp_path):
    g = synth_grid(3, 8, seed=11)
    path = tmp_path / "g.voxg"
    write_grid(g, path)
    back = read_grid(path)
    # float32 on disk
    np.testing.assert_allclose(back.data, g.data.astype(np.float32), rtol=0)
    assert back.data.dtype == np.float64


@settings(max_examples=25, deadline=None)
@given(channels=st.integers(1, 3), side=st.sampled_from([1, 2, 4]),
       seed=st.integers(0, 2**31))
def test_voxg_round_trip_property(tmp_path_factory, channels, side, seed):
    g = synth_grid(channels, side, seed=seed, kind="uniform-noise")
    path = tmp_path_factory.mktemp("voxg") / "g.voxg"
    write_grid(g, path)
    back = read_grid(path)
    assert back.channels == channels and back.side == side
    np.testing.assert_array_equal(back.data, g.data.astype(np.float32))


def _write_bytes(path, blob):
    with open(path, "wb") as fh:
        fh.write(blob)


def test_read_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.voxg"
    _write_bytes(path, b"NOPE" + bytes(12))
    with pytest.raises(FormatError) as err:
        read_grid(path)
    assert err.value.offset == 0


def test_read_rejects_bad_version(tmp_path):
    path = tmp_path / "bad.voxg"
    _write_bytes(path, b"VOXG" + (99).to_bytes(4, "little") + bytes(8))
    with pytest.raises(FormatError) as err:
        read_grid(path)
    assert err.value.offset == 4


def test_read_rejects_truncated_payload(tmp_path):
    g = synth_grid(1, 2, seed=0)
    path = tmp_path / "g.voxg"
    write_grid(g, path)
    blob = path.read_bytes()
    _write_bytes(path, blob[:-4])  # drop one float
    with pytest.raises(FormatError) as err:
        read_grid(path)
    assert "truncated" in str(err.value)


def test_read_rejects_trailing_garbage(tmp_path):
    g = synth_grid(1, 2, seed=0)
    path = tmp_path / "g.voxg"
    write_grid(g, path)
    _write_bytes(path, path.read_bytes() + b"xx")
    with pytest.raises(FormatError):
        read_grid(path)


def test_read_rejects_non_finite_payload(tmp_path):
    path = tmp_path / "g.voxg"
    header = b"VOXG" + (1).to_bytes(4, "little") + (1).to_bytes(4, "little") \
        + (1).to_bytes(4, "little")
    _write_bytes(path, header + np.array([np.inf], dtype="<f4").tobytes())
    with pytest.raises(FormatError):
        read_grid(path)
