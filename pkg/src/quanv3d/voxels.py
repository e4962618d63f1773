"""C-channel 3D voxel grids: synthesis, blur, partition, and persistence.

A grid holds ``C`` channels of an ``N x N x N`` volume as float64 in memory,
indexed ``(c, x, y, z)``.  On disk grids use the ``VOXG`` format (float32,
little-endian); see :func:`write_grid`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import FormatError, InvalidParameterError
from .seeding import rng_from_seed
from .validation import check_count, check_real, check_seed

__all__ = [
    "VoxelGrid",
    "BlockIndex",
    "synth_grid",
    "gaussian_blur",
    "partition",
    "read_grid",
    "write_grid",
]

SYNTH_KINDS = ("sparse-atoms", "uniform-noise", "zeros")

_MAGIC = b"VOXG"
_VERSION = 1
# Refuse to allocate absurd payloads from a corrupt header.
_MAX_VALUES = 1 << 31


class VoxelGrid:
    """C-channel cubic voxel grid.

    Wraps a float64 array of shape ``(C, N, N, N)``; all values finite.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 4:
            raise InvalidParameterError(
                f"grid data must be 4-dimensional (c, x, y, z), got shape {data.shape}")
        c, nx, ny, nz = data.shape
        if c < 1 or nx < 1 or not (nx == ny == nz):
            raise InvalidParameterError(
                f"grid must be C >= 1 channels of a cubic volume, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidParameterError("grid data contains NaN or Inf")
        self.data = data

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def side(self) -> int:
        return self.data.shape[1]

    @classmethod
    def zeros(cls, channels: int, side: int) -> "VoxelGrid":
        return cls(np.zeros((channels, side, side, side)))

    def copy(self) -> "VoxelGrid":
        return VoxelGrid(self.data.copy())

    def value_range(self) -> tuple[float, float]:
        """(min, max) over all channels — the shared normalization scale."""
        return float(self.data.min()), float(self.data.max())

    def __repr__(self) -> str:
        return f"VoxelGrid(channels={self.channels}, side={self.side})"


@dataclass(frozen=True)
class BlockIndex:
    """Position of one n^3 block: channel plus block coordinates."""

    channel: int
    bx: int
    by: int
    bz: int


def synth_grid(channels: int, side: int, seed: int, kind: str = "sparse-atoms") -> VoxelGrid:
    """Generate a synthetic grid, deterministic per seed.

    Kinds:
      - ``sparse-atoms``: a seeded number of point masses per channel on an
        otherwise empty grid (raw, unblurred).
      - ``uniform-noise``: i.i.d. uniform values in [0, 1).
      - ``zeros``: the zero grid.
    """
    channels = check_count(channels, "channels", minimum=1)
    side = check_count(side, "side", minimum=1)
    seed = check_seed(seed)
    if kind not in SYNTH_KINDS:
        raise InvalidParameterError(
            f"kind must be one of {SYNTH_KINDS}, got {kind!r}")

    data = np.zeros((channels, side, side, side))
    if kind == "zeros":
        return VoxelGrid(data)

    rng = rng_from_seed(seed)
    if kind == "uniform-noise":
        return VoxelGrid(rng.uniform(0.0, 1.0, size=data.shape))

    # sparse-atoms: occupancy-style point masses, count scaled to volume
    max_atoms = max(2, side**3 // 64)
    for c in range(channels):
        n_atoms = int(rng.integers(1, max_atoms + 1))
        coords = rng.integers(0, side, size=(n_atoms, 3))
        masses = rng.uniform(0.5, 1.5, size=n_atoms)
        for (x, y, z), m in zip(coords, masses):
            data[c, x, y, z] += m
    return VoxelGrid(data)


def _gaussian_kernel(sigma: float) -> np.ndarray:
    """1D Gaussian truncated at radius ceil(3*sigma), renormalized to sum 1."""
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_blur(grid: VoxelGrid, sigma: float = 1.0) -> VoxelGrid:
    """Separable 3D Gaussian blur per channel, zero padding at the faces.

    The truncated kernel is renormalized to sum 1, so any mass at least
    ceil(3*sigma) voxels from every face is conserved exactly.
    """
    sigma = check_real(sigma, "sigma", minimum=0.0, strict=True)
    kernel = _gaussian_kernel(sigma)
    out = grid.data.copy()
    for axis in (1, 2, 3):
        correlate1d(out, kernel, axis=axis, mode="constant", cval=0.0, output=out)
    return VoxelGrid(out)


def partition(grid: VoxelGrid, n: int) -> list[tuple[BlockIndex, np.ndarray]]:
    """Split the grid into C*(N/n)^3 blocks of shape (n, n, n).

    Blocks are returned in row-major (channel, bx, by, bz) order and tile
    the grid exactly once.  ``n`` must divide the grid side.
    """
    n = check_count(n, "n", minimum=1)
    N = grid.side
    if N % n != 0:
        raise InvalidParameterError(f"block side n={n} must divide grid side N={N}")
    per_axis = N // n
    blocks: list[tuple[BlockIndex, np.ndarray]] = []
    for c in range(grid.channels):
        for bx in range(per_axis):
            for by in range(per_axis):
                for bz in range(per_axis):
                    cube = grid.data[c,
                                     bx * n:(bx + 1) * n,
                                     by * n:(by + 1) * n,
                                     bz * n:(bz + 1) * n]
                    blocks.append((BlockIndex(c, bx, by, bz), np.ascontiguousarray(cube)))
    return blocks


def write_grid(grid: VoxelGrid, path) -> None:
    """Write a grid as VOXG: magic ``VOXG``, u32 version=1, u32 C, u32 N,
    then C*N^3 float32 little-endian values in (c, x, y, z) row-major order.
    No compression, no padding."""
    header = _MAGIC + struct.pack("<III", _VERSION, grid.channels, grid.side)
    payload = np.ascontiguousarray(grid.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_grid(path) -> VoxelGrid:
    """Read a VOXG file; raises :class:`FormatError` with a byte offset on
    malformed input."""
    with open(path, "rb") as fh:
        raw = fh.read()

    if len(raw) < 4 or raw[:4] != _MAGIC:
        raise FormatError("not a VOXG file (bad magic)", offset=0)
    if len(raw) < 16:
        raise FormatError("truncated header", offset=len(raw))
    version, channels, side = struct.unpack_from("<III", raw, 4)
    if version != _VERSION:
        raise FormatError(f"unsupported VOXG version {version}", offset=4)
    if channels < 1:
        raise FormatError("channel count must be >= 1", offset=8)
    if side < 1:
        raise FormatError("grid side must be >= 1", offset=12)
    n_values = channels * side**3
    if n_values > _MAX_VALUES:
        raise FormatError(
            f"dimensions {channels}x{side}^3 overflow the {_MAX_VALUES}-value limit",
            offset=8)
    expected = 16 + 4 * n_values
    if len(raw) < expected:
        raise FormatError(
            f"truncated payload: expected {expected} bytes, got {len(raw)}",
            offset=len(raw))
    if len(raw) > expected:
        raise FormatError(
            f"trailing data: expected {expected} bytes, got {len(raw)}",
            offset=expected)
    values = np.frombuffer(raw, dtype="<f4", offset=16, count=n_values)
    data = values.astype(np.float64).reshape(channels, side, side, side)
    if not np.all(np.isfinite(data)):
        raise FormatError("payload contains non-finite values", offset=16)
    return VoxelGrid(data)
