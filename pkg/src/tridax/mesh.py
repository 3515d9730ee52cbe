"""Batched structured meshes and axis-oriented line solves.

Storage is x-contiguous row-major per mesh: element ``(b, i, j, k)`` lives
at flat offset ``b*x*y*z + k*x*y + j*x + i``, i.e. the data array is shaped
``(batch, z, y, x)`` in C order. Lines along one axis form a batch of
independent tridiagonal systems; sweeps gather them in blocks of
``group * width`` lines, solve the block with the shared kernels, and
scatter the results back. Blocking changes only the execution grouping,
never the per-line arithmetic, so results are bitwise independent of the
blocking parameters.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from . import core
from .errors import LineSolveError, ZeroPivot
from .precision import Precision

MESH_MAGIC = b"TRIDAX01"
_HEADER = struct.Struct("<8s5I4x")  # magic, precision bits, B, x, y, z; padded to 32 bytes
assert _HEADER.size == 32


class Axis(Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, name) -> "Axis":
        if isinstance(name, Axis):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown axis {name!r}") from None


@dataclass
class Mesh:
    """A batch of scalar fields over one rectangular 2-D or 3-D domain."""

    data: np.ndarray  # (batch, z, y, x)
    spatial_ndim: int

    def __post_init__(self):
        if self.data.ndim != 4:
            raise ValueError(f"mesh storage must be (batch, z, y, x), got {self.data.shape}")
        if self.spatial_ndim not in (2, 3):
            raise ValueError("mesh must be 2-D or 3-D")
        if self.spatial_ndim == 2 and self.data.shape[1] != 1:
            raise ValueError("2-D mesh must have z extent 1")
        if min(self.data.shape) < 1:
            raise ValueError("mesh extents must be positive")
        Precision.from_dtype(self.data.dtype)

    @classmethod
    def zeros(cls, dims, batch: int = 1, precision: Precision = Precision.FP64) -> "Mesh":
        dims = tuple(int(e) for e in dims)
        if len(dims) == 2:
            dims = dims + (1,)
            ndim = 2
        elif len(dims) == 3:
            ndim = 3
        else:
            raise ValueError("dims must be (x, y) or (x, y, z)")
        x, y, z = dims
        return cls(np.zeros((batch, z, y, x), dtype=precision.dtype), ndim)

    @classmethod
    def from_array(cls, values, dims, batch: int = 1) -> "Mesh":
        dims = tuple(int(e) for e in dims)
        ndim = len(dims)
        x, y, z = dims if ndim == 3 else dims + (1,)
        arr = np.asarray(values).reshape(batch, z, y, x)
        return cls(arr, ndim)

    @property
    def batch(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        b, z, y, x = self.data.shape
        return (x, y) if self.spatial_ndim == 2 else (x, y, z)

    @property
    def precision(self) -> Precision:
        return Precision.from_dtype(self.data.dtype)

    @property
    def points(self) -> int:
        return int(self.data.size)

    @property
    def nbytes(self) -> int:
        return int(self.data.nbytes)

    def extent(self, axis: Axis) -> int:
        b, z, y, x = self.data.shape
        return {Axis.X: x, Axis.Y: y, Axis.Z: z}[axis]

    def solved_axes(self) -> tuple[Axis, ...]:
        return (Axis.X, Axis.Y) if self.spatial_ndim == 2 else (Axis.X, Axis.Y, Axis.Z)

    def copy(self) -> "Mesh":
        return Mesh(self.data.copy(), self.spatial_ndim)

    def astype(self, precision: Precision) -> "Mesh":
        return Mesh(self.data.astype(precision.dtype), self.spatial_ndim)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data)))


@dataclass(frozen=True)
class LineBatchView:
    """Counting view of the line systems a mesh exposes along one axis."""

    axis: Axis
    system_size: int
    system_count: int


def line_batch_view(mesh: Mesh, axis) -> LineBatchView:
    axis = Axis.parse(axis)
    if axis is Axis.Z and mesh.spatial_ndim == 2:
        raise ValueError("2-D mesh has no z axis")
    size = mesh.extent(axis)
    count = mesh.points // size
    return LineBatchView(axis, size, count)


def line_indices(mesh: Mesh, axis) -> Iterator[tuple[int, int, int]]:
    """(batch, plane, line-in-plane) triples in sweep order.

    X lines stream plane-by-plane in storage order; Y lines come from
    buffered XY planes; Z lines from buffered XZ planes. Unit-stride reads
    stay within the buffered plane in every case.
    """
    axis = Axis.parse(axis)
    b_, z, y, x = mesh.data.shape
    for b in range(b_):
        if axis is Axis.X:
            for k in range(z):
                for j in range(y):
                    yield b, k, j
        elif axis is Axis.Y:
            for k in range(z):
                for i in range(x):
                    yield b, k, i
        else:
            for j in range(y):
                for i in range(x):
                    yield b, j, i


def _line_view(data: np.ndarray, axis: Axis, idx: tuple[int, int, int]) -> np.ndarray:
    b, p, q = idx
    if axis is Axis.X:
        return data[b, p, q, :]
    if axis is Axis.Y:
        return data[b, p, :, q]
    return data[b, :, p, q]


def gather_lines(mesh: Mesh, axis) -> Iterator[np.ndarray]:
    """Yield a copy of every line along ``axis`` in sweep order."""
    axis = Axis.parse(axis)
    for idx in line_indices(mesh, axis):
        yield _line_view(mesh.data, axis, idx).copy()


def scatter_lines(mesh: Mesh, axis, lines) -> None:
    """Write lines back in the same order ``gather_lines`` produced them."""
    axis = Axis.parse(axis)
    count = 0
    for idx, line in zip(line_indices(mesh, axis), lines):
        _line_view(mesh.data, axis, idx)[:] = line
        count += 1
    expected = line_batch_view(mesh, axis).system_count
    if count != expected:
        raise ValueError(f"got {count} lines, expected {expected}")


def block_transpose(tile: np.ndarray) -> np.ndarray:
    """Transpose one square tile; applying it twice is the identity.

    This is the reordering the x-dimension data path performs to turn
    ``width`` consecutive memory words into one element of ``width``
    different lines.
    """
    tile = np.asarray(tile)
    if tile.ndim != 2 or tile.shape[0] != tile.shape[1]:
        raise ValueError(f"tile must be square, got {tile.shape}")
    return tile.T.copy()


class CoefficientSource:
    """Supplies (a, b, c) coefficients for the lines of a sweep.

    ``is_stored`` distinguishes coefficient fields that occupy memory (and
    therefore count as transferred bytes) from ones generated on the fly
    inside the sweep.
    """

    is_stored = False

    def line_block(self, mesh: Mesh, axis: Axis, indices) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError


class StoredCoefficients(CoefficientSource):
    """Coefficients read from three meshes congruent with the swept mesh."""

    is_stored = True

    def __init__(self, a: Mesh, b: Mesh, c: Mesh):
        if not (a.data.shape == b.data.shape == c.data.shape):
            raise ValueError("coefficient meshes must share the swept mesh's shape")
        self.a = a
        self.b = b
        self.c = c

    def line_block(self, mesh, axis, indices):
        if self.a.data.shape != mesh.data.shape:
            raise ValueError("coefficient meshes do not match the swept mesh")
        out = []
        for field in (self.a, self.b, self.c):
            out.append(np.stack([_line_view(field.data, axis, idx) for idx in indices]))
        return tuple(out)


class ConstantLineCoefficients(CoefficientSource):
    """One (a, b, c) line profile per axis, shared by every line.

    ``profile(n, dtype)`` returns the three length-n vectors; results are
    cached per (axis length, dtype) and broadcast across the block.
    """

    def __init__(self, profile):
        self._profile = profile
        self._cache: dict = {}

    def line_block(self, mesh, axis, indices):
        n = mesh.extent(axis)
        key = (n, mesh.data.dtype)
        if key not in self._cache:
            self._cache[key] = self._profile(n, mesh.data.dtype)
        a, b, c = self._cache[key]
        shape = (len(indices), n)
        return (np.broadcast_to(a, shape), np.broadcast_to(b, shape),
                np.broadcast_to(c, shape))


def solve_lines(mesh: Mesh, coefficients: CoefficientSource, axis,
                algo: str = "thomas", *, group: int = 1, width: int = 1,
                tiles: int | None = None, out: Mesh | None = None,
                threads: int = 1) -> Mesh:
    """Solve every line system along ``axis``, writing solutions over ``d``.

    The mesh holds the right-hand sides; ``coefficients`` supplies (a, b, c)
    per line. Lines are processed in interleaved blocks of ``group * width``
    (with a remainder block when the count does not divide); the grouping
    mirrors how hardware hides the forward-sweep dependency but has no
    effect on the numerical result. ``out`` may alias ``mesh`` for an
    in-place update; by default a new mesh is returned.
    """
    axis = Axis.parse(axis)
    if group < 1 or width < 1:
        raise ValueError("group and width must be >= 1")
    if axis is Axis.Z and mesh.spatial_ndim == 2:
        raise ValueError("2-D mesh has no z axis")
    if out is None:
        out = mesh.copy()
    elif out.data.shape != mesh.data.shape:
        raise ValueError("destination mesh shape differs from source")

    floor = mesh.precision.pivot_floor
    indices = list(line_indices(mesh, axis))
    lines_per_mesh = len(indices) // mesh.batch
    block = group * width
    blocks = [(s, indices[s:s + block]) for s in range(0, len(indices), block)]

    def run(job):
        start, block_indices = job
        d = np.stack([_line_view(mesh.data, axis, idx) for idx in block_indices])
        a, b, c = coefficients.line_block(mesh, axis, block_indices)
        try:
            if algo == "thomas":
                u = core._thomas_kernel(a, b, c, d, floor)
            elif algo == "pcr":
                u = core._pcr_kernel(a, b, c, d, floor)
            elif algo in ("thomas-thomas", "thomas-pcr"):
                from . import tiled

                fn = (tiled.thomas_thomas_solve if algo == "thomas-thomas"
                      else tiled.thomas_pcr_solve)
                u = np.empty_like(d)
                for r in range(d.shape[0]):
                    sys_r = core.TridiagonalSystem(a[r], b[r], c[r], d[r])
                    u[r] = fn(sys_r, tiles)
            else:
                raise ValueError(f"unknown algorithm {algo!r}")
        except ZeroPivot as exc:
            pos = start + (exc.line or 0)
            raise LineSolveError(pos // lines_per_mesh, pos % lines_per_mesh,
                                 axis.value) from exc
        for r, idx in enumerate(block_indices):
            _line_view(out.data, axis, idx)[:] = u[r]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, blocks))
    else:
        for blk in blocks:
            run(blk)
    return out


# ---------------------------------------------------------------------------
# Binary mesh format: 32-byte header (magic "TRIDAX01"; precision bits,
# batch, x, y, z as little-endian uint32; z == 0 marks a 2-D mesh) followed
# by raw little-endian scalars in storage order.
# ---------------------------------------------------------------------------


def write_mesh(path, mesh: Mesh) -> None:
    x, y = mesh.dims[0], mesh.dims[1]
    z = mesh.dims[2] if mesh.spatial_ndim == 3 else 0
    bits = 32 if mesh.precision is Precision.FP32 else 64
    header = _HEADER.pack(MESH_MAGIC, bits, mesh.batch, x, y, z)
    le = mesh.data.astype("<f4" if bits == 32 else "<f8", copy=False)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(le.tobytes())


def read_mesh(path) -> Mesh:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError("truncated mesh header")
        magic, bits, batch, x, y, z = _HEADER.unpack(raw)
        if magic != MESH_MAGIC:
            raise ValueError(f"bad mesh magic {magic!r}")
        if bits not in (32, 64):
            raise ValueError(f"bad precision code {bits}")
        ndim = 2 if z == 0 else 3
        z = max(z, 1)
        count = batch * x * y * z
        data = np.frombuffer(fh.read(), dtype="<f4" if bits == 32 else "<f8")
        if data.size != count:
            raise ValueError(f"mesh payload has {data.size} scalars, expected {count}")
    arr = data.astype(np.float32 if bits == 32 else np.float64).reshape(batch, z, y, x)
    return Mesh(arr, ndim)
