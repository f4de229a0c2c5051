"""Distributed FFTs over a worker group via slab decomposition.

3D pipeline (one slab of z-planes per worker):

    local 2D FFT in (x, y)  ->  all-to-all exchange to x-slabs
                            ->  local 1D FFT in z

2D pipeline (nz == 1, one slab of y-columns per worker):

    local 1D FFT in x  ->  exchange to x-slabs  ->  local 1D FFT in y

The exchange is pure data movement; no worker ever holds more than its
slab plus the in-flight blocks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fftcore import fft_2d, fft_axis
from .grid import GridSpec, SlabLayout, slab_layout
from .transport import Worker

__all__ = [
    "Layout",
    "Space",
    "DistField",
    "layout_for",
    "scatter",
    "gather",
    "exchange_z_to_x",
    "exchange_x_to_z",
    "exchange_y_to_x",
    "exchange_x_to_y",
    "dist_fft_forward",
    "dist_fft_inverse",
    "dist_fft_2d_forward",
    "dist_fft_2d_inverse",
    "forward",
    "inverse",
    "physical_layout",
]


class Layout(enum.Enum):
    Z_SLAB = 2  # value doubles as the decomposition axis
    X_SLAB = 0
    Y_SLAB = 1


class Space(enum.Enum):
    PHYSICAL = "physical"
    SPECTRAL = "spectral"


@dataclass
class DistField:
    """One worker's slab of a distributed field, tagged with its layout."""

    grid: GridSpec
    layout: Layout
    space: Space
    local: np.ndarray

    def expected_shape(self, rank: int, workers: int) -> tuple[int, int, int]:
        lay = layout_for(self.grid, self.layout, workers)
        shape = list(self.grid.shape)
        shape[lay.axis] = lay.counts[rank]
        return tuple(shape)


def layout_for(grid: GridSpec, layout: Layout, workers: int) -> SlabLayout:
    axis = layout.value
    return slab_layout(grid.n[axis], workers, axis=axis)


def physical_layout(grid: GridSpec) -> Layout:
    """Physical-space decomposition: z-slabs in 3D, y-slabs in 2D."""
    return Layout.Y_SLAB if grid.is_2d else Layout.Z_SLAB


def _local_slice(lay: SlabLayout, rank: int) -> tuple:
    sl = [slice(None)] * 3
    sl[lay.axis] = lay.local_slice(rank)
    return tuple(sl)


def scatter(full: np.ndarray, worker: Worker, grid: GridSpec,
            layout: Layout, space: Space = Space.PHYSICAL) -> DistField:
    """Take this worker's slab of a (replicated) full array."""
    if tuple(full.shape) != grid.shape:
        raise ValueError(
            f"scatter: array shape {full.shape} does not match grid {grid.shape}")
    lay = layout_for(grid, layout, worker.size)
    local = np.array(full[_local_slice(lay, worker.rank)],
                     dtype=np.complex128, copy=True)
    return DistField(grid=grid, layout=layout, space=space, local=local)


def gather(field: DistField, worker: Worker) -> np.ndarray:
    """Collectively reassemble the full array (returned on every rank)."""
    received = worker.all_to_all([field.local] * worker.size)
    lay = layout_for(field.grid, field.layout, worker.size)
    return np.concatenate(received, axis=lay.axis)


def _exchange(field: DistField, worker: Worker, src_layout: Layout,
              dst_layout: Layout) -> DistField:
    if field.layout is not src_layout:
        raise ValueError(
            f"exchange expects {src_layout.name} input, got {field.layout.name}")
    G = worker.size
    dst_lay = layout_for(field.grid, dst_layout, G)
    src_axis = src_layout.value
    blocks = [field.local[_local_slice(dst_lay, h)] for h in range(G)]
    received = worker.all_to_all(blocks)
    local = np.concatenate(received, axis=src_axis)
    if worker.meter is not None:
        worker.meter.sample(field.local.nbytes + local.nbytes)
    return DistField(grid=field.grid, layout=dst_layout, space=field.space,
                     local=np.ascontiguousarray(local))


def exchange_z_to_x(field: DistField, worker: Worker) -> DistField:
    return _exchange(field, worker, Layout.Z_SLAB, Layout.X_SLAB)


def exchange_x_to_z(field: DistField, worker: Worker) -> DistField:
    return _exchange(field, worker, Layout.X_SLAB, Layout.Z_SLAB)


def exchange_y_to_x(field: DistField, worker: Worker) -> DistField:
    return _exchange(field, worker, Layout.Y_SLAB, Layout.X_SLAB)


def exchange_x_to_y(field: DistField, worker: Worker) -> DistField:
    return _exchange(field, worker, Layout.X_SLAB, Layout.Y_SLAB)


def _require(field: DistField, layout: Layout, space: Space) -> None:
    if field.layout is not layout or field.space is not space:
        raise ValueError(
            f"expected {layout.name}/{space.name} field, "
            f"got {field.layout.name}/{field.space.name}")


def dist_fft_forward(field: DistField, worker: Worker) -> DistField:
    """Z-slab physical -> x-slab spectral (3D pipeline)."""
    _require(field, Layout.Z_SLAB, Space.PHYSICAL)
    a = fft_2d(field.local, forward=True)
    if worker.meter is not None:
        worker.meter.sample(field.local.nbytes + a.nbytes)
    mid = DistField(field.grid, Layout.Z_SLAB, Space.PHYSICAL, a)
    out = exchange_z_to_x(mid, worker)
    out.local = fft_axis(out.local, 2, forward=True)
    out.space = Space.SPECTRAL
    return out


def dist_fft_inverse(field: DistField, worker: Worker) -> DistField:
    """X-slab spectral -> z-slab physical (inverse 3D pipeline)."""
    _require(field, Layout.X_SLAB, Space.SPECTRAL)
    a = fft_axis(field.local, 2, forward=False)
    if worker.meter is not None:
        worker.meter.sample(field.local.nbytes + a.nbytes)
    mid = DistField(field.grid, Layout.X_SLAB, Space.SPECTRAL, a)
    out = exchange_x_to_z(mid, worker)
    out.local = fft_2d(out.local, forward=False)
    out.space = Space.PHYSICAL
    return out


def dist_fft_2d_forward(field: DistField, worker: Worker) -> DistField:
    """Y-slab physical -> x-slab spectral (2D pipeline, nz == 1)."""
    _require(field, Layout.Y_SLAB, Space.PHYSICAL)
    a = fft_axis(field.local, 0, forward=True)
    mid = DistField(field.grid, Layout.Y_SLAB, Space.PHYSICAL, a)
    out = exchange_y_to_x(mid, worker)
    out.local = fft_axis(out.local, 1, forward=True)
    out.space = Space.SPECTRAL
    return out


def dist_fft_2d_inverse(field: DistField, worker: Worker) -> DistField:
    """X-slab spectral -> y-slab physical (inverse 2D pipeline)."""
    _require(field, Layout.X_SLAB, Space.SPECTRAL)
    a = fft_axis(field.local, 1, forward=False)
    mid = DistField(field.grid, Layout.X_SLAB, Space.SPECTRAL, a)
    out = exchange_x_to_y(mid, worker)
    out.local = fft_axis(out.local, 0, forward=False)
    out.space = Space.PHYSICAL
    return out


def forward(field: DistField, worker: Worker) -> DistField:
    """Dimension-dispatching forward transform (2D when nz == 1)."""
    if field.grid.is_2d:
        return dist_fft_2d_forward(field, worker)
    return dist_fft_forward(field, worker)


def inverse(field: DistField, worker: Worker) -> DistField:
    """Dimension-dispatching inverse transform (2D when nz == 1)."""
    if field.grid.is_2d:
        return dist_fft_2d_inverse(field, worker)
    return dist_fft_inverse(field, worker)
