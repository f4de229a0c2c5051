"""Grids, slab layouts, wavenumbers and Fourier multiplier tables.

Everything in this module is immutable after construction and safe to
share read-only between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "SlabLayout",
    "SymbolTable",
    "wavenumbers",
    "slab_layout",
    "make_symbols",
]


@dataclass(frozen=True)
class GridSpec:
    """Periodic rectangular grid: points per axis and physical lengths.

    ``n = (nx, ny, nz)`` with ``nz = 1`` meaning a 2D problem (``length[2]``
    is then ignored).
    """

    n: tuple[int, int, int]
    length: tuple[float, float, float]

    def __post_init__(self):
        if len(self.n) != 3 or len(self.length) != 3:
            raise ValueError("GridSpec needs exactly three axes")
        if any(int(m) != m or m < 1 for m in self.n):
            raise ValueError(f"grid sizes must be positive integers, got {self.n}")
        if any(not np.isfinite(L) or L <= 0 for L in self.length):
            raise ValueError(f"domain lengths must be positive, got {self.length}")
        object.__setattr__(self, "n", tuple(int(m) for m in self.n))
        object.__setattr__(self, "length", tuple(float(L) for L in self.length))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n

    @property
    def num_points(self) -> int:
        return self.n[0] * self.n[1] * self.n[2]

    @property
    def is_2d(self) -> bool:
        return self.n[2] == 1

    @property
    def volume(self) -> float:
        if self.is_2d:
            return self.length[0] * self.length[1]
        return self.length[0] * self.length[1] * self.length[2]

    @property
    def cell_volume(self) -> float:
        return self.volume / self.num_points


def wavenumbers(grid: GridSpec, axis: int) -> np.ndarray:
    """Angular wavenumbers along ``axis`` in standard FFT ordering.

    k_j = 2*pi*f_j / L with integer frequencies
    f = [0, 1, ..., ceil(N/2)-1, -floor(N/2), ..., -1].
    """
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    N = grid.n[axis]
    L = grid.length[axis]
    # fftfreq(N, d=L/N) yields f_j / L directly, Nyquist negative for even N
    return 2.0 * np.pi * np.fft.fftfreq(N, d=L / N)


@dataclass(frozen=True)
class SlabLayout:
    """Balanced 1D partition of ``n_axis`` planes over ``workers`` ranks."""

    axis: int
    counts: tuple[int, ...]
    offsets: tuple[int, ...]

    @property
    def workers(self) -> int:
        return len(self.counts)

    def start(self, rank: int) -> int:
        return self.offsets[rank]

    def stop(self, rank: int) -> int:
        return self.offsets[rank] + self.counts[rank]

    def local_slice(self, rank: int) -> slice:
        return slice(self.start(rank), self.stop(rank))


def slab_layout(n_axis: int, workers: int, axis: int = 2) -> SlabLayout:
    """Balanced slab partition; first ``n_axis % workers`` ranks get one extra
    plane. Zero-thickness slabs are legal when ``workers > n_axis``."""
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    base, extra = divmod(n_axis, workers)
    counts = tuple(base + (1 if g < extra else 0) for g in range(workers))
    offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum(counts)[:-1]]))
    return SlabLayout(axis=axis, counts=counts, offsets=offsets)


@dataclass(frozen=True)
class SymbolTable:
    """Precomputed Fourier multipliers on (a slab of) the spectral grid.

    lap     : -k^2
    two_ring: (1-k^2)^2 * (4/3-k^2)^2, the two-ring correlation symbol
    op      : eps + two_ring (linear part of the chemical potential)
    linear  : lap * op (linear part of the conserved dynamics)
    cg      : exp(-a0^2 k^2 / 2), Gaussian coarse-graining kernel
    d1,d2,d3: i*k along each axis
    mask    : optional spectral mask hook (unused; no dealiasing by default)
    """

    lap: np.ndarray
    two_ring: np.ndarray
    op: np.ndarray
    linear: np.ndarray
    cg: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    mask: np.ndarray | None = field(default=None)

    def slab(self, layout: SlabLayout, rank: int) -> "SymbolTable":
        """Restrict all multiplier arrays to one rank's slab of ``layout``."""
        sl = [slice(None)] * 3
        sl[layout.axis] = layout.local_slice(rank)
        sl = tuple(sl)
        return SymbolTable(
            lap=self.lap[sl],
            two_ring=self.two_ring[sl],
            op=self.op[sl],
            linear=self.linear[sl],
            cg=self.cg[sl],
            d1=self.d1[sl],
            d2=self.d2[sl],
            d3=self.d3[sl],
            mask=None if self.mask is None else self.mask[sl],
        )


def make_symbols(grid: GridSpec, eps: float, a0: float = 1.0,
                 layout: SlabLayout | None = None,
                 rank: int = 0) -> SymbolTable:
    """Build the multiplier table for the PFC/hydro operators.

    With ``layout`` given, only the modes of that rank's slab are built,
    so per-worker memory scales with the slab size.
    """
    if not np.isfinite(eps):
        raise ValueError(f"eps must be finite, got {eps}")
    if not np.isfinite(a0) or a0 <= 0:
        raise ValueError(f"a0 must be positive and finite, got {a0}")

    kvec = [wavenumbers(grid, axis) for axis in range(3)]
    # odd-derivative multipliers zero the unpaired Nyquist mode so that
    # first derivatives of real fields stay real (conjugate symmetry)
    dvec = []
    for axis, kv in enumerate(kvec):
        kd = kv.copy()
        if grid.n[axis] % 2 == 0 and grid.n[axis] > 1:
            kd[grid.n[axis] // 2] = 0.0
        dvec.append(kd)
    shape = list(grid.shape)
    if layout is not None:
        kvec[layout.axis] = kvec[layout.axis][layout.local_slice(rank)]
        dvec[layout.axis] = dvec[layout.axis][layout.local_slice(rank)]
        shape[layout.axis] = layout.counts[rank]
    shape = tuple(shape)

    kx = kvec[0][:, None, None]
    ky = kvec[1][None, :, None]
    kz = kvec[2][None, None, :]
    k2 = kx**2 + ky**2 + kz**2

    lap = -k2
    two_ring = (1.0 - k2) ** 2 * (4.0 / 3.0 - k2) ** 2
    op = eps + two_ring
    linear = lap * op
    cg = np.exp(-0.5 * a0**2 * k2)

    d1 = 1j * np.broadcast_to(dvec[0][:, None, None], shape).copy()
    d2 = 1j * np.broadcast_to(dvec[1][None, :, None], shape).copy()
    d3 = 1j * np.broadcast_to(dvec[2][None, None, :], shape).copy()

    return SymbolTable(
        lap=lap,
        two_ring=two_ring,
        op=op,
        linear=linear,
        cg=cg,
        d1=d1,
        d2=d2,
        d3=d3,
    )
