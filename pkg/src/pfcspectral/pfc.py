"""Semi-implicit pseudo-spectral solver for the phase-field-crystal model.

The density field evolves by conserved gradient flow of a two-ring
free energy; the stiff linear operator is treated implicitly in Fourier
space and the cubic nonlinearity explicitly in physical space:

    psi_hat <- (psi_hat + dt * lap * F[psi^3]) / (1 - dt * lin)

All operations here are collective over the worker group.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import distfft
from .distfft import DistField, Layout, Space
from .grid import GridSpec, SymbolTable
from .transport import Worker

__all__ = [
    "PfcParams",
    "PfcState",
    "DivergenceError",
    "IncommensurateDomainError",
    "pfc_step",
    "free_energy",
    "mean_and_max",
    "initial_field",
    "init_condition",
    "default_domain_length",
    "TRIANGULAR_Q",
    "FCC_Q1",
]

# lattice wavenumbers placing the crystal rings on the zeros of the
# two-ring symbol: k^2 = 1 ({111} family) and k^2 = 4/3 ({200} family)
TRIANGULAR_Q = math.sqrt(3.0) / 2.0
FCC_Q1 = 1.0 / math.sqrt(3.0)

INIT_KINDS = (
    "constant_plus_noise",
    "seeded_crystallites",
    "single_mode_triangular_2d",
    "two_mode_fcc_3d",
)


class DivergenceError(RuntimeError):
    def __init__(self, step_index: int, max_abs: float):
        super().__init__(
            f"non-finite field at step {step_index} (max |psi| = {max_abs:g})")
        self.step_index = step_index
        self.max_abs = max_abs


class IncommensurateDomainError(ValueError):
    pass


@dataclass
class PfcParams:
    eps: float = -0.3
    dt: float = 0.1
    psi_bar: float = -0.3
    n_steps: int = 100

    def __post_init__(self):
        if not (np.isfinite(self.eps) and np.isfinite(self.dt)
                and np.isfinite(self.psi_bar)):
            raise ValueError("PfcParams fields must be finite")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be >= 0, got {self.n_steps}")


@dataclass
class PfcState:
    """Per-worker solver state; psi_hat lives in the x-slab spectral layout."""

    psi_hat: DistField
    grid: GridSpec
    symbols: SymbolTable  # sliced to this worker's x-slab
    worker: Worker
    step_index: int = 0
    sim_time: float = 0.0
    # realness diagnostic of the most recent physical-space density
    last_max_imag_ratio: float = dataclass_field(default=0.0)


def pfc_step(state: PfcState, params: PfcParams) -> PfcState:
    """Advance one semi-implicit step in place; returns the state."""
    sym = state.symbols
    dt = params.dt

    psi = distfft.inverse(state.psi_hat, state.worker)
    if psi.local.size:
        max_abs = float(np.max(np.abs(psi.local.real)))
        max_imag = float(np.max(np.abs(psi.local.imag)))
        state.last_max_imag_ratio = max_imag / max_abs if max_abs > 0 else 0.0

    # overflow here is handled by the divergence check below
    with np.errstate(over="ignore", invalid="ignore"):
        nl = psi.local ** 3
        if state.worker.meter is not None:
            state.worker.meter.sample(psi.local.nbytes + nl.nbytes)
        nl_hat = distfft.forward(
            DistField(state.grid, psi.layout, Space.PHYSICAL, nl),
            state.worker)

        # association dt * (lap * nl_hat) matches the hydro density update
        # bit-for-bit when the velocity is zero
        state.psi_hat.local = (
            (state.psi_hat.local + dt * (sym.lap * nl_hat.local))
            / (1.0 - dt * sym.linear)
        )
    if state.psi_hat.local.size and not np.all(np.isfinite(state.psi_hat.local)):
        raise DivergenceError(state.step_index,
                              float(np.max(np.abs(psi.local))))

    state.step_index += 1
    state.sim_time += dt
    return state


def _reduce_sum(worker: Worker, value: float) -> float:
    """Deterministic rank-ordered sum of one scalar per worker."""
    parts = worker.all_to_all([float(value)] * worker.size)
    total = 0.0
    for p in parts:
        total += p
    return total


def _reduce_max(worker: Worker, value: float) -> float:
    return max(worker.all_to_all([float(value)] * worker.size))


def free_energy(state: PfcState, params: PfcParams) -> float:
    """Discrete free energy: sum dV * [psi*(eps+L)psi/2 + psi^4/4].

    Collective; the cross-worker reduction is rank-ordered so repeated
    evaluations are bit-reproducible.
    """
    sym = state.symbols
    grid = state.grid
    dV = grid.cell_volume

    psi = distfft.inverse(state.psi_hat, state.worker).local.real
    op_psi_hat = DistField(grid, Layout.X_SLAB, Space.SPECTRAL,
                           sym.op * state.psi_hat.local)
    op_psi = distfft.inverse(op_psi_hat, state.worker).local.real

    # a diverged field may overflow here; the caller's divergence check owns it
    with np.errstate(over="ignore", invalid="ignore"):
        local = float(np.sum(0.5 * psi * op_psi + 0.25 * psi**4)) * dV
    return _reduce_sum(state.worker, local)


def mean_and_max(state: PfcState) -> tuple[float, float]:
    """Collective (mean psi, max |psi|) from the current spectral state.

    The mean is read straight from the zero spectral mode, so it inherits
    that mode's bit-invariance instead of picking up inverse-transform
    round-off.
    """
    layout = state.psi_hat.layout  # x-slab: rank 0 owns the zero mode
    slab = distfft.layout_for(state.grid, layout, state.worker.size)
    local_zero = 0.0
    if slab.start(state.worker.rank) == 0 and state.psi_hat.local.size:
        local_zero = float(state.psi_hat.local[0, 0, 0].real)
    zero_mode = _reduce_sum(state.worker, local_zero)

    psi = distfft.inverse(state.psi_hat, state.worker).local.real
    local_max = float(np.max(np.abs(psi))) if psi.size else 0.0
    return (zero_mode / state.grid.num_points,
            _reduce_max(state.worker, local_max))


def default_domain_length(n: tuple[int, int, int],
                          points_per_period: int = 8) -> tuple[float, float, float]:
    """Domain lengths commensurate with the default lattice wavenumbers.

    3D: every axis an integer number of FCC periods 2*pi/q1 = 2*pi*sqrt(3).
    2D: x in periods 2*pi/q, y in periods 4*pi (common period of the two
    triangular y-harmonics).
    """
    nx, ny, nz = n
    if nz == 1:
        px = 2.0 * math.pi / TRIANGULAR_Q
        py = 4.0 * math.pi
        return (max(1, nx // points_per_period) * px,
                max(1, ny // (2 * points_per_period)) * py,
                1.0)
    p = 2.0 * math.pi / FCC_Q1
    return tuple(max(1, m // points_per_period) * p for m in n)  # type: ignore[return-value]


def _check_commensurate(grid: GridSpec, q: float, axis: int,
                        on_incommensurate: str) -> None:
    ratio = grid.length[axis] * q / (2.0 * math.pi)
    if abs(ratio - round(ratio)) > 1e-9:
        msg = (f"domain length {grid.length[axis]} along axis {axis} is not "
               f"commensurate with lattice wavenumber {q} "
               f"(L*q/2pi = {ratio})")
        if on_incommensurate == "error":
            raise IncommensurateDomainError(msg)
        warnings.warn(msg, stacklevel=3)


def _coords(grid: GridSpec):
    nx, ny, nz = grid.n
    x = np.arange(nx) * (grid.length[0] / nx)
    y = np.arange(ny) * (grid.length[1] / ny)
    z = np.arange(nz) * (grid.length[2] / nz)
    return x[:, None, None], y[None, :, None], z[None, None, :]


def _triangular_profile(x, y, amplitude: float) -> np.ndarray:
    q = TRIANGULAR_Q
    return amplitude * (np.cos(q * x) * np.cos(q * y / math.sqrt(3.0))
                        - 0.5 * np.cos(2.0 * q * y / math.sqrt(3.0)))


def _fcc_profile(x, y, z, a1: float, a2: float) -> np.ndarray:
    q1 = FCC_Q1
    return (8.0 * a1 * np.cos(q1 * x) * np.cos(q1 * y) * np.cos(q1 * z)
            + 2.0 * a2 * (np.cos(2.0 * q1 * x) + np.cos(2.0 * q1 * y)
                          + np.cos(2.0 * q1 * z)))


def initial_field(kind: str, grid: GridSpec, *,
                  psi_bar: float = -0.3, seed: int = 0,
                  noise_amplitude: float = 0.01,
                  amplitude: float = 0.1,
                  amplitude2: float | None = None,
                  n_seeds: int = 5, seed_radius: float | None = None,
                  on_incommensurate: str = "warn") -> np.ndarray:
    """Full-grid initial density; deterministic for a fixed seed."""
    kind = kind.lower()
    if kind not in INIT_KINDS:
        raise ValueError(f"unknown init kind {kind!r}; expected one of {INIT_KINDS}")
    x, y, z = _coords(grid)
    full = np.full(grid.shape, psi_bar, dtype=np.float64)

    if kind == "constant_plus_noise":
        rng = np.random.default_rng(seed)
        full = full + rng.uniform(-noise_amplitude, noise_amplitude, grid.shape)

    elif kind == "single_mode_triangular_2d":
        if not grid.is_2d:
            raise ValueError("single_mode_triangular_2d requires nz == 1")
        _check_commensurate(grid, TRIANGULAR_Q, 0, on_incommensurate)
        _check_commensurate(grid, TRIANGULAR_Q / math.sqrt(3.0), 1,
                            on_incommensurate)
        full = full + _triangular_profile(x, y, amplitude)

    elif kind == "two_mode_fcc_3d":
        if grid.is_2d:
            raise ValueError("two_mode_fcc_3d requires nz > 1")
        a2 = amplitude if amplitude2 is None else amplitude2
        for axis in range(3):
            _check_commensurate(grid, FCC_Q1, axis, on_incommensurate)
        full = full + _fcc_profile(x, y, z, amplitude, a2)

    elif kind == "seeded_crystallites":
        rng = np.random.default_rng(seed)
        radius = seed_radius if seed_radius is not None else 0.15 * min(
            grid.length[:2] if grid.is_2d else grid.length)
        a2 = amplitude if amplitude2 is None else amplitude2
        for _ in range(n_seeds):
            center = [rng.uniform(0, grid.length[i]) for i in range(3)]
            if grid.is_2d:
                center[2] = 0.0
                theta = rng.uniform(0, 2 * math.pi)
                c, s = math.cos(theta), math.sin(theta)
                xr = c * (x - center[0]) - s * (y - center[1])
                yr = s * (x - center[0]) + c * (y - center[1])
                profile = _triangular_profile(xr, yr, amplitude)
                r2 = (x - center[0]) ** 2 + (y - center[1]) ** 2
            else:
                rot = np.linalg.qr(rng.standard_normal((3, 3)))[0]
                dx, dy, dz = x - center[0], y - center[1], z - center[2]
                xr = rot[0, 0] * dx + rot[0, 1] * dy + rot[0, 2] * dz
                yr = rot[1, 0] * dx + rot[1, 1] * dy + rot[1, 2] * dz
                zr = rot[2, 0] * dx + rot[2, 1] * dy + rot[2, 2] * dz
                profile = _fcc_profile(xr, yr, zr, amplitude, a2)
                r2 = dx**2 + dy**2 + dz**2
            envelope = 0.5 * (1.0 - np.tanh((np.sqrt(r2) - radius)
                                            / max(radius * 0.2, 1e-12)))
            full = full + envelope * np.broadcast_to(profile, grid.shape)

    return full


def init_condition(kind: str, grid: GridSpec, worker: Worker,
                   **kwargs) -> DistField:
    """Initial density, distributed in the physical layout.

    The full field is generated identically on every rank from the seed
    and then sliced, so the result is bit-independent of the worker count.
    """
    full = initial_field(kind, grid, **kwargs)
    layout = distfft.physical_layout(grid)
    return distfft.scatter(full, worker, grid, layout, Space.PHYSICAL)
