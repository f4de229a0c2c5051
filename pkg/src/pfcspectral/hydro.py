"""Hydrodynamic PFC: density coupled to a coarse-grained velocity field.

Parallel strategy: one field per worker on a group of exactly four
(psi, v1, v2, v3), each holding its field at full grid resolution and
exchanging physical-space copies once per step over fixed message tags.
A serial mode runs the identical dataflow on one worker and is the
oracle for the parallel run.

Updates (all arrays full-grid, F = unnormalized forward transform):

    psi_hat <- (psi_hat + dt*(lap*F[psi^3] - F[v . grad psi])) / (1 - dt*lin)
    v_hat_i <- (v_hat_i - (dt/rho)*cg*F[psi * d_i(mu)]) / (1 - (dt/rho)*gamma*lap)

with mu_hat = F[psi^3] + op*F[psi] the spectral chemical potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .fftcore import fft_nd
from .grid import GridSpec, SymbolTable
from .pfc import DivergenceError, PfcParams
from .transport import Worker

__all__ = [
    "HydroParams",
    "HydroFields",
    "TAG_PSI",
    "V_TAGS",
    "hydro_psi_step",
    "hydro_velocity_step",
    "serial_hydro_step",
    "free_energy_full",
]

# message tags of the per-step exchange: density broadcast, velocity returns
TAG_PSI = 2
V_TAGS = (4, 5, 6)


@dataclass
class HydroParams:
    pfc: PfcParams = dataclass_field(default_factory=PfcParams)
    rho: float = 1.0
    gamma: float = 1.0
    a0: float = 2.0 * np.pi

    def __post_init__(self):
        if not (self.rho > 0 and np.isfinite(self.rho)):
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not (self.gamma >= 0 and np.isfinite(self.gamma)):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not (self.a0 > 0 and np.isfinite(self.a0)):
            raise ValueError(f"a0 must be positive, got {self.a0}")


@dataclass
class HydroFields:
    """Full-grid state as held by the serial-reference mode."""

    psi_hat: np.ndarray
    psi: np.ndarray
    v_hat: list  # three spectral velocity components
    v: list      # three physical velocity components
    step_index: int = 0
    sim_time: float = 0.0


def _check_finite(a: np.ndarray, step_index: int) -> None:
    if not np.all(np.isfinite(a.real)):
        raise DivergenceError(step_index, float(np.nanmax(np.abs(a))))


def hydro_psi_step(psi_hat: np.ndarray, psi: np.ndarray,
                   v1: np.ndarray, v2: np.ndarray, v3: np.ndarray,
                   sym: SymbolTable, params: HydroParams,
                   step_index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Advect-and-relax update of the density; returns (psi_hat, psi)."""
    dt = params.pfc.dt
    adv = (v1 * fft_nd(sym.d1 * psi_hat, forward=False)
           + v2 * fft_nd(sym.d2 * psi_hat, forward=False)
           + v3 * fft_nd(sym.d3 * psi_hat, forward=False))
    psi_hat = ((psi_hat + dt * (sym.lap * fft_nd(psi ** 3) - fft_nd(adv)))
               / (1.0 - dt * sym.linear))
    _check_finite(psi_hat, step_index)
    psi = fft_nd(psi_hat, forward=False)
    return psi_hat, psi


def hydro_velocity_step(v_hat: np.ndarray, psi: np.ndarray,
                        d_axis: np.ndarray, sym: SymbolTable,
                        params: HydroParams,
                        step_index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Viscous decay plus Gaussian-smoothed thermodynamic force on one
    velocity component; ``d_axis`` is the derivative multiplier i*k_i."""
    dt = params.pfc.dt
    rho = params.rho
    mu_hat = fft_nd(psi ** 3) + sym.op * fft_nd(psi)
    force = fft_nd(psi * fft_nd(d_axis * mu_hat, forward=False))
    v_hat = ((v_hat - (dt / rho) * sym.cg * force)
             / (1.0 - (dt / rho) * params.gamma * sym.lap))
    _check_finite(v_hat, step_index)
    v = fft_nd(v_hat, forward=False)
    return v_hat, v


def serial_hydro_step(fields: HydroFields, sym: SymbolTable,
                      params: HydroParams) -> HydroFields:
    """One step of the four-role dataflow on a single worker.

    Matches the parallel schedule: the density update uses the previous
    step's velocities; the velocity updates use the fresh density.
    """
    fields.psi_hat, fields.psi = hydro_psi_step(
        fields.psi_hat, fields.psi, *fields.v, sym, params,
        step_index=fields.step_index)
    for i in range(3):
        fields.v_hat[i], fields.v[i] = hydro_velocity_step(
            fields.v_hat[i], fields.psi, getattr(sym, f"d{i + 1}"), sym,
            params, step_index=fields.step_index)
    fields.step_index += 1
    fields.sim_time += params.pfc.dt
    return fields


def parallel_hydro_step(worker: Worker, role_state: dict,
                        sym: SymbolTable, params: HydroParams) -> dict:
    """One step of the four-worker dataflow; role is the worker's rank.

    Rank 0 owns the density; ranks 1..3 own one velocity component each.
    ``role_state`` is the owned spectral field plus the consumed mirrors.
    """
    rank = worker.rank
    if rank == 0:
        psi_hat, psi = hydro_psi_step(
            role_state["psi_hat"], role_state["psi"],
            *role_state["v"], sym, params,
            step_index=role_state["step_index"])
        role_state["psi_hat"], role_state["psi"] = psi_hat, psi
        for dst in (1, 2, 3):
            worker.send(dst, TAG_PSI, psi)
        role_state["v"] = [worker.receive(i + 1, V_TAGS[i]) for i in range(3)]
    else:
        i = rank - 1
        psi = worker.receive(0, TAG_PSI)
        role_state["psi"] = psi
        v_hat, v = hydro_velocity_step(
            role_state["v_hat"], psi, getattr(sym, f"d{i + 1}"), sym, params,
            step_index=role_state["step_index"])
        role_state["v_hat"], role_state["v_own"] = v_hat, v
        worker.send(0, V_TAGS[i], v)
    role_state["step_index"] += 1
    return role_state


def free_energy_full(psi: np.ndarray, sym: SymbolTable,
                     grid: GridSpec) -> float:
    """Free energy of a full-resolution (non-distributed) density field."""
    psi_r = psi.real
    op_psi = fft_nd(sym.op * fft_nd(psi), forward=False).real
    return float(np.sum(0.5 * psi_r * op_psi + 0.25 * psi_r**4)
                 * grid.cell_volume)
