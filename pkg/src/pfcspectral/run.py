"""Time-loop orchestration: PFC and hydro runs with diagnostics and snapshots.

Diagnostics are CSV (UTF-8). PFC columns:

    step,time,free_energy,mean_psi,max_abs_psi,step_wall_seconds

Hydro appends ``max_abs_v1,max_abs_v2,max_abs_v3,mean_psi_drift``.
Every run with an output directory also writes ``resolved_config.yaml``
so it can be replayed bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distfft, hydro, pfc
from .config import RunConfig
from .distfft import DistField, Layout, Space
from .fftcore import fft_nd
from .grid import make_symbols
from .snapshot import write_snapshot
from .transport import Worker, spawn_group

__all__ = ["RunResult", "run_pfc", "run_hydro", "run_model"]

PFC_COLUMNS = ["step", "time", "free_energy", "mean_psi", "max_abs_psi",
               "step_wall_seconds"]
HYDRO_COLUMNS = PFC_COLUMNS + ["max_abs_v1", "max_abs_v2", "max_abs_v3",
                               "mean_psi_drift"]

FULL_SNAPSHOT_MAX_POINTS = 128**3


@dataclass
class RunResult:
    diagnostics: list[dict]
    snapshot_paths: list[Path] = field(default_factory=list)
    final_psi: np.ndarray | None = None
    final_v: list | None = None
    # per-step max |imag(psi)| / max |psi|, recorded on every step
    realness: list[float] = field(default_factory=list)
    diverged: bool = False


class _DiagWriter:
    """Incremental CSV writer; rows are flushed as they arrive so a
    divergence abort still leaves the partial series on disk."""

    def __init__(self, path: Path | None, columns: list[str]):
        self.columns = columns
        self.rows: list[dict] = []
        self._fh = open(path, "w", newline="") if path else None
        self._writer = None
        if self._fh:
            self._writer = csv.DictWriter(self._fh, fieldnames=columns)
            self._writer.writeheader()
            self._fh.flush()

    def record(self, row: dict) -> None:
        self.rows.append(row)
        if self._writer:
            self._writer.writerow(row)
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None


def _prepare_out_dir(config: RunConfig) -> Path | None:
    if config.io.out_dir is None:
        return None
    out = Path(config.io.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.yaml").write_text(config.resolved_yaml())
    return out


def _snapshot_fields(data: np.ndarray, full: bool):
    """Full volume, or the three axis-aligned mid-plane slices."""
    if full:
        yield "full", data
        return
    nx, ny, nz = data.shape
    yield "slice_xy", data[:, :, nz // 2][:, :, None]
    yield "slice_xz", data[:, ny // 2, :][:, None, :]
    yield "slice_yz", data[nx // 2, :, :][None, :, :]


def _want_full(config: RunConfig) -> bool:
    if config.io.full_volume is not None:
        return config.io.full_volume
    return config.grid.num_points <= FULL_SNAPSHOT_MAX_POINTS


def _write_snapshots(out: Path, prefix: str, data: np.ndarray, step: int,
                     sim_time: float, config: RunConfig,
                     paths: list[Path]) -> None:
    meta = {"config_hash": config.config_hash()}
    for name, block in _snapshot_fields(data, _want_full(config)):
        path = out / f"{prefix}_{step:08d}_{name}.snap"
        write_snapshot(path, block, step, sim_time, meta=meta)
        paths.append(path)


def run_pfc(config: RunConfig) -> RunResult:
    """Run the slab-decomposed PFC solver per the config; returns rank-0
    diagnostics plus the gathered final field."""
    grid = config.grid
    params = config.pfc_params
    out = _prepare_out_dir(config)
    init = config.init

    def body(worker: Worker) -> RunResult | None:
        xlay = distfft.layout_for(grid, Layout.X_SLAB, worker.size)
        sym = make_symbols(grid, params.eps, layout=xlay, rank=worker.rank)
        field0 = pfc.init_condition(
            init.kind, grid, worker, psi_bar=params.psi_bar, seed=init.seed,
            noise_amplitude=init.noise_amplitude, amplitude=init.amplitude,
            amplitude2=init.amplitude2, n_seeds=init.n_seeds,
            seed_radius=init.seed_radius,
            on_incommensurate=init.on_incommensurate)
        state = pfc.PfcState(psi_hat=distfft.forward(field0, worker),
                             grid=grid, symbols=sym, worker=worker)

        is_root = worker.rank == 0
        writer = _DiagWriter(out / "diagnostics.csv" if out and is_root else None,
                             PFC_COLUMNS)
        result = RunResult(diagnostics=writer.rows)

        def record(wall: float) -> None:
            energy = pfc.free_energy(state, params)
            mean_psi, max_abs = pfc.mean_and_max(state)
            writer.record({"step": state.step_index,
                           "time": state.sim_time,
                           "free_energy": energy,
                           "mean_psi": mean_psi,
                           "max_abs_psi": max_abs,
                           "step_wall_seconds": wall})

        def snapshot() -> None:
            data = distfft.gather(
                distfft.inverse(state.psi_hat, worker), worker).real
            if is_root and out is not None:
                _write_snapshots(out, "psi", data, state.step_index,
                                 state.sim_time, config,
                                 result.snapshot_paths)

        try:
            record(0.0)
            if out is not None:
                snapshot()
            for step in range(1, params.n_steps + 1):
                t0 = time.perf_counter()
                pfc.pfc_step(state, params)
                wall = time.perf_counter() - t0
                result.realness.append(state.last_max_imag_ratio)
                if step % config.io.diag_every == 0 or step == params.n_steps:
                    record(wall)
                if out is not None and step % config.io.snap_every == 0:
                    snapshot()
        except pfc.DivergenceError:
            result.diverged = True
            writer.close()
            raise
        result.final_psi = distfft.gather(
            distfft.inverse(state.psi_hat, worker), worker).real
        writer.close()
        return result if is_root else None

    results = spawn_group(config.workers, body)
    return results[0]


def run_hydro(config: RunConfig) -> RunResult:
    """Run the field-per-worker hydro solver (G=4) or its serial-reference
    dataflow (G=1)."""
    grid = config.grid
    hparams = config.hydro_params
    if hparams is None:
        raise ValueError("run_hydro needs hydro params (model: hydro)")
    params = hparams.pfc
    init = config.init
    out = _prepare_out_dir(config)

    psi0 = pfc.initial_field(
        init.kind, grid, psi_bar=params.psi_bar, seed=init.seed,
        noise_amplitude=init.noise_amplitude, amplitude=init.amplitude,
        amplitude2=init.amplitude2, n_seeds=init.n_seeds,
        seed_radius=init.seed_radius,
        on_incommensurate=init.on_incommensurate).astype(np.complex128)
    mean0 = float(psi0.real.mean())

    def make_result_and_writer(is_root: bool):
        writer = _DiagWriter(out / "diagnostics.csv" if out and is_root else None,
                             HYDRO_COLUMNS)
        return RunResult(diagnostics=writer.rows), writer

    def record(writer, result, step, sim_time, psi, v, sym, wall):
        psi_r = psi.real
        max_abs = float(np.max(np.abs(psi_r)))
        max_imag = float(np.max(np.abs(psi.imag)))
        result.realness.append(max_imag / max_abs if max_abs else 0.0)
        if step % config.io.diag_every == 0 or step in (0, params.n_steps):
            writer.record({
                "step": step, "time": sim_time,
                "free_energy": hydro.free_energy_full(psi, sym, grid),
                "mean_psi": float(psi_r.mean()),
                "max_abs_psi": max_abs,
                "step_wall_seconds": wall,
                "max_abs_v1": float(np.max(np.abs(v[0].real))),
                "max_abs_v2": float(np.max(np.abs(v[1].real))),
                "max_abs_v3": float(np.max(np.abs(v[2].real))),
                "mean_psi_drift": float(psi_r.mean()) - mean0,
            })

    def snapshot(result, step, sim_time, psi) -> None:
        if out is None:
            return
        _write_snapshots(out, "psi", psi.real, step, sim_time, config,
                         result.snapshot_paths)

    if config.workers == 1:
        sym = make_symbols(grid, params.eps, a0=hparams.a0)
        psi_hat = fft_nd(psi0)
        fields = hydro.HydroFields(
            psi_hat=psi_hat, psi=fft_nd(psi_hat, forward=False),
            v_hat=[np.zeros(grid.shape, dtype=np.complex128) for _ in range(3)],
            v=[np.zeros(grid.shape, dtype=np.complex128) for _ in range(3)])
        result, writer = make_result_and_writer(True)
        try:
            record(writer, result, 0, 0.0, fields.psi, fields.v, sym, 0.0)
            if out is not None:
                snapshot(result, 0, 0.0, fields.psi)
            for step in range(1, params.n_steps + 1):
                t0 = time.perf_counter()
                hydro.serial_hydro_step(fields, sym, hparams)
                wall = time.perf_counter() - t0
                record(writer, result, step, fields.sim_time, fields.psi,
                       fields.v, sym, wall)
                if out is not None and step % config.io.snap_every == 0:
                    snapshot(result, step, fields.sim_time, fields.psi)
        except pfc.DivergenceError:
            result.diverged = True
            writer.close()
            raise
        result.final_psi = fields.psi.real.copy()
        result.final_v = [v.real.copy() for v in fields.v]
        writer.close()
        return result

    if config.workers != 4:
        raise ValueError("hydro runs need exactly 1 or 4 workers")

    def body(worker: Worker) -> RunResult | None:
        sym = make_symbols(grid, params.eps, a0=hparams.a0)
        zeros = lambda: np.zeros(grid.shape, dtype=np.complex128)  # noqa: E731
        if worker.rank == 0:
            psi_hat = fft_nd(psi0)
            role_state = {"psi_hat": psi_hat,
                          "psi": fft_nd(psi_hat, forward=False),
                          "v": [zeros() for _ in range(3)],
                          "step_index": 0}
        else:
            role_state = {"v_hat": zeros(), "v_own": zeros(), "psi": None,
                          "step_index": 0}
        result, writer = make_result_and_writer(worker.rank == 0)
        try:
            if worker.rank == 0:
                record(writer, result, 0, 0.0, role_state["psi"],
                       role_state["v"], sym, 0.0)
                if out is not None:
                    snapshot(result, 0, 0.0, role_state["psi"])
            for step in range(1, params.n_steps + 1):
                t0 = time.perf_counter()
                hydro.parallel_hydro_step(worker, role_state, sym, hparams)
                wall = time.perf_counter() - t0
                if worker.rank == 0:
                    record(writer, result, step, step * params.dt,
                           role_state["psi"], role_state["v"], sym, wall)
                    if out is not None and step % config.io.snap_every == 0:
                        snapshot(result, step, step * params.dt,
                                 role_state["psi"])
        except pfc.DivergenceError:
            result.diverged = True
            writer.close()
            raise
        if worker.rank == 0:
            result.final_psi = role_state["psi"].real.copy()
            result.final_v = [v.real.copy() for v in role_state["v"]]
            writer.close()
            return result
        writer.close()
        return None

    results = spawn_group(config.workers, body)
    return results[0]


def run_model(config: RunConfig) -> RunResult:
    if config.model == "hydro":
        return run_hydro(config)
    return run_pfc(config)
