"""Step-loop benchmark: per-step wall time and per-worker field memory.

Reports absolute seconds per step and speedup relative to one worker.
Field memory is tracked by explicit accounting: solvers sample the bytes
of the field buffers live at each phase of a step (persistent spectral
state plus transients and exchange staging), and the meter keeps the
per-worker peak. CSV schema:

    G,grid,steps,seconds_per_step_median,seconds_per_step_min,speedup_vs_G1

A companion memory report carries ``G,peak_field_bytes_per_worker,
ratio_vs_G1``.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from . import distfft, pfc
from .config import RunConfig
from .distfft import Layout
from .grid import make_symbols
from .transport import Worker, spawn_group

__all__ = ["FieldMemoryMeter", "BenchRow", "bench", "write_bench_csv",
           "write_memory_csv"]


class FieldMemoryMeter:
    """Per-worker accounting of live field-buffer bytes.

    ``baseline`` holds the persistent state (the spectral slab); solver
    phases call ``sample`` with the transient bytes alive at that point.
    """

    def __init__(self):
        self.baseline = 0
        self.peak = 0

    def sample(self, transient_bytes: int) -> None:
        total = self.baseline + transient_bytes
        if total > self.peak:
            self.peak = total


@dataclass
class BenchRow:
    workers: int
    grid: str
    steps: int
    seconds_per_step_median: float
    seconds_per_step_min: float
    speedup_vs_g1: float
    peak_field_bytes_per_worker: int


def _timed_pfc_run(config: RunConfig, workers: int,
                   n_steps: int) -> tuple[float, int]:
    """One run of the step loop; returns (seconds per step, peak bytes)."""
    grid = config.grid
    params = config.pfc_params
    init = config.init

    def body(worker: Worker):
        worker.meter = FieldMemoryMeter()
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
        worker.meter.baseline = state.psi_hat.local.nbytes
        worker.barrier()
        t0 = time.perf_counter()
        for _ in range(n_steps):
            pfc.pfc_step(state, params)
        worker.barrier()
        elapsed = time.perf_counter() - t0
        return elapsed, worker.meter.peak

    results = spawn_group(workers, body)
    elapsed = max(r[0] for r in results)
    peak = max(r[1] for r in results)
    return elapsed / max(n_steps, 1), peak


def bench(config: RunConfig) -> list[BenchRow]:
    """Warmup plus timed repetitions of the PFC step loop per worker count."""
    if config.bench.repetitions < 3:
        raise ValueError("bench needs repetitions >= 3")
    n_steps = config.pfc_params.n_steps
    grid_label = "x".join(str(m) for m in config.grid.n)

    rows: list[BenchRow] = []
    baseline_median: float | None = None
    for workers in config.bench.workers_list:
        if config.bench.warmup_steps > 0:
            _timed_pfc_run(config, workers, config.bench.warmup_steps)
        samples = []
        peak = 0
        for _ in range(config.bench.repetitions):
            per_step, rep_peak = _timed_pfc_run(config, workers, n_steps)
            samples.append(per_step)
            peak = max(peak, rep_peak)
        median = statistics.median(samples)
        if baseline_median is None and workers == 1:
            baseline_median = median
        speedup = (baseline_median / median) if baseline_median else float("nan")
        rows.append(BenchRow(
            workers=workers, grid=grid_label, steps=n_steps,
            seconds_per_step_median=median,
            seconds_per_step_min=min(samples),
            speedup_vs_g1=speedup,
            peak_field_bytes_per_worker=peak))
    return rows


def write_bench_csv(rows: list[BenchRow], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["G", "grid", "steps", "seconds_per_step_median",
                         "seconds_per_step_min", "speedup_vs_G1"])
        for row in rows:
            writer.writerow([row.workers, row.grid, row.steps,
                             repr(row.seconds_per_step_median),
                             repr(row.seconds_per_step_min),
                             repr(row.speedup_vs_g1)])
    return path


def write_memory_csv(rows: list[BenchRow], path: str | Path) -> Path:
    path = Path(path)
    base = next((r.peak_field_bytes_per_worker for r in rows
                 if r.workers == 1), None)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["G", "peak_field_bytes_per_worker", "ratio_vs_G1"])
        for row in rows:
            ratio = (row.peak_field_bytes_per_worker / base
                     if base else float("nan"))
            writer.writerow([row.workers, row.peak_field_bytes_per_worker,
                             repr(ratio)])
    return path
