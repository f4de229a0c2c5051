"""Slab-decomposed distributed FFTs and pseudo-spectral PFC solvers.

Workers emulate cooperating accelerators inside one process: the 3D FFT
is distributed by slab decomposition with an all-to-all transpose, and
two solvers run on top of it — the phase-field-crystal equation
(slab-parallel) and its hydrodynamic extension (field-per-worker).
"""

from .grid import GridSpec, SlabLayout, SymbolTable, make_symbols, slab_layout, wavenumbers
from .fftcore import fft_axis, fft_2d, fft_nd
from .transport import (DeadlockError, TransportError, Worker, WorkerFailure,
                        WorkerGroup, spawn_group)
from .distfft import (DistField, Layout, Space, dist_fft_forward,
                      dist_fft_inverse, dist_fft_2d_forward,
                      dist_fft_2d_inverse, exchange_x_to_z, exchange_z_to_x,
                      gather, scatter)
from .pfc import (DivergenceError, PfcParams, PfcState, free_energy,
                  init_condition, initial_field, pfc_step)
from .hydro import (HydroFields, HydroParams, hydro_psi_step,
                    hydro_velocity_step, serial_hydro_step)
from .config import ConfigError, RunConfig, parse_config
from .snapshot import read_snapshot, write_snapshot
from .run import RunResult, run_hydro, run_pfc
from .bench import bench

__version__ = "0.1.0"
