"""Run configuration: YAML schema, validation, defaults and resolution.

The config file is YAML with the sections ``model``, ``workers``,
``grid``, ``params``, ``init``, ``io`` and ``bench``. Unknown keys are
rejected so typos fail loudly. ``resolved()`` returns the fully
defaulted dictionary that every run echoes next to its outputs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .grid import GridSpec
from .hydro import HydroParams
from .pfc import INIT_KINDS, PfcParams, default_domain_length

__all__ = ["ConfigError", "InitConfig", "IoConfig", "BenchConfig",
           "RunConfig", "parse_config", "load_config_dict"]


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {section!r} "
                              f"(allowed: {sorted(allowed)})")


def _get(section: str, data: dict, key: str, kind, default=None,
         required: bool = False):
    if key not in data or data[key] is None:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    value = data[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{section}.{key}: expected {kind.__name__}, "
                          f"got boolean")
    if not isinstance(value, kind):
        raise ConfigError(f"{section}.{key}: expected {kind.__name__}, "
                          f"got {type(value).__name__} ({value!r})")
    return value


@dataclass
class InitConfig:
    kind: str = "constant_plus_noise"
    seed: int = 0
    amplitude: float = 0.05
    amplitude2: float | None = None
    noise_amplitude: float = 0.01
    n_seeds: int = 5
    seed_radius: float | None = None
    on_incommensurate: str = "warn"


@dataclass
class IoConfig:
    out_dir: str | None = None
    diag_every: int = 10
    snap_every: int = 100
    full_volume: bool | None = None  # None = auto (full when <= 128^3)


@dataclass
class BenchConfig:
    repetitions: int = 3
    workers_list: tuple[int, ...] = (1, 2, 4)
    warmup_steps: int = 2


@dataclass
class RunConfig:
    model: str = "pfc"
    workers: int = 1
    grid: GridSpec = field(default_factory=lambda: GridSpec(
        (64, 64, 64), default_domain_length((64, 64, 64))))
    pfc_params: PfcParams = field(default_factory=PfcParams)
    hydro_params: HydroParams | None = None
    init: InitConfig = field(default_factory=InitConfig)
    io: IoConfig = field(default_factory=IoConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    def validate(self) -> "RunConfig":
        if self.model not in ("pfc", "hydro"):
            raise ConfigError(f"model must be 'pfc' or 'hydro', got {self.model!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.model == "hydro" and self.workers not in (1, 4):
            raise ConfigError(
                f"workers must be 1 or 4 for HYDRO, got {self.workers}")
        if self.io.diag_every < 1 or self.io.snap_every < 1:
            raise ConfigError("io.diag_every and io.snap_every must be >= 1")
        if self.init.kind not in INIT_KINDS:
            raise ConfigError(f"init.kind must be one of {INIT_KINDS}, "
                              f"got {self.init.kind!r}")
        if self.init.on_incommensurate not in ("warn", "error"):
            raise ConfigError("init.on_incommensurate must be 'warn' or 'error'")
        if self.bench.repetitions < 1:
            raise ConfigError("bench.repetitions must be >= 1")
        if any(g < 1 for g in self.bench.workers_list):
            raise ConfigError("bench.workers_list entries must be >= 1")
        return self

    def resolved(self) -> dict:
        """Fully defaulted configuration as a plain dictionary."""
        out = {
            "model": self.model,
            "workers": self.workers,
            "grid": {"n": list(self.grid.n),
                     "length": [float(L) for L in self.grid.length]},
            "params": {
                "eps": self.pfc_params.eps,
                "dt": self.pfc_params.dt,
                "psi_bar": self.pfc_params.psi_bar,
                "n_steps": self.pfc_params.n_steps,
            },
            "init": {
                "kind": self.init.kind,
                "seed": self.init.seed,
                "amplitude": self.init.amplitude,
                "amplitude2": self.init.amplitude2,
                "noise_amplitude": self.init.noise_amplitude,
                "n_seeds": self.init.n_seeds,
                "seed_radius": self.init.seed_radius,
                "on_incommensurate": self.init.on_incommensurate,
            },
            "io": {
                "out_dir": self.io.out_dir,
                "diag_every": self.io.diag_every,
                "snap_every": self.io.snap_every,
                "full_volume": self.io.full_volume,
            },
            "bench": {
                "repetitions": self.bench.repetitions,
                "workers_list": list(self.bench.workers_list),
                "warmup_steps": self.bench.warmup_steps,
            },
        }
        if self.hydro_params is not None:
            out["params"].update({
                "rho": self.hydro_params.rho,
                "gamma": self.hydro_params.gamma,
                "a0": self.hydro_params.a0,
            })
        return out

    def resolved_yaml(self) -> str:
        return yaml.safe_dump(self.resolved(), sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.resolved_yaml().encode()).hexdigest()


def load_config_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a parsed YAML mapping."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    _reject_unknown("<root>", data,
                    {"model", "workers", "grid", "params", "init", "io",
                     "bench"})

    model = _get("<root>", data, "model", str, default="pfc").lower()

    grid_data = data.get("grid") or {}
    if not isinstance(grid_data, dict):
        raise ConfigError("grid: expected a mapping")
    _reject_unknown("grid", grid_data, {"n", "length"})
    n_raw = grid_data.get("n", [64, 64, 64])
    if not (isinstance(n_raw, list) and len(n_raw) in (2, 3)
            and all(isinstance(m, int) for m in n_raw)):
        raise ConfigError("grid.n: expected a list of 2 or 3 integers")
    n = tuple(n_raw) + (1,) * (3 - len(n_raw))
    length_raw = grid_data.get("length")
    if length_raw is None:
        length = default_domain_length(n)
    else:
        if not (isinstance(length_raw, list) and len(length_raw) in (2, 3)
                and all(isinstance(L, (int, float)) for L in length_raw)):
            raise ConfigError("grid.length: expected a list of 2 or 3 numbers")
        length = tuple(float(L) for L in length_raw) + (1.0,) * (3 - len(length_raw))
    try:
        grid = GridSpec(n, length)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc

    params_data = data.get("params") or {}
    if not isinstance(params_data, dict):
        raise ConfigError("params: expected a mapping")
    pfc_keys = {"eps", "dt", "psi_bar", "n_steps"}
    hydro_keys = {"rho", "gamma", "a0"}
    allowed = pfc_keys | (hydro_keys if model == "hydro" else set())
    _reject_unknown("params", params_data, allowed)
    try:
        pfc_params = PfcParams(
            eps=_get("params", params_data, "eps", float, default=-0.3),
            dt=_get("params", params_data, "dt", float, default=0.1),
            psi_bar=_get("params", params_data, "psi_bar", float, default=-0.3),
            n_steps=_get("params", params_data, "n_steps", int, default=100),
        )
        hydro_params = None
        if model == "hydro":
            hydro_params = HydroParams(
                pfc=pfc_params,
                rho=_get("params", params_data, "rho", float, default=1.0),
                gamma=_get("params", params_data, "gamma", float, default=1.0),
                a0=_get("params", params_data, "a0", float,
                        default=float(2.0 * np.pi)),
            )
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc

    init_data = data.get("init") or {}
    if not isinstance(init_data, dict):
        raise ConfigError("init: expected a mapping")
    _reject_unknown("init", init_data,
                    {"kind", "seed", "amplitude", "amplitude2",
                     "noise_amplitude", "n_seeds", "seed_radius",
                     "on_incommensurate"})
    init = InitConfig(
        kind=_get("init", init_data, "kind", str,
                  default="constant_plus_noise").lower(),
        seed=_get("init", init_data, "seed", int, default=0),
        amplitude=_get("init", init_data, "amplitude", float, default=0.05),
        amplitude2=_get("init", init_data, "amplitude2", float),
        noise_amplitude=_get("init", init_data, "noise_amplitude", float,
                             default=0.01),
        n_seeds=_get("init", init_data, "n_seeds", int, default=5),
        seed_radius=_get("init", init_data, "seed_radius", float),
        on_incommensurate=_get("init", init_data, "on_incommensurate", str,
                               default="warn"),
    )

    io_data = data.get("io") or {}
    if not isinstance(io_data, dict):
        raise ConfigError("io: expected a mapping")
    _reject_unknown("io", io_data,
                    {"out_dir", "diag_every", "snap_every", "full_volume"})
    io = IoConfig(
        out_dir=_get("io", io_data, "out_dir", str),
        diag_every=_get("io", io_data, "diag_every", int, default=10),
        snap_every=_get("io", io_data, "snap_every", int, default=100),
        full_volume=_get("io", io_data, "full_volume", bool),
    )

    bench_data = data.get("bench") or {}
    if not isinstance(bench_data, dict):
        raise ConfigError("bench: expected a mapping")
    _reject_unknown("bench", bench_data,
                    {"repetitions", "workers_list", "warmup_steps"})
    workers_list = bench_data.get("workers_list", [1, 2, 4])
    if not (isinstance(workers_list, list)
            and all(isinstance(g, int) for g in workers_list)):
        raise ConfigError("bench.workers_list: expected a list of integers")
    bench = BenchConfig(
        repetitions=_get("bench", bench_data, "repetitions", int, default=3),
        workers_list=tuple(workers_list),
        warmup_steps=_get("bench", bench_data, "warmup_steps", int, default=2),
    )

    cfg = RunConfig(model=model,
                    workers=_get("<root>", data, "workers", int, default=1),
                    grid=grid, pfc_params=pfc_params,
                    hydro_params=hydro_params, init=init, io=io, bench=bench)
    return cfg.validate()


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a YAML config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return load_config_dict(data if data is not None else {})
