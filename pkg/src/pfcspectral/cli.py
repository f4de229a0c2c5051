"""Command-line front end.

Subcommands:

    pfc run --config CFG [--workers G] [--out DIR] [--steps N] [--seed S]
    hydro run --config CFG [...]
    bench --config CFG [--out DIR]
    snapshot dump PATH

Exit codes: 0 success, 2 config error, 3 numerical divergence,
4 transport deadlock.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .bench import bench as run_bench
from .bench import write_bench_csv, write_memory_csv
from .config import ConfigError, RunConfig, parse_config
from .pfc import DivergenceError
from .run import run_hydro, run_pfc
from .snapshot import read_snapshot
from .transport import DeadlockError, WorkerFailure

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_DEADLOCK = 4


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, metavar="PATH",
                   help="YAML run configuration")
    p.add_argument("--workers", type=int, metavar="G",
                   help="override worker count")
    p.add_argument("--out", metavar="DIR", help="override output directory")
    p.add_argument("--steps", type=int, metavar="N",
                   help="override number of time steps")
    p.add_argument("--seed", type=int, metavar="S",
                   help="override init seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfcspectral",
        description="Slab-decomposed spectral PFC / hydrodynamic PFC solver")
    sub = parser.add_subparsers(dest="command", required=True)

    pfc_cmd = sub.add_parser("pfc", help="phase-field-crystal solver")
    pfc_sub = pfc_cmd.add_subparsers(dest="action", required=True)
    _add_run_options(pfc_sub.add_parser("run", help="run a PFC simulation"))

    hydro_cmd = sub.add_parser("hydro", help="hydrodynamic PFC solver")
    hydro_sub = hydro_cmd.add_subparsers(dest="action", required=True)
    _add_run_options(hydro_sub.add_parser("run", help="run a hydro simulation"))

    bench_cmd = sub.add_parser("bench", help="time the PFC step loop")
    _add_run_options(bench_cmd)

    snap_cmd = sub.add_parser("snapshot", help="snapshot tools")
    snap_sub = snap_cmd.add_subparsers(dest="action", required=True)
    dump = snap_sub.add_parser("dump", help="print snapshot header and stats")
    dump.add_argument("path", metavar="PATH")

    return parser


def _apply_overrides(config: RunConfig, args: argparse.Namespace,
                     model: str) -> RunConfig:
    if config.model != model:
        raise ConfigError(
            f"config declares model {config.model!r} but the "
            f"{model!r} subcommand was invoked")
    if args.workers is not None:
        config = dataclasses.replace(config, workers=args.workers)
    if args.steps is not None:
        pfc_params = dataclasses.replace(config.pfc_params,
                                         n_steps=args.steps)
        hydro_params = config.hydro_params
        if hydro_params is not None:
            hydro_params = dataclasses.replace(hydro_params, pfc=pfc_params)
        config = dataclasses.replace(config, pfc_params=pfc_params,
                                     hydro_params=hydro_params)
    if args.seed is not None:
        config = dataclasses.replace(
            config, init=dataclasses.replace(config.init, seed=args.seed))
    if args.out is not None:
        config = dataclasses.replace(
            config, io=dataclasses.replace(config.io, out_dir=args.out))
    return config.validate()


def _cmd_run(args: argparse.Namespace, model: str) -> int:
    config = _apply_overrides(parse_config(args.config), args, model)
    runner = run_hydro if model == "hydro" else run_pfc
    result = runner(config)
    last = result.diagnostics[-1]
    print(f"{model} run complete: {last['step']} steps, "
          f"free_energy={last['free_energy']:.9g}, "
          f"mean_psi={last['mean_psi']:.9g}")
    if config.io.out_dir:
        print(f"outputs in {config.io.out_dir}")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    if args.workers is not None or args.steps is not None \
            or args.seed is not None or args.out is not None:
        config = _apply_overrides(config, args, config.model)
    rows = run_bench(config)
    out_dir = Path(config.io.out_dir) if config.io.out_dir else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    bench_path = write_bench_csv(rows, out_dir / "bench.csv")
    mem_path = write_memory_csv(rows, out_dir / "bench_memory.csv")
    for row in rows:
        print(f"G={row.workers} grid={row.grid} steps={row.steps} "
              f"median={row.seconds_per_step_median:.6f}s/step "
              f"min={row.seconds_per_step_min:.6f}s/step "
              f"speedup={row.speedup_vs_g1:.3f}")
    print(f"wrote {bench_path} and {mem_path}")
    return EXIT_OK


def _cmd_snapshot_dump(args: argparse.Namespace) -> int:
    header, data = read_snapshot(args.path)
    print(f"file:      {args.path}")
    print(f"dims:      {header.nx} x {header.ny} x {header.nz}")
    print(f"step:      {header.step}")
    print(f"sim_time:  {header.sim_time!r}")
    print(f"min/max:   {data.min():.9g} / {data.max():.9g}")
    print(f"mean/std:  {data.mean():.9g} / {data.std():.9g}")
    print(f"finite:    {bool(np.all(np.isfinite(data)))}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("pfc", "hydro"):
            return _cmd_run(args, args.command)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "snapshot":
            return _cmd_snapshot_dump(args)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except WorkerFailure as exc:
        if isinstance(exc.cause, DivergenceError):
            print(f"numerical divergence: {exc}", file=sys.stderr)
            return EXIT_DIVERGENCE
        if isinstance(exc.cause, DeadlockError):
            print(f"transport deadlock: {exc}", file=sys.stderr)
            return EXIT_DEADLOCK
        raise
    except DeadlockError as exc:
        print(f"transport deadlock: {exc}", file=sys.stderr)
        return EXIT_DEADLOCK


if __name__ == "__main__":
    sys.exit(main())
