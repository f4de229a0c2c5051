import csv

import numpy as np
import yaml

from pfcspectral.cli import (EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_OK, main)
from pfcspectral.snapshot import write_snapshot


def write_cfg(tmp_path, data, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def pfc_yaml(tmp_path, **extra):
    data = {
        "model": "pfc",
        "workers": 2,
        "grid": {"n": [8, 8, 8]},
        "params": {"n_steps": 5},
        "init": {"kind": "two_mode_fcc_3d", "amplitude": 0.05, "seed": 1},
    }
    data.update(extra)
    return write_cfg(tmp_path, data)


class TestRunCommands:
    def test_pfc_run_writes_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["pfc", "run", "--config", pfc_yaml(tmp_path),
                     "--out", str(out)])
        assert code == EXIT_OK
        assert (out / "diagnostics.csv").exists()
        assert (out / "resolved_config.yaml").exists()
        assert "pfc run complete: 5 steps" in capsys.readouterr().out

    def test_steps_and_seed_overrides(self, tmp_path, capsys):
        code = main(["pfc", "run", "--config", pfc_yaml(tmp_path),
                     "--steps", "2", "--seed", "7"])
        assert code == EXIT_OK
        assert "2 steps" in capsys.readouterr().out

    def test_hydro_run(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {
            "model": "hydro",
            "workers": 4,
            "grid": {"n": [8, 8, 8]},
            "params": {"n_steps": 3, "a0": 2.0},
            "init": {"kind": "two_mode_fcc_3d", "amplitude": 0.05},
        })
        code = main(["hydro", "run", "--config", cfg])
        assert code == EXIT_OK
        assert "hydro run complete" in capsys.readouterr().out

    def test_model_subcommand_mismatch(self, tmp_path, capsys):
        code = main(["hydro", "run", "--config", pfc_yaml(tmp_path)])
        assert code == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err


class TestExitCodes:
    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["pfc", "run", "--config", str(tmp_path / "no.yaml")])
        assert code == EXIT_CONFIG

    def test_unknown_key(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"model": "pfc", "params": {"bogus": 1}})
        code = main(["pfc", "run", "--config", cfg])
        assert code == EXIT_CONFIG
        assert "bogus" in capsys.readouterr().err

    def test_divergence_exit_code(self, tmp_path, capsys):
        # an absurd initial amplitude overflows the cubic term immediately
        cfg = write_cfg(tmp_path, {
            "model": "pfc",
            "grid": {"n": [8, 8, 8]},
            "params": {"n_steps": 50},
            "init": {"kind": "constant_plus_noise",
                     "noise_amplitude": 1e200, "seed": 0},
        })
        code = main(["pfc", "run", "--config", cfg])
        assert code == EXIT_DIVERGENCE
        assert "divergence" in capsys.readouterr().err

    def test_divergence_leaves_partial_diagnostics(self, tmp_path):
        out = tmp_path / "partial"
        cfg = write_cfg(tmp_path, {
            "model": "pfc",
            "grid": {"n": [8, 8, 8]},
            "params": {"n_steps": 200},
            "init": {"kind": "constant_plus_noise",
                     "noise_amplitude": 1e200, "seed": 0},
            "io": {"out_dir": str(out), "diag_every": 1},
        })
        assert main(["pfc", "run", "--config", cfg]) == EXIT_DIVERGENCE
        with open(out / "diagnostics.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert 0 < len(rows) < 201


class TestSnapshotDump:
    def test_dump_prints_header_and_stats(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        path = write_snapshot(tmp_path / "f.snap",
                              rng.standard_normal((4, 3, 2)),
                              step=17, sim_time=1.7)
        assert main(["snapshot", "dump", str(path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "4 x 3 x 2" in out
        assert "step:      17" in out
        assert "finite:    True" in out

    def test_dump_bad_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.snap"
        bad.write_bytes(b"NOTASNAP" + b"\x00" * 104)
        assert main(["snapshot", "dump", str(bad)]) == EXIT_CONFIG


class TestBenchCommand:
    def test_bench_writes_csvs(self, tmp_path, capsys):
        out = tmp_path / "bench"
        cfg = write_cfg(tmp_path, {
            "model": "pfc",
            "grid": {"n": [8, 8, 8]},
            "params": {"n_steps": 2},
            "bench": {"repetitions": 3, "workers_list": [1, 2],
                      "warmup_steps": 1},
            "io": {"out_dir": str(out)},
        })
        assert main(["bench", "--config", cfg]) == EXIT_OK
        with open(out / "bench.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["G"] for r in rows] == ["1", "2"]
        assert (out / "bench_memory.csv").exists()
        assert "speedup" in capsys.readouterr().out


class TestReproducibility:
    def test_resolved_config_reruns_identically(self, tmp_path):
        out1 = tmp_path / "a"
        main(["pfc", "run", "--config", pfc_yaml(tmp_path),
              "--out", str(out1)])
        # rerun from the resolved config written by the first run
        resolved = yaml.safe_load((out1 / "resolved_config.yaml").read_text())
        out2 = tmp_path / "b"
        cfg2 = write_cfg(tmp_path, resolved, name="resolved.yaml")
        main(["pfc", "run", "--config", cfg2, "--out", str(out2)])
        a = (out1 / "diagnostics.csv").read_text()
        b = (out2 / "diagnostics.csv").read_text()
        # identical rows except wall-clock timing columns
        strip = lambda text: [",".join(line.split(",")[:-1])
                              for line in text.splitlines()]
        assert strip(a) == strip(b)
