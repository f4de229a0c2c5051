import numpy as np
import pytest

from pfcspectral.snapshot import MAGIC, read_snapshot, write_snapshot


def test_2x2x2_zero_field_is_112_bytes(tmp_path):
    path = tmp_path / "zero.snap"
    write_snapshot(path, np.zeros((2, 2, 2)), step=0, sim_time=0.0)
    assert path.stat().st_size == 112


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    data = rng.standard_normal((5, 3, 4))
    path = write_snapshot(tmp_path / "f.snap", data, step=42, sim_time=4.2)
    header, back = read_snapshot(path)
    assert header.shape == (5, 3, 4)
    assert header.step == 42
    assert header.sim_time == 4.2
    np.testing.assert_array_equal(back, data)


def test_x_fastest_ordering(tmp_path):
    # samples must appear with x varying fastest, then y, then z
    data = np.arange(24, dtype=np.float64).reshape((2, 3, 4))
    path = write_snapshot(tmp_path / "o.snap", data, step=0, sim_time=0.0)
    raw = np.frombuffer(path.read_bytes()[48:], dtype="<f8")
    assert raw[0] == data[0, 0, 0]
    assert raw[1] == data[1, 0, 0]
    assert raw[2] == data[0, 1, 0]
    assert raw[6] == data[0, 0, 1]


def test_shape_mismatch_refused(tmp_path):
    with pytest.raises(ValueError, match="refusing to write"):
        write_snapshot(tmp_path / "bad.snap", np.zeros((2, 2, 2)), step=0,
                       sim_time=0.0, expected_shape=(4, 4, 4))
    assert not (tmp_path / "bad.snap").exists()


def test_sidecar_written(tmp_path):
    path = write_snapshot(tmp_path / "m.snap", np.zeros((2, 2, 2)), step=3,
                          sim_time=0.3, meta={"config_hash": "abc123"})
    sidecar = (tmp_path / "m.snap.meta.txt").read_text()
    assert "dims: 2 2 2" in sidecar
    assert "config_hash: abc123" in sidecar
    assert path.exists()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "junk.snap"
    p.write_bytes(b"NOTASNAP" + b"\x00" * 104)
    with pytest.raises(ValueError, match="bad magic"):
        read_snapshot(p)


def test_truncation_detected(tmp_path):
    path = write_snapshot(tmp_path / "t.snap", np.zeros((2, 2, 2)), step=0,
                          sim_time=0.0)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="truncated"):
        read_snapshot(path)


def test_magic_constant():
    assert MAGIC == b"PFCSNAP1"
