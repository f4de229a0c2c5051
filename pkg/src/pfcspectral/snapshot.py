"""Binary snapshot files for gathered fields.

Layout (little-endian throughout):

    bytes 0..7    magic "PFCSNAP1"
    bytes 8..31   u64 nx, ny, nz
    bytes 32..39  u64 step
    bytes 40..47  f64 sim_time
    bytes 48..    nx*ny*nz f64 samples, x fastest-varying

A text sidecar (``<name>.meta.txt``) repeats the header fields plus any
caller-supplied metadata such as the resolved-config hash.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["MAGIC", "SnapshotHeader", "write_snapshot", "read_snapshot"]

MAGIC = b"PFCSNAP1"
_HEADER = np.dtype([("nx", "<u8"), ("ny", "<u8"), ("nz", "<u8"),
                    ("step", "<u8"), ("sim_time", "<f8")])


@dataclass(frozen=True)
class SnapshotHeader:
    nx: int
    ny: int
    nz: int
    step: int
    sim_time: float

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)


def write_snapshot(path: str | Path, data: np.ndarray, step: int,
                   sim_time: float, meta: dict | None = None,
                   expected_shape: tuple[int, int, int] | None = None) -> Path:
    """Write one real 3D field; refuses shape mismatches against
    ``expected_shape`` (typically the grid dimensions)."""
    path = Path(path)
    data = np.asarray(data)
    if data.ndim != 3:
        raise ValueError(f"snapshot data must be 3D, got shape {data.shape}")
    if expected_shape is not None and tuple(data.shape) != tuple(expected_shape):
        raise ValueError(
            f"snapshot shape {data.shape} does not match expected "
            f"{tuple(expected_shape)}; refusing to write {path}")
    header = np.zeros((), dtype=_HEADER)
    header["nx"], header["ny"], header["nz"] = data.shape
    header["step"] = step
    header["sim_time"] = sim_time
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(header.tobytes())
            fh.write(np.ascontiguousarray(
                data.real, dtype=np.float64).ravel(order="F")
                .astype("<f8").tobytes())
    except OSError as exc:
        raise OSError(f"failed to write snapshot {path}: {exc}") from exc

    sidecar = path.with_name(path.name + ".meta.txt")
    lines = [f"file: {path.name}",
             f"dims: {data.shape[0]} {data.shape[1]} {data.shape[2]}",
             f"step: {step}",
             f"sim_time: {sim_time!r}"]
    for key, value in (meta or {}).items():
        lines.append(f"{key}: {value}")
    sidecar.write_text("\n".join(lines) + "\n")
    return path


def read_snapshot(path: str | Path) -> tuple[SnapshotHeader, np.ndarray]:
    """Read a snapshot back; bit-exact round trip with write_snapshot."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: not a snapshot file (bad magic {raw[:8]!r})")
    header = np.frombuffer(raw, dtype=_HEADER, count=1, offset=8)[0]
    hdr = SnapshotHeader(nx=int(header["nx"]), ny=int(header["ny"]),
                         nz=int(header["nz"]), step=int(header["step"]),
                         sim_time=float(header["sim_time"]))
    count = hdr.nx * hdr.ny * hdr.nz
    offset = 8 + _HEADER.itemsize
    if len(raw) != offset + 8 * count:
        raise ValueError(f"{path}: truncated snapshot "
                         f"({len(raw)} bytes, expected {offset + 8 * count})")
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
    return hdr, data.reshape(hdr.shape, order="F").copy()
