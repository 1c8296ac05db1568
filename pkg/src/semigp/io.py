"""Binary field snapshots and CSV time series.

Snapshot layout (all little-endian):

    8 bytes   magic  b"SEMIGPB\\x00"
    u32       format version (currently 1)
    f64       box side L
    u32       grid size N
    8 bytes   field kind tag (ASCII, NUL padded)
    f64       time stamp
    payload   row-major f64 data; complex values interleaved re/im

Reading back a written snapshot reproduces it bitwise.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .waves import WavePair

MAGIC = b"SEMIGPB\x00"
VERSION = 1

_HEADER = struct.Struct("<8sId I8sd".replace(" ", ""))
# magic, version, L, N, kind, t


class SnapshotError(ValueError):
    pass


_KINDS = {
    "WPAIRPSI": ("pair", "psi"),
    "WPAIRPHI": ("pair", "phi"),
    "CPLXSCAL": ("complex", None),
    "REALSCAL": ("real", None),
    "REALVEC2": ("realvec", None),
}


def _kind_of(obj) -> str:
    if isinstance(obj, WavePair):
        return "WPAIRPSI" if obj.frame == "psi" else "WPAIRPHI"
    arr = np.asarray(obj)
    if arr.ndim == 3 and arr.shape[0] == 2 and not np.iscomplexobj(arr):
        return "REALVEC2"
    if arr.ndim == 2:
        return "CPLXSCAL" if np.iscomplexobj(arr) else "REALSCAL"
    raise SnapshotError(f"unsupported field shape {arr.shape}")


def write_snapshot(obj, path, L: float, t: float | None = None) -> None:
    """Write a WavePair, scalar field or real 2-vector field."""
    kind = _kind_of(obj)
    if isinstance(obj, WavePair):
        N = obj.c1.shape[0]
        t = obj.t if t is None else t
        payload = np.stack([obj.c1, obj.c2]).astype("<c16").tobytes()
    else:
        arr = np.asarray(obj)
        N = arr.shape[-1]
        t = 0.0 if t is None else t
        dtype = "<c16" if np.iscomplexobj(arr) else "<f8"
        payload = arr.astype(dtype).tobytes()
    header = _HEADER.pack(MAGIC, VERSION, float(L), int(N),
                          kind.encode("ascii"), float(t))
    Path(path).write_bytes(header + payload)


def read_snapshot(path):
    """Returns (object, L).  Object type mirrors what was written."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError("truncated snapshot: header incomplete")
    magic, version, L, N, kind_b, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError("bad magic: not a field snapshot")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    kind = kind_b.rstrip(b"\x00").decode("ascii")
    if kind not in _KINDS:
        raise SnapshotError(f"unknown field kind {kind!r}")
    family, frame = _KINDS[kind]
    shapes = {
        "pair": ((2, N, N), "<c16"),
        "complex": ((N, N), "<c16"),
        "real": ((N, N), "<f8"),
        "realvec": ((2, N, N), "<f8"),
    }
    shape, dtype = shapes[family]
    expect = int(np.prod(shape)) * np.dtype(dtype).itemsize
    payload = raw[_HEADER.size:]
    if len(payload) != expect:
        raise SnapshotError(
            f"size mismatch: expected {expect} payload bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape)
    if family == "pair":
        data = arr.astype(np.complex128)
        return WavePair(data[0].copy(), data[1].copy(), frame=frame, t=t), L
    if dtype == "<f8":
        return arr.astype(np.float64), L
    return arr.astype(np.complex128), L


# ---------------------------------------------------------------------------
# CSV time series
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_timeseries(records, path) -> None:
    """Records expose FIELDS and row(); the header names every field."""
    if not records:
        raise ValueError("no records to write")
    fields = records[0].FIELDS
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for rec in records:
            writer.writerow([_fmt(v) for v in rec.row()])


def read_timeseries(path):
    """Returns (fieldnames, rows) with rows as lists of floats."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        fields = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return fields, rows
