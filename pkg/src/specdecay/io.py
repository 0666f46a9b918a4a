"""CSV series files, binary checkpoints and run-output directories.

Checkpoint layout (little-endian)::

    header   magic b"SPDL" | version u32 = 1 | n u32 | box_length f64 | t f64 | field_count u8
    payload  field_count blocks of n^3 complex values as (re f64, im f64) pairs,
             row-major (m1 slowest), axis order 0, 1, ..., n/2-1, -n/2, ..., -1
    trailer  optional: b"SPDA" | dissipation_u f64 | dissipation_b f64
             | initial_energy f64 | step u64

Fields are scalar components: 3 for a velocity-only state, 6 with a magnetic
field (u_x, u_y, u_z, B_x, B_y, B_z).
"""

from __future__ import annotations

import csv
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .series import SeriesBundle
from .spectral import VectorField, make_grid

__all__ = [
    "CheckpointError",
    "BadMagic",
    "UnsupportedVersion",
    "ShapeMismatch",
    "TruncatedPayload",
    "MalformedRow",
    "emit_csv",
    "load_csv",
    "save_checkpoint",
    "load_checkpoint",
    "atomic_write_bytes",
    "atomic_write_text",
    "checkpoint_path",
    "write_run_outputs",
]

MAGIC = b"SPDL"
VERSION = 1
_HEADER = struct.Struct("<4sIIddB")
_TRAILER_MAGIC = b"SPDA"
_TRAILER = struct.Struct("<4sdddQ")


class CheckpointError(ValueError):
    pass


class BadMagic(CheckpointError):
    pass


class UnsupportedVersion(CheckpointError):
    pass


class ShapeMismatch(CheckpointError):
    pass


class TruncatedPayload(CheckpointError):
    pass


class MalformedRow(ValueError):
    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(f"row {row}: {message}")


def atomic_write_bytes(path, data: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_text(bundle: SeriesBundle) -> str:
    import io as _stdio

    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + bundle.names)
    cols = [bundle.column(k) for k in bundle.names]
    for i, t in enumerate(bundle.t):
        w.writerow([_fmt(t)] + [_fmt(c[i]) for c in cols])
    return buf.getvalue()


def emit_csv(bundle: SeriesBundle, path):
    atomic_write_text(path, csv_text(bundle))


def load_csv(path) -> SeriesBundle:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedRow("missing header", 0)
    header = rows[0]
    if not header or header[0] != "t":
        raise MalformedRow("header must start with 't'", 0)
    names = header[1:]
    if len(set(names)) != len(names):
        raise MalformedRow("duplicate column names", 0)
    ts, cols = [], {k: [] for k in names}
    for i, row in enumerate(rows[1:], start=1):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(f"expected {len(header)} columns, got {len(row)}", i)
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise MalformedRow(str(exc), i) from None
        ts.append(vals[0])
        for k, v in zip(names, vals[1:]):
            cols[k].append(v)
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise MalformedRow("sample times must increase", len(ts))
    return SeriesBundle(names, ts, cols)


def _state_fields(state) -> list[np.ndarray]:
    fields = list(state.u.coeffs)
    if state.b is not None:
        fields += list(state.b.coeffs)
    return fields


def checkpoint_bytes(state) -> bytes:
    grid = state.grid
    fields = _state_fields(state)
    header = _HEADER.pack(MAGIC, VERSION, grid.n, grid.box_length, state.t, len(fields))
    payload = b"".join(np.ascontiguousarray(f, dtype="<c16").tobytes() for f in fields)
    trailer = _TRAILER.pack(_TRAILER_MAGIC, state.dissipation_u, state.dissipation_b,
                            state.initial_energy, state.step)
    return header + payload + trailer


def save_checkpoint(state, path):
    atomic_write_bytes(path, checkpoint_bytes(state))


def parse_checkpoint(data: bytes, dt: float | None = None):
    from .dynamics import SimState

    if len(data) < _HEADER.size:
        raise TruncatedPayload(f"file has {len(data)} bytes, header needs {_HEADER.size}")
    magic, version, n, box, t, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported checkpoint version {version}")
    if count not in (3, 6):
        raise ShapeMismatch(f"field_count must be 3 or 6, got {count}")
    try:
        grid = make_grid(n, box)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None
    block = n**3 * 16
    end = _HEADER.size + count * block
    if len(data) < end:
        raise TruncatedPayload(f"payload needs {end} bytes, file has {len(data)}")
    arr = np.frombuffer(data, dtype="<c16", count=count * n**3, offset=_HEADER.size)
    arr = arr.astype(complex).reshape(count, n, n, n)
    rest = data[end:]
    du = db = 0.0
    e0 = None
    step = None
    if rest:
        if len(rest) != _TRAILER.size or not rest.startswith(_TRAILER_MAGIC):
            raise ShapeMismatch(f"{len(rest)} unexpected bytes after payload")
        _, du, db, e0, step = _TRAILER.unpack(rest)
    u = VectorField(grid, arr[:3].copy(), divergence_free=True)
    b = VectorField(grid, arr[3:].copy(), divergence_free=True) if count == 6 else None
    if step is None:
        step = int(round(t / dt)) if dt else 0
    state = SimState(t, u, b, du, db, 0.0, int(step))
    if e0 is None:
        e0 = state.energy()
    return SimState(t, u, b, du, db, e0, int(step))


def load_checkpoint(path, dt: float | None = None):
    """Read a checkpoint; ``dt`` is only used to recover the step index when
    the file carries no trailer."""
    return parse_checkpoint(Path(path).read_bytes(), dt)


def checkpoint_path(out_dir, step: int) -> Path:
    return Path(out_dir) / f"ckpt_{step:08d}.spdl"


def write_run_outputs(result, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(result.bundle, out / "series.csv")
    if result.initial_report:
        atomic_write_text(out / "initial_report.json",
                          json.dumps(result.initial_report, indent=2, sort_keys=True) + "\n")
    save_checkpoint(result.state, out / "final.spdl")
