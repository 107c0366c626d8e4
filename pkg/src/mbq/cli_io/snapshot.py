"""Binary state snapshots.

Layout, all little-endian: ``b"MBQ1"``, ``uint32 n``, ``float64 t`` (16
bytes), then six ``float64`` arrays of ``(n+1)**2`` values in row-major
order: theta, u1, u2, B1, B2, pressure.  The field count is fixed at six
and not stored.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import MBQError, SnapshotFormatError
from ..field import BC, Grid, ScalarField, VectorField2
from ..stepper import State
from ..stepper.state import b_mode, theta_mode

MAGIC = b"MBQ1"
HEADER = struct.Struct("<4sId")
N_FIELDS = 6


def snapshot_size(n: int) -> int:
    return HEADER.size + N_FIELDS * (n + 1) ** 2 * 8


def encode_snapshot(s: State) -> bytes:
    arrays = (*s.arrays(), s.pressure.values)
    payload = np.stack(arrays).astype("<f8", copy=False).tobytes(order="C")
    return HEADER.pack(MAGIC, s.grid.n, float(s.t)) + payload


def write_snapshot(s: State, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_snapshot(s))
    return path


def decode_snapshot(data: bytes) -> tuple[int, float, np.ndarray]:
    """Return ``(n, t, fields)`` with ``fields`` of shape (6, n+1, n+1)."""
    if len(data) < HEADER.size:
        raise SnapshotFormatError(f"snapshot is {len(data)} bytes, shorter than the 16-byte header")
    magic, n, t = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    want = snapshot_size(n)
    if len(data) != want:
        raise SnapshotFormatError(f"snapshot for n={n} must be {want} bytes, got {len(data)}")
    fields = np.frombuffer(data, dtype="<f8", offset=HEADER.size).reshape(N_FIELDS, n + 1, n + 1)
    return n, t, fields.astype(float)


def read_snapshot(path, bc_theta: str = "dirichlet", bc_b: str = "dirichlet") -> State:
    """Load a snapshot as a State; boundary modes are not stored and must be given."""
    n, t, f = decode_snapshot(Path(path).read_bytes())
    if n < 8:
        raise SnapshotFormatError(f"snapshot grid n={n} is below the minimum of 8")
    g = Grid(n)
    try:
        s = State(
            ScalarField(g, f[0], theta_mode(bc_theta)),
            VectorField2.from_arrays(g, f[1], f[2], BC.DIRICHLET),
            VectorField2.from_arrays(g, f[3], f[4], b_mode(bc_b)),
            ScalarField(g, f[5]),
            t,
            bc_theta,
            bc_b,
        )
    except MBQError as exc:
        raise SnapshotFormatError(f"snapshot values are not a valid state: {exc}") from exc
    return s
