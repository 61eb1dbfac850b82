"""Persistence: CSV time series and versioned binary field snapshots.

The series format is a plain CSV with a fixed header and full-precision
floats (17 significant digits), so files are human-diffable, plot-ready,
and round-trip bit-exactly.  Snapshots are little-endian binary with a
magic tag and version so they round-trip at full precision and fail
cleanly on format drift.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields

import numpy as np

from .diagnostics import InvariantRecord

__all__ = [
    "CSV_HEADER",
    "TimeSeriesRow",
    "TimeSeriesFormatError",
    "SnapshotFormatError",
    "Snapshot",
    "write_timeseries",
    "read_timeseries",
    "rows_to_records",
    "write_snapshot",
    "read_snapshot",
]

CSV_HEADER = "t,P,E,M,visc_E_ledger,visc_M_ledger,I2,J,K,phi,c_speed,max_u,max_v,flags"

SNAPSHOT_MAGIC = b"BNY1"
SNAPSHOT_VERSION = 1
_ADVECTION_IDS = {"upwind1": 1, "minmod2": 2}
_ADVECTION_NAMES = {v: k for k, v in _ADVECTION_IDS.items()}
_SPLITTING_IDS = {"strang_tst": 1}
_SPLITTING_NAMES = {v: k for k, v in _SPLITTING_IDS.items()}
_DIFFUSION_IDS = {"backward": 1, "trapezoid": 2}
_DIFFUSION_NAMES = {v: k for k, v in _DIFFUSION_IDS.items()}


class TimeSeriesFormatError(ValueError):
    pass


class SnapshotFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TimeSeriesRow:
    """One sampled diagnostics row; column order matches CSV_HEADER."""

    t: float
    P: float
    E: float
    M: float
    visc_E_ledger: float
    visc_M_ledger: float
    I2: float
    J: float
    K: float
    phi: float
    c_speed: float
    max_u: float
    max_v: float
    flags: int


_N_COLS = len(fields(TimeSeriesRow))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_timeseries(rows, path) -> None:
    """Write rows as CSV; an empty series produces a header-only file."""
    lines = [CSV_HEADER]
    t_prev = None
    for r in rows:
        if t_prev is not None and r.t <= t_prev:
            raise TimeSeriesFormatError(f"non-increasing time {r.t} after {t_prev}")
        t_prev = r.t
        lines.append(
            ",".join(
                [_fmt(r.t), _fmt(r.P), _fmt(r.E), _fmt(r.M),
                 _fmt(r.visc_E_ledger), _fmt(r.visc_M_ledger),
                 _fmt(r.I2), _fmt(r.J), _fmt(r.K), _fmt(r.phi),
                 _fmt(r.c_speed), _fmt(r.max_u), _fmt(r.max_v), str(r.flags)]
            )
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_timeseries(path) -> list[TimeSeriesRow]:
    with open(path, "r", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise TimeSeriesFormatError(
                f"malformed header: expected {CSV_HEADER!r}, got {header!r}"
            )
        rows: list[TimeSeriesRow] = []
        t_prev = None
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != _N_COLS:
                raise TimeSeriesFormatError(
                    f"line {lineno}: expected {_N_COLS} columns, got {len(parts)}"
                )
            vals = [float(p) for p in parts[:-1]]
            row = TimeSeriesRow(*vals, flags=int(parts[-1]))
            if t_prev is not None and row.t <= t_prev:
                raise TimeSeriesFormatError(f"line {lineno}: non-increasing time")
            t_prev = row.t
            rows.append(row)
    return rows


def rows_to_records(rows) -> list[InvariantRecord]:
    """Project series rows onto invariant records for drift re-verification."""
    return [
        InvariantRecord(
            t=r.t, P=r.P, E=r.E, M=r.M,
            visc_energy_ledger=r.visc_E_ledger,
            visc_momentum_ledger=r.visc_M_ledger,
        )
        for r in rows
    ]


@dataclass(frozen=True)
class Snapshot:
    """Self-describing field snapshot: grid, physics, schemes, and (u, v)."""

    t: float
    L: float
    N: int
    a: float
    b: float
    epsilon: float
    advection: str
    splitting: str
    diffusion: str
    u: np.ndarray
    v: np.ndarray


def write_snapshot(snap: Snapshot, path) -> None:
    if snap.advection not in _ADVECTION_IDS:
        raise SnapshotFormatError(f"unknown advection scheme {snap.advection!r}")
    if snap.splitting not in _SPLITTING_IDS:
        raise SnapshotFormatError(f"unknown splitting scheme {snap.splitting!r}")
    if snap.diffusion not in _DIFFUSION_IDS:
        raise SnapshotFormatError(f"unknown diffusion scheme {snap.diffusion!r}")
    u = np.asarray(snap.u, dtype=np.complex128)
    v = np.asarray(snap.v, dtype=np.float64)
    header = struct.pack(
        "<4sIddQdddIII",
        SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
        snap.t, snap.L, snap.N, snap.a, snap.b, snap.epsilon,
        _ADVECTION_IDS[snap.advection], _SPLITTING_IDS[snap.splitting],
        _DIFFUSION_IDS[snap.diffusion],
    )
    u_interleaved = np.empty(2 * u.size)
    u_interleaved[0::2] = u.real
    u_interleaved[1::2] = u.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<Q", u.size))
        fh.write(u_interleaved.astype("<f8").tobytes())
        fh.write(struct.pack("<Q", v.size))
        fh.write(v.astype("<f8").tobytes())


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise SnapshotFormatError("truncated snapshot file")
    return buf


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4)
        if magic != SNAPSHOT_MAGIC:
            raise SnapshotFormatError(f"bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != SNAPSHOT_VERSION:
            raise SnapshotFormatError(
                f"unsupported snapshot version {version}; this reader handles {SNAPSHOT_VERSION}"
            )
        t, L = struct.unpack("<dd", _read_exact(fh, 16))
        (N,) = struct.unpack("<Q", _read_exact(fh, 8))
        a, b, epsilon = struct.unpack("<ddd", _read_exact(fh, 24))
        adv_id, split_id, diff_id = struct.unpack("<III", _read_exact(fh, 12))
        if adv_id not in _ADVECTION_NAMES:
            raise SnapshotFormatError(f"unknown advection scheme id {adv_id}")
        if split_id not in _SPLITTING_NAMES:
            raise SnapshotFormatError(f"unknown splitting scheme id {split_id}")
        if diff_id not in _DIFFUSION_NAMES:
            raise SnapshotFormatError(f"unknown diffusion scheme id {diff_id}")
        (nu,) = struct.unpack("<Q", _read_exact(fh, 8))
        u_flat = np.frombuffer(_read_exact(fh, 16 * nu), dtype="<f8")
        u = u_flat[0::2] + 1j * u_flat[1::2]
        (nv,) = struct.unpack("<Q", _read_exact(fh, 8))
        v = np.frombuffer(_read_exact(fh, 8 * nv), dtype="<f8").copy()
        if fh.read(1) != b"":
            raise SnapshotFormatError("trailing bytes after snapshot payload")
    return Snapshot(
        t=t, L=L, N=int(N), a=a, b=b, epsilon=epsilon,
        advection=_ADVECTION_NAMES[adv_id], splitting=_SPLITTING_NAMES[split_id],
        diffusion=_DIFFUSION_NAMES[diff_id],
        u=u, v=v,
    )
