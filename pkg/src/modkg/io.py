"""Field serialization (MKGF binary, CSV) and trajectory / diagnostics writers.

MKGF layout, all little-endian:
    b"MKGF" | version u32 | n u32 | N u32 | L f64 | N^n (re, im) pairs
Version 1 stores complex64 pairs (the documented format); version 2 stores
complex128 so solver artifacts round-trip exactly. Values are in C order
over the physical grid x_i = -L/2 + i h.
"""
from __future__ import annotations

import csv
import itertools
import os
import struct

import numpy as np

from .errors import FormatError
from .grid import Field, GridSpec
from .trajectory import Trajectory

MAGIC = b"MKGF"
_HEADER = struct.Struct("<4sIIId")
_DTYPES = {1: np.dtype("<c8"), 2: np.dtype("<c16")}


def field_bytes(f: Field, version: int = 2) -> bytes:
    if version not in _DTYPES:
        raise FormatError(f"unsupported MKGF version {version}")
    spec = f.spec
    head = _HEADER.pack(MAGIC, version, spec.n, spec.N, float(spec.L))
    return head + np.ascontiguousarray(f.values, dtype=_DTYPES[version]).tobytes()


def write_field(path, f: Field, version: int = 2) -> None:
    with open(path, "wb") as fh:
        fh.write(field_bytes(f, version))


def parse_field(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise FormatError("file shorter than the MKGF header")
    magic, version, n, N, L = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version not in _DTYPES:
        raise FormatError(f"unsupported MKGF version {version}")
    spec = GridSpec(n, L, N)
    dt = _DTYPES[version]
    body = data[_HEADER.size:]
    expected = N ** n * dt.itemsize
    if len(body) != expected:
        raise FormatError(f"payload has {len(body)} bytes, expected {expected}")
    vals = np.frombuffer(body, dtype=dt).astype(complex).reshape(spec.shape)
    return Field(spec, vals)


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        return parse_field(fh.read())


def write_field_csv(path, f: Field) -> None:
    """One row per grid point: index columns i0..i{n-1}, x0..x{n-1}, re, im."""
    spec = f.spec
    n = spec.n
    x = spec.x_axis()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"i{d}" for d in range(n)] + [f"x{d}" for d in range(n)] + ["re", "im"])
        for idx in itertools.product(range(spec.N), repeat=n):
            v = f.values[idx]
            w.writerow(list(idx) + [repr(float(x[i])) for i in idx] + [repr(float(v.real)), repr(float(v.imag))])


def write_trajectory(outdir, traj: Trajectory, version: int = 2, prefix: str = "u") -> list:
    """One MKGF file per frame plus ``index.csv`` (frame, t, file[, ut_file])."""
    os.makedirs(outdir, exist_ok=True)
    digits = max(4, len(str(len(traj) - 1)))
    rows = []
    for m in range(len(traj)):
        name = f"{prefix}_{m:0{digits}d}.mkgf"
        write_field(os.path.join(outdir, name), traj.frame(m), version)
        row = [m, repr(float(traj.times[m])), name]
        if traj.ut is not None:
            tname = f"{prefix}t_{m:0{digits}d}.mkgf"
            write_field(os.path.join(outdir, tname), traj.ut_frame(m), version)
            row.append(tname)
        rows.append(row)
    with open(os.path.join(outdir, "index.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "t", "file"] + (["ut_file"] if traj.ut is not None else []))
        w.writerows(rows)
    return rows


def read_trajectory(outdir) -> Trajectory:
    with open(os.path.join(outdir, "index.csv"), newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise FormatError("empty trajectory index")
    frames = [read_field(os.path.join(outdir, r["file"])) for r in rows]
    ut = None
    if rows[0].get("ut_file"):
        ut = [read_field(os.path.join(outdir, r["ut_file"])) for r in rows]
    return Trajectory.from_fields([float(r["t"]) for r in rows], frames, ut)


DIAGNOSTIC_COLUMNS = ["sweep", "contraction_ratio", "residual", "energy_drift"]


def write_diagnostics(path, traj: Trajectory, final_residual: float | None = None, drift: float | None = None) -> None:
    """Per-sweep rows (residual = relative fixed-point change of that sweep),
    then a ``final`` row carrying the plug-in residual and the energy drift."""
    d = traj.diagnostics

    def f(x):
        return "" if x is None else repr(float(x))

    ratios = list(d.get("contraction_ratios", []))
    changes = list(d.get("changes", []))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAGNOSTIC_COLUMNS)
        for i, ch in enumerate(changes):
            w.writerow([i + 1, f(ratios[i] if i < len(ratios) else None), f(ch), ""])
        w.writerow(["final", f(ratios[-1] if ratios else None), f(final_residual), f(drift)])
