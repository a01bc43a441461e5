"""Durable formats: binary field checkpoints and the diagnostics CSV.

Checkpoint layout (little-endian regardless of host):

    header  magic "QSHYP1" | u32 version | u32 n | u32 dims | f64 t
            | f64 a, b, c, lambda, q, cbar | 8-byte basis id "B5ORTHO1"
    payload 13 * n^dims f64: v (3 components), Q (5), P (5), each component
            written x-fastest row-major

All writes go through a temp file + rename, so partially written files never
replace good ones and reruns are byte-identical.
"""

from __future__ import annotations

import math
import os
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .potential import PotentialParams
from .spectral import Grid
from .state import SpectralState

__all__ = ["checkpoint_save", "checkpoint_load", "checkpoint_info",
           "write_diagnostics", "write_text", "CSV_COLUMNS", "CheckpointError"]

MAGIC = b"QSHYP1"
BASIS_ID = b"B5ORTHO1"
VERSION = 1
_HEADER = struct.Struct("<6sIIId6d8s")


class CheckpointError(ValueError):
    """Malformed or mismatched checkpoint file."""


def _atomic_write(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def write_text(path: str | Path, text: str) -> None:
    _atomic_write(path, text.encode())


def _component_bytes(comp: np.ndarray) -> bytes:
    # components are indexed (x, y[, z]); transpose makes x the fastest axis
    return np.ascontiguousarray(comp.T).astype("<f8").tobytes()


def checkpoint_save(state: SpectralState, path: str | Path) -> None:
    p = state.params
    header = _HEADER.pack(MAGIC, VERSION, state.grid.n, state.grid.dims,
                          state.t, p.a, p.b, p.c, p.lam, p.q, p.cbar, BASIS_ID)
    chunks = [header]
    for fieldset in (state.v, state.q, state.p):
        for comp in fieldset:
            chunks.append(_component_bytes(comp))
    _atomic_write(path, b"".join(chunks))


def _read_header(blob: bytes, path: Path):
    if len(blob) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header "
                              f"({len(blob)} < {_HEADER.size} bytes)")
    magic, version, n, dims, t, a, b, c, lam, q, cbar, basis = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported format version {version}")
    if basis != BASIS_ID:
        raise CheckpointError(f"{path}: basis id {basis!r} does not match {BASIS_ID!r}")
    return n, dims, t, (a, b, c, lam, q, cbar)


def checkpoint_load(path: str | Path) -> SpectralState:
    path = Path(path)
    blob = path.read_bytes()
    n, dims, t, pot = _read_header(blob, path)
    grid = Grid(n=n, dims=dims)
    expected = 13 * grid.npoints * 8
    payload = blob[_HEADER.size:]
    if len(payload) != expected:
        raise CheckpointError(f"{path}: payload is {len(payload)} bytes, "
                              f"expected {expected}")
    a, b, c, lam, q, cbar = pot
    params = PotentialParams(a=a, b=b, c=c, lam=lam, q=q, cbar=cbar)
    flat = np.frombuffer(payload, dtype="<f8").astype(float)
    per = grid.npoints
    comps = flat.reshape(13, per)
    shape_t = grid.shape[::-1]

    def unpack(rows: np.ndarray) -> np.ndarray:
        return np.stack([row.reshape(shape_t).T for row in rows])

    return SpectralState(t=t, v=unpack(comps[0:3]), q=unpack(comps[3:8]),
                         p=unpack(comps[8:13]), grid=grid, params=params)


def checkpoint_info(path: str | Path) -> dict[str, object]:
    path = Path(path)
    blob = path.read_bytes()
    n, dims, t, pot = _read_header(blob, path)
    expected = 13 * n**dims * 8
    return {
        "path": str(path), "n": n, "dims": dims, "t": t,
        "potential.a": pot[0], "potential.b": pot[1], "potential.c": pot[2],
        "potential.lambda": pot[3], "potential.q": pot[4], "potential.cbar": pot[5],
        "payload_bytes": len(blob) - _HEADER.size, "expected_bytes": expected,
        "complete": len(blob) - _HEADER.size == expected,
    }


CSV_COLUMNS = ("t", "E_kin", "E_P", "E_elastic", "E_bulk_F", "E_bulk_G",
               "E_total_F", "E_total_G", "balance_residual", "helicity",
               "max_div_v", "max_trace_Q", "loop_circulation",
               "vort_res_plus", "vort_res_minus")

_FIELD_OF_COLUMN = {
    "t": "t", "E_kin": "e_kin", "E_P": "e_p", "E_elastic": "e_elastic",
    "E_bulk_F": "e_bulk_f", "E_bulk_G": "e_bulk_g", "E_total_F": "e_total_f",
    "E_total_G": "e_total_g", "balance_residual": "balance_residual",
    "helicity": "helicity", "max_div_v": "max_div_v",
    "max_trace_Q": "max_trace_q", "loop_circulation": "loop_circulation",
    "vort_res_plus": "vort_res_plus", "vort_res_minus": "vort_res_minus",
}


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_diagnostics(records: Sequence, path: str | Path) -> None:
    """One header row plus one row per record, 17 significant digits, LF ends."""
    if not records:
        raise ValueError("refusing to write an empty diagnostics table")
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(float(getattr(rec, _FIELD_OF_COLUMN[c])))
                              for c in CSV_COLUMNS))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
