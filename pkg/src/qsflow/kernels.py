"""Pointwise hot kernels with a compiled core and a numpy fallback.

The per-point tensor algebra (quartic potential value/gradient, constrained
square, advective and elastic-stress contractions) dominates the non-FFT cost
of a right-hand-side evaluation.  When the Cython extension `qsflow._kernels`
is importable it is used; otherwise the einsum fallbacks below are selected.
`QSFLOW_FORCE_NUMPY=1` forces the fallback (used by tests and the benchmark).

All kernels take coefficient fields with the component axis first and
broadcast over arbitrary trailing grid axes.  Both backends compute identical
formulas; they agree to rounding (summation order differs), so a given build
is deterministic but the two backends are not bit-identical to each other.
"""

from __future__ import annotations

import os

import numpy as np

from .tensor import STRUCTURE

try:  # pragma: no cover - exercised only when the extension is built
    from . import _kernels as _ext
except ImportError:
    _ext = None

if os.environ.get("QSFLOW_FORCE_NUMPY"):
    _ext = None

#: Name of the active backend, "cython" or "numpy".
BACKEND = "cython" if _ext is not None else "numpy"


def _np_traceless_square(c: np.ndarray) -> np.ndarray:
    return np.einsum("kij,i...,j...->k...", STRUCTURE, c, c)


def _np_tr_q3(c: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,i...,j...,k...->...", STRUCTURE, c, c, c)


def _np_bulk_value(c: np.ndarray, a: float, b: float, c4: float) -> np.ndarray:
    q2 = np.einsum("i...,i...->...", c, c)
    return 0.5 * a * q2 + (b / 3.0) * _np_tr_q3(c) + 0.25 * c4 * q2 * q2


def _np_bulk_gradient(c: np.ndarray, a: float, b: float, c4: float) -> np.ndarray:
    q2 = np.einsum("i...,i...->...", c, c)
    return a * c + b * _np_traceless_square(c) + c4 * q2 * c


def _np_advect(v: np.ndarray, grad: np.ndarray) -> np.ndarray:
    # grad[a, m, ...] = d_a f_m; returns (v . grad) f, shape (m, ...).
    return np.einsum("a...,am...->m...", v, grad)


def _np_stress(grad_q: np.ndarray) -> np.ndarray:
    # S_ab = d_a Q : d_b Q summed over the 5 coefficients.
    return np.einsum("am...,bm...->ab...", grad_q, grad_q)


def _flatten(arr: np.ndarray, lead: int) -> tuple[np.ndarray, tuple[int, ...]]:
    tail = arr.shape[lead:]
    flat = np.ascontiguousarray(arr).reshape(arr.shape[:lead] + (-1,))
    return flat, tail


if _ext is None:
    traceless_square = _np_traceless_square
    tr_q3 = _np_tr_q3
    bulk_value = _np_bulk_value
    bulk_gradient = _np_bulk_gradient
    advect = _np_advect
    stress = _np_stress
else:  # pragma: no cover - only with the extension built

    def traceless_square(c: np.ndarray) -> np.ndarray:
        flat, tail = _flatten(np.asarray(c, float), 1)
        return _ext.traceless_square(flat).reshape((5,) + tail)

    def tr_q3(c: np.ndarray) -> np.ndarray:
        flat, tail = _flatten(np.asarray(c, float), 1)
        return _ext.tr_q3(flat).reshape(tail)

    def bulk_value(c: np.ndarray, a: float, b: float, c4: float) -> np.ndarray:
        flat, tail = _flatten(np.asarray(c, float), 1)
        return _ext.bulk_value(flat, a, b, c4).reshape(tail)

    def bulk_gradient(c: np.ndarray, a: float, b: float, c4: float) -> np.ndarray:
        flat, tail = _flatten(np.asarray(c, float), 1)
        return _ext.bulk_gradient(flat, a, b, c4).reshape((5,) + tail)

    def advect(v: np.ndarray, grad: np.ndarray) -> np.ndarray:
        vf, tail = _flatten(np.asarray(v, float), 1)
        gf, _ = _flatten(np.asarray(grad, float), 2)
        ncomp = gf.shape[1]
        return _ext.advect(vf, gf).reshape((ncomp,) + tail)

    def stress(grad_q: np.ndarray) -> np.ndarray:
        gf, tail = _flatten(np.asarray(grad_q, float), 2)
        return _ext.stress(gf).reshape((3, 3) + tail)
