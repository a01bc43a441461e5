"""Spectral restriction and prolongation between grid resolutions.

Restriction truncates to the modes representable on the coarser grid
(Nyquist planes dropped), prolongation zero-pads; with the mean-normalized
transform the retained coefficients are copied unchanged, so the two maps are
mutually adjoint in L2 and prolong(restrict(f)) is the identity on fields
band-limited below the coarse cutoff.
"""

from __future__ import annotations

import numpy as np

from .spectral import Grid, forward, inverse
from .state import SpectralState

__all__ = ["restrict_field", "prolong_field", "restrict_state", "prolong_state"]


def _axis_indices(n_src: int, n_tgt: int) -> tuple[np.ndarray, np.ndarray]:
    """Source/target index pairs for one full FFT axis; keeps |k| <= m/2 - 1
    where m = min(n_src, n_tgt)."""
    m = min(n_src, n_tgt)
    half = m // 2
    pos = np.arange(half)
    neg = np.arange(1, half)
    src = np.concatenate([pos, n_src - neg[::-1]])
    tgt = np.concatenate([pos, n_tgt - neg[::-1]])
    return src, tgt


def _resample_hat(fhat: np.ndarray, src_grid: Grid, tgt_grid: Grid) -> np.ndarray:
    lead = fhat.shape[: fhat.ndim - src_grid.dims]
    out = np.zeros(lead + tgt_grid.spectral_shape, dtype=complex)
    src_idx, tgt_idx = [], []
    for _ in range(src_grid.dims - 1):
        s, t = _axis_indices(src_grid.n, tgt_grid.n)
        src_idx.append(s)
        tgt_idx.append(t)
    half = min(src_grid.n, tgt_grid.n) // 2
    src_idx.append(np.arange(half))
    tgt_idx.append(np.arange(half))
    out[(Ellipsis,) + np.ix_(*tgt_idx)] = fhat[(Ellipsis,) + np.ix_(*src_idx)]
    return out


def _resample_field(f: np.ndarray, src: Grid, tgt: Grid) -> np.ndarray:
    if src.dims != tgt.dims:
        raise ValueError("resampling requires matching dims")
    if f.shape[-src.dims:] != src.shape:
        raise ValueError("field does not match source grid")
    return inverse(tgt, _resample_hat(forward(src, f), src, tgt))


def restrict_field(f: np.ndarray, src: Grid, tgt: Grid) -> np.ndarray:
    """Spectral truncation onto a coarser grid (tgt.n < src.n)."""
    if tgt.n >= src.n:
        raise ValueError(f"restrict needs target n < source n, got {tgt.n} >= {src.n}")
    return _resample_field(f, src, tgt)


def prolong_field(f: np.ndarray, src: Grid, tgt: Grid) -> np.ndarray:
    """Zero-padding onto a finer grid (tgt.n > src.n)."""
    if tgt.n <= src.n:
        raise ValueError(f"prolong needs target n > source n, got {tgt.n} <= {src.n}")
    return _resample_field(f, src, tgt)


def _resample_state(state: SpectralState, tgt: Grid) -> SpectralState:
    return SpectralState(
        t=state.t,
        v=_resample_field(state.v, state.grid, tgt),
        q=_resample_field(state.q, state.grid, tgt),
        p=_resample_field(state.p, state.grid, tgt),
        grid=tgt, params=state.params)


def restrict_state(state: SpectralState, n: int) -> SpectralState:
    tgt = Grid(n=n, dims=state.grid.dims)
    if tgt.n >= state.grid.n:
        raise ValueError("restrict needs a coarser target resolution")
    return _resample_state(state, tgt)


def prolong_state(state: SpectralState, n: int) -> SpectralState:
    tgt = Grid(n=n, dims=state.grid.dims)
    if tgt.n <= state.grid.n:
        raise ValueError("prolong needs a finer target resolution")
    return _resample_state(state, tgt)
