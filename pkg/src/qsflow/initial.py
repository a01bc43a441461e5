"""Initial-data presets: Taylor-Green, seeded band-limited random fields,
the manufactured wave state, and checkpoint resume.

The random generator draws one complex Gaussian per (component, mode) in a
fixed mode order that does not depend on the grid resolution, and normalizes
amplitudes on a canonical band-determined evaluation grid, so identical
(seed, band, dims) produce the same analytic field at every resolution.  This
is what lets a coarse and a fine run share initial data exactly (spectral
restriction of the fine data equals the coarse data).
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .potential import PotentialParams
from .spectral import Grid, forward, inverse, leray_project_hat
from .state import SpectralState

__all__ = ["make_initial_data", "band_limited_field"]


def _canonical_modes(dims: int, band: int) -> list[tuple[int, ...]]:
    """Modes with max|k_axis| <= band, one per conjugate pair, fixed order.

    Representatives have k_last > 0, or k_last == 0 and the remaining axes
    lexicographically positive, so each can be written into an rfft array.
    """
    rng = range(-band, band + 1)
    if dims == 2:
        cand = [(i, j) for i in rng for j in rng]
    else:
        cand = [(i, j, l) for i in rng for j in rng for l in rng]
    modes = []
    for k in cand:
        if all(x == 0 for x in k):
            continue
        if k[-1] > 0 or (k[-1] == 0 and k[:-1] > tuple(-x for x in k[:-1])):
            modes.append(k)
    return modes


def _spectral_index(grid: Grid, k: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x % grid.n for x in k[:-1]) + (k[-1],)


def band_limited_field(grid: Grid, ncomp: int, band: int, decay: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Random band-limited field, shape (ncomp, grid), resolution-independent.

    Per-mode complex Gaussian coefficients with a |k|^(-decay) envelope; the
    draw order is fixed by (dims, band) alone.  Call sites rescale and, for
    velocities, Leray-project in spectral space.
    """
    if 2 * band >= grid.n:
        raise ValueError(f"band {band} not representable on n = {grid.n}")
    modes = _canonical_modes(grid.dims, band)
    fhat = np.zeros((ncomp,) + grid.spectral_shape, dtype=complex)
    for c in range(ncomp):
        for k in modes:
            re, im = rng.standard_normal(2)
            amp = float(np.linalg.norm(k)) ** (-decay)
            coef = amp * (re + 1j * im)
            fhat[(c,) + _spectral_index(grid, k)] = coef
            if k[-1] == 0:  # keep the stored half-plane Hermitian
                kneg = tuple(-x for x in k)
                fhat[(c,) + _spectral_index(grid, kneg)] = np.conj(coef)
    return inverse(grid, fhat)


def _canonical_grid(dims: int, band: int) -> Grid:
    m = max(16, 4 * band)
    return Grid(n=m + (m % 2), dims=dims)


def _max_pointwise_norm(f: np.ndarray, dims: int) -> float:
    mag = np.sqrt(np.einsum("c...,c...->...", f, f))
    return float(mag.max())


def _random_state(grid: Grid, params: PotentialParams, cfg: RunConfig) -> SpectralState:
    # Draws happen on the canonical grid; the scale factors transfer exactly
    # because the coefficients are identical on every grid.
    def build(target: Grid, seed_rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        v = band_limited_field(target, 3, cfg.band, 2.0, seed_rng)
        v = inverse(target, leray_project_hat(target, forward(target, v)))
        q = band_limited_field(target, 5, cfg.band, 3.0, seed_rng)
        p = band_limited_field(target, 5, cfg.band, 2.0, seed_rng)
        return v, q, p

    ref = _canonical_grid(grid.dims, cfg.band)
    v_ref, q_ref, p_ref = build(ref, np.random.default_rng(cfg.seed))
    scales = []
    for f, amp in ((v_ref, cfg.amp_v), (q_ref, cfg.amp_q), (p_ref, cfg.amp_p)):
        peak = _max_pointwise_norm(f, grid.dims)
        scales.append(amp / peak if peak > 0 else 0.0)

    v, q, p = build(grid, np.random.default_rng(cfg.seed))
    return SpectralState(t=0.0, v=v * scales[0], q=q * scales[1], p=p * scales[2],
                         grid=grid, params=params)


def _taylor_green_state(grid: Grid, params: PotentialParams, cfg: RunConfig) -> SpectralState:
    x, y = grid.coords[0], grid.coords[1]
    state = SpectralState.zeros(grid, params)
    state.v[0] = cfg.amp_v * np.sin(x) * np.cos(y)
    state.v[1] = -cfg.amp_v * np.cos(x) * np.sin(y)
    state.q[0] = cfg.amp_q * np.sin(x) + np.zeros(grid.shape)
    state.p[2] = cfg.amp_p * np.cos(y) + np.zeros(grid.shape)
    return state


def _manufactured_state(grid: Grid, params: PotentialParams, cfg: RunConfig) -> SpectralState:
    # Initial slice of the closed-form standing wave Q = amp sin(x) cos(t) B1.
    state = SpectralState.zeros(grid, params)
    state.q[0] = cfg.amp_q * np.sin(grid.coords[0]) + np.zeros(grid.shape)
    return state


def make_initial_data(cfg: RunConfig) -> SpectralState:
    """Build the initial state for a RunConfig; v comes out solenoidal and
    zero-mean for the generated kinds (checkpoints are resumed untouched)."""
    grid = Grid(n=cfg.grid_n, dims=cfg.grid_dims)
    params = cfg.potential
    if cfg.initial_kind == "checkpoint":
        from .io import checkpoint_load

        return checkpoint_load(cfg.initial_path)
    if cfg.initial_kind == "taylor_green":
        state = _taylor_green_state(grid, params, cfg)
    elif cfg.initial_kind == "random_bandlimited":
        state = _random_state(grid, params, cfg)
    elif cfg.initial_kind == "manufactured":
        state = _manufactured_state(grid, params, cfg)
    else:
        raise ValueError(f"unknown initial kind {cfg.initial_kind!r}")

    vhat = leray_project_hat(grid, forward(grid, state.v))
    vhat[(slice(None),) + (0,) * grid.dims] = 0.0
    state.v = inverse(grid, vhat)
    return state
