"""Simulation state: solenoidal velocity plus the Q and P coefficient fields."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .potential import PotentialParams
from .spectral import Grid, divergence_ratio
from .tensor import to_matrix

__all__ = ["SpectralState", "max_trace"]


@dataclass
class SpectralState:
    """Full state at time t: v (3, grid), q and p (5, grid) coefficient fields.

    q and p are traceless symmetric by construction (basis storage); v is kept
    solenoidal by the Leray projection inside the right-hand side.
    """

    t: float
    v: np.ndarray
    q: np.ndarray
    p: np.ndarray
    grid: Grid
    params: PotentialParams

    def __post_init__(self) -> None:
        sp = self.grid.shape
        if self.v.shape != (3,) + sp or self.q.shape != (5,) + sp or self.p.shape != (5,) + sp:
            raise ValueError("field shapes inconsistent with grid")

    def copy(self, **changes) -> "SpectralState":
        out = replace(self, **changes)
        for name in ("v", "q", "p"):
            if name not in changes:
                setattr(out, name, getattr(self, name).copy())
        return out

    @classmethod
    def zeros(cls, grid: Grid, params: PotentialParams, t: float = 0.0) -> "SpectralState":
        sp = grid.shape
        return cls(t=t, v=np.zeros((3,) + sp), q=np.zeros((5,) + sp),
                   p=np.zeros((5,) + sp), grid=grid, params=params)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.q))
                    and np.all(np.isfinite(self.p)))

    def divergence_ratio(self) -> float:
        return divergence_ratio(self.grid, self.v)


def max_trace(c: np.ndarray) -> float:
    """max over the grid of |tr M| for the reconstructed matrices (rounding only)."""
    m = to_matrix(c)
    return float(np.max(np.abs(m[0, 0] + m[1, 1] + m[2, 2])))
