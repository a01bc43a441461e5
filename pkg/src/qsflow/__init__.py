"""Pseudospectral solver and conservation diagnostics for the inviscid
Qian-Sheng Q-tensor system on the periodic torus."""

from .config import ConfigError, RunConfig, parse_config
from .dynamics import BlowupError, Trajectory, cfl_dt, rhs, run, step_rk4
from .initial import make_initial_data
from .potential import PotentialParams, check_assumptions
from .spectral import Grid
from .state import SpectralState

__version__ = "0.1.0"

__all__ = ["ConfigError", "RunConfig", "parse_config", "BlowupError",
           "Trajectory", "cfl_dt", "rhs", "run", "step_rk4",
           "make_initial_data", "PotentialParams", "check_assumptions",
           "Grid", "SpectralState", "__version__"]
