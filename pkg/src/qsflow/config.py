"""Run configuration: flat key=value text with dotted sections.

Example file:

    grid.n = 64
    grid.dims = 2
    t_end = 1.0
    snapshot_interval = 0.01
    cfl_safety = 0.25
    potential.a = 1.0
    potential.c = 1.0
    initial.kind = taylor_green
    initial.amp_v = 0.1

Unknown keys are rejected; every violated constraint is reported with its key
path.  `format_config` renders the effective configuration (defaults filled)
in canonical order, which the CLI echoes before a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .potential import PotentialParams

__all__ = ["RunConfig", "ConfigError", "parse_config", "config_from_dict",
           "format_config"]

KINDS = ("taylor_green", "random_bandlimited", "manufactured", "checkpoint")


class ConfigError(ValueError):
    """Carries the itemized list of configuration problems."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in errors))


@dataclass
class RunConfig:
    grid_n: int = 32
    grid_dims: int = 2
    t_end: float = 1.0
    snapshot_interval: float = 0.01
    cfl_safety: float = 0.25
    potential: PotentialParams = field(default_factory=PotentialParams)
    initial_kind: str = "taylor_green"
    amp_v: float = 0.1
    amp_q: float = 0.05
    amp_p: float = 0.05
    band: int = 2
    seed: int | None = None
    initial_path: str = ""
    dealias_potential: bool = False
    blowup_cap: float = 1e6
    debug: bool = False
    loop_center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    loop_radius: float = 0.0
    loop_points: int = 64
    output_diagnostics: str = "out/diagnostics.csv"
    output_checkpoint: str = ""
    audit_samples: int = 10_000
    audit_radius: float = 10.0
    audit_seed: int = 0
    convergence_levels: int = 3


# key path -> (RunConfig attribute, type tag)
_KEYMAP = {
    "grid.n": ("grid_n", int),
    "grid.dims": ("grid_dims", int),
    "t_end": ("t_end", float),
    "snapshot_interval": ("snapshot_interval", float),
    "cfl_safety": ("cfl_safety", float),
    "potential.a": ("_pot_a", float),
    "potential.b": ("_pot_b", float),
    "potential.c": ("_pot_c", float),
    "potential.lambda": ("_pot_lam", float),
    "potential.q": ("_pot_q", float),
    "potential.cbar": ("_pot_cbar", float),
    "initial.kind": ("initial_kind", str),
    "initial.amp_v": ("amp_v", float),
    "initial.amp_q": ("amp_q", float),
    "initial.amp_p": ("amp_p", float),
    "initial.band": ("band", int),
    "initial.seed": ("seed", int),
    "initial.path": ("initial_path", str),
    "dealias_potential": ("dealias_potential", bool),
    "blowup_cap": ("blowup_cap", float),
    "debug": ("debug", bool),
    "loop.center_x": ("_loop_cx", float),
    "loop.center_y": ("_loop_cy", float),
    "loop.center_z": ("_loop_cz", float),
    "loop.radius": ("loop_radius", float),
    "loop.points": ("loop_points", int),
    "output.diagnostics": ("output_diagnostics", str),
    "output.checkpoint": ("output_checkpoint", str),
    "audit.n_samples": ("audit_samples", int),
    "audit.radius": ("audit_radius", float),
    "audit.seed": ("audit_seed", int),
    "convergence.levels": ("convergence_levels", int),
}


def _convert(key: str, raw: str, kind, errors: list[str]):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError
        return kind(raw)
    except ValueError:
        errors.append(f"{key}: cannot parse {raw!r} as {kind.__name__}")
        return None


def config_from_dict(raw: dict[str, str]) -> RunConfig:
    """Validate a key->string mapping into a RunConfig; raises ConfigError."""
    errors: list[str] = []
    values: dict[str, object] = {}
    for key, raw_val in raw.items():
        if key not in _KEYMAP:
            errors.append(f"{key}: unknown key")
            continue
        attr, kind = _KEYMAP[key]
        val = _convert(key, str(raw_val), kind, errors)
        if val is not None:
            values[attr] = val

    pot_kwargs = {}
    for pkey, pattr in (("a", "_pot_a"), ("b", "_pot_b"), ("c", "_pot_c"),
                        ("lam", "_pot_lam"), ("q", "_pot_q"), ("cbar", "_pot_cbar")):
        if pattr in values:
            pot_kwargs[pkey] = values.pop(pattr)
    try:
        potential = PotentialParams(**pot_kwargs)
    except ValueError as exc:
        if "potential.c" in str(exc):
            errors.append(f"{exc} (the convexity and growth audits presume a "
                          "coercive quartic term)")
        else:
            errors.append(str(exc))
        potential = None

    center = [values.pop(k, 0.0) for k in ("_loop_cx", "_loop_cy", "_loop_cz")]
    cfg = RunConfig(**{k: v for k, v in values.items()})
    cfg.loop_center = tuple(float(c) for c in center)
    if potential is not None:
        cfg.potential = potential

    if cfg.grid_n < 8 or cfg.grid_n % 2 != 0:
        errors.append(f"grid.n: must be even and >= 8, got {cfg.grid_n}")
    if cfg.grid_dims not in (2, 3):
        errors.append(f"grid.dims: must be 2 or 3, got {cfg.grid_dims}")
    if cfg.t_end < 0:
        errors.append(f"t_end: must be >= 0, got {cfg.t_end}")
    if not cfg.snapshot_interval > 0:
        errors.append(f"snapshot_interval: must be > 0, got {cfg.snapshot_interval}")
    if not 0.0 < cfg.cfl_safety <= 1.0:
        errors.append(f"cfl_safety: must be in (0, 1], got {cfg.cfl_safety}")
    if cfg.initial_kind not in KINDS:
        errors.append(f"initial.kind: must be one of {KINDS}, got {cfg.initial_kind!r}")
    for name in ("amp_v", "amp_q", "amp_p"):
        if not np.isfinite(getattr(cfg, name)):
            errors.append(f"initial.{name}: must be finite")
    if cfg.band < 1:
        errors.append(f"initial.band: must be >= 1, got {cfg.band}")
    if cfg.initial_kind == "random_bandlimited" and cfg.seed is None:
        errors.append("initial.seed: required when initial.kind = random_bandlimited")
    if cfg.initial_kind == "checkpoint" and not cfg.initial_path:
        errors.append("initial.path: required when initial.kind = checkpoint")
    if not cfg.blowup_cap > 0:
        errors.append(f"blowup_cap: must be > 0, got {cfg.blowup_cap}")
    if cfg.loop_radius < 0:
        errors.append(f"loop.radius: must be >= 0, got {cfg.loop_radius}")
    if cfg.loop_radius > 0 and cfg.loop_points < 16:
        errors.append(f"loop.points: must be >= 16, got {cfg.loop_points}")
    if cfg.convergence_levels < 2:
        errors.append(f"convergence.levels: must be >= 2, got {cfg.convergence_levels}")
    if cfg.audit_samples < 1:
        errors.append(f"audit.n_samples: must be >= 1, got {cfg.audit_samples}")
    if not cfg.audit_radius > 0:
        errors.append(f"audit.radius: must be > 0, got {cfg.audit_radius}")

    if errors:
        raise ConfigError(errors)
    return cfg


def parse_config(path: str | Path) -> RunConfig:
    """Parse and validate a config file; raises ConfigError with every problem."""
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    raw: dict[str, str] = {}
    errors: list[str] = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected key = value, got {stripped!r}")
            continue
        key, val = stripped.split("=", 1)
        key = key.strip()
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key}")
        raw[key] = val.strip()
    if errors:
        raise ConfigError(errors)
    return config_from_dict(raw)


def format_config(cfg: RunConfig) -> str:
    """Canonical key=value rendering of the effective configuration."""
    p = cfg.potential
    pairs = [
        ("grid.n", cfg.grid_n), ("grid.dims", cfg.grid_dims),
        ("t_end", cfg.t_end), ("snapshot_interval", cfg.snapshot_interval),
        ("cfl_safety", cfg.cfl_safety),
        ("potential.a", p.a), ("potential.b", p.b), ("potential.c", p.c),
        ("potential.lambda", p.lam), ("potential.q", p.q), ("potential.cbar", p.cbar),
        ("initial.kind", cfg.initial_kind), ("initial.amp_v", cfg.amp_v),
        ("initial.amp_q", cfg.amp_q), ("initial.amp_p", cfg.amp_p),
        ("initial.band", cfg.band),
        ("initial.seed", cfg.seed if cfg.seed is not None else ""),
        ("initial.path", cfg.initial_path),
        ("dealias_potential", str(cfg.dealias_potential).lower()),
        ("blowup_cap", cfg.blowup_cap), ("debug", str(cfg.debug).lower()),
        ("loop.center_x", cfg.loop_center[0]), ("loop.center_y", cfg.loop_center[1]),
        ("loop.center_z", cfg.loop_center[2]), ("loop.radius", cfg.loop_radius),
        ("loop.points", cfg.loop_points),
        ("output.diagnostics", cfg.output_diagnostics),
        ("output.checkpoint", cfg.output_checkpoint),
        ("audit.n_samples", cfg.audit_samples), ("audit.radius", cfg.audit_radius),
        ("audit.seed", cfg.audit_seed),
        ("convergence.levels", cfg.convergence_levels),
    ]
    return "\n".join(f"{k} = {v}" for k, v in pairs) + "\n"
