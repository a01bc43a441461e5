"""Command-line driver.

Subcommands:

    run <config>              integrate and write the diagnostics CSV
    check-potential <config>  run the potential assumption audit
    compare <cfgA> <cfgB>     two-resolution relative energy, Gronwall check,
                              and defect estimation (cfgB is the reference)
    convergence <config>      time-refinement convergence table
    info <checkpoint>         print a checkpoint header

Exit codes: 0 success, 1 usage, 2 runtime/blow-up, 3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, dynamics, io
from .config import ConfigError, RunConfig, format_config, parse_config
from .initial import make_initial_data
from .potential import check_assumptions
from .spectral import Grid, l2_norm

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the taxonomy wants 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qsflow", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate a configuration")
    p_run.add_argument("config")
    p_chk = sub.add_parser("check-potential", help="audit the potential assumptions")
    p_chk.add_argument("config")
    p_chk.add_argument("--out", default="", help="also write the report to this path")
    p_cmp = sub.add_parser("compare", help="two-resolution comparison")
    p_cmp.add_argument("config_coarse")
    p_cmp.add_argument("config_fine")
    p_cmp.add_argument("--out", default="compare_out", help="output directory")
    p_cnv = sub.add_parser("convergence", help="time-refinement table")
    p_cnv.add_argument("config")
    p_inf = sub.add_parser("info", help="print a checkpoint header")
    p_inf.add_argument("checkpoint")
    return parser


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    print(format_config(cfg), end="")
    try:
        traj = dynamics.run(cfg)
    except dynamics.BlowupError as err:
        print(f"error: {err}", file=sys.stderr)
        if err.trajectory is not None and err.trajectory.states:
            partial = diagnostics.trajectory_records(err.trajectory.states)
            io.write_diagnostics(partial, cfg.output_diagnostics)
            print(f"partial diagnostics written to {cfg.output_diagnostics}",
                  file=sys.stderr)
        return EXIT_RUNTIME
    io.write_diagnostics(traj.records, cfg.output_diagnostics)
    print(f"diagnostics written to {cfg.output_diagnostics} "
          f"({len(traj.records)} snapshots)")
    if cfg.output_checkpoint:
        io.checkpoint_save(traj.states[-1], cfg.output_checkpoint)
        print(f"final state written to {cfg.output_checkpoint}")
    rec = traj.records[-1]
    print(f"t = {rec.t:.6g}  E_total_F = {rec.e_total_f:.12g}  "
          f"balance_residual = {rec.balance_residual:.3e}")
    return EXIT_OK


def _cmd_check_potential(args) -> int:
    cfg = parse_config(args.config)
    report = check_assumptions(cfg.potential, n_samples=cfg.audit_samples,
                               radius=cfg.audit_radius, seed=cfg.audit_seed)
    text = report.to_text()
    print(text, end="")
    if args.out:
        io.write_text(args.out, text)
    return EXIT_OK


def _series_csv(series, path: Path) -> None:
    lines = ["t,e_rel,envelope,lipschitz"]
    for t, e, env, lip in zip(series.times, series.e_rel, series.envelope,
                              series.lipschitz):
        lines.append(f"{t:.17g},{e:.17g},{env:.17g},{lip:.17g}")
    io.write_text(path, "\n".join(lines) + "\n")


def _defect_csv(report, path: Path) -> None:
    lines = ["t,r1,r2,d"]
    for t, r1, r2, d in zip(report.times, report.r1, report.r2, report.d):
        lines.append(f"{t:.17g},{r1:.17g},{r2:.17g},{d:.17g}")
    io.write_text(path, "\n".join(lines) + "\n")


def _cmd_compare(args) -> int:
    cfg_a = parse_config(args.config_coarse)
    cfg_b = parse_config(args.config_fine)
    problems = []
    if cfg_a.grid_dims != cfg_b.grid_dims:
        problems.append("grid.dims differ")
    if cfg_a.grid_n > cfg_b.grid_n:
        problems.append("the second configuration must be the finer run")
    for name in ("t_end", "snapshot_interval"):
        if getattr(cfg_a, name) != getattr(cfg_b, name):
            problems.append(f"{name} differs between configurations")
    if cfg_a.potential != cfg_b.potential:
        problems.append("potential parameters differ")
    if problems:
        raise ConfigError(problems)

    traj_a = dynamics.run(cfg_a)
    traj_b = dynamics.run(cfg_b)
    series = diagnostics.gronwall_check(traj_a.states, traj_b.states)
    report = diagnostics.defect_estimate(traj_a.states, traj_b.states)

    out = Path(args.out)
    _series_csv(series, out / "relative_energy.csv")
    _defect_csv(report, out / "defects.csv")
    summary = (
        f"relative_energy.max: {float(np.max(series.e_rel)):.17g}\n"
        f"gronwall.c_fitted: {series.c_fitted:.17g}\n"
        f"gronwall.passed: {series.passed}\n"
        f"strong.tail_fraction: {series.tail_fraction:.6e}\n"
        + report.to_text())
    io.write_text(out / "summary.txt", summary)
    print(summary, end="")
    print(f"comparison outputs written to {out}/")
    return EXIT_OK


def _wave_exact(state, t: float) -> tuple[np.ndarray, np.ndarray]:
    x = state.grid.coords[0]
    amp = float(state.q[0].max())  # q starts as amp*sin(x) on component 0
    q = np.zeros_like(state.q)
    p = np.zeros_like(state.p)
    base = np.sin(x) + np.zeros(state.grid.shape)
    q[0] = amp * base * np.cos(t)
    p[0] = -amp * base * np.sin(t)
    return q, p


def _cmd_convergence(args) -> int:
    cfg = parse_config(args.config)
    pot = cfg.potential
    exact = (cfg.initial_kind == "manufactured"
             and pot.a == pot.b == 0.0 and pot.lam == 0.0)
    state0 = make_initial_data(cfg)
    base = dynamics.cfl_dt(state0, cfg.cfl_safety)
    levels = cfg.convergence_levels
    finals = []
    dts = []
    for lev in range(levels + (0 if exact else 1)):
        dt = base / 2**lev
        snaps = dynamics.integrate(state0.copy(), cfg.t_end, cfg.t_end,
                                   cfg.cfl_safety, blowup_cap=cfg.blowup_cap,
                                   dealias_potential=cfg.dealias_potential,
                                   dt_override=dt)
        finals.append(snaps[-1])
        dts.append(dt)
    print(f"{'level':>5} {'dt':>12} {'error':>14} {'order':>7}")
    errors = []
    for lev in range(levels):
        s = finals[lev]
        if exact:
            q_ref, p_ref = _wave_exact(state0, s.t)
            ref_v = np.zeros_like(s.v)
        else:
            ref = finals[-1]
            q_ref, p_ref, ref_v = ref.q, ref.p, ref.v
        g = s.grid
        err = np.sqrt(l2_norm(g, s.q - q_ref) ** 2 + l2_norm(g, s.p - p_ref) ** 2
                      + l2_norm(g, s.v - ref_v) ** 2)
        errors.append(err)
        order = (np.log2(errors[-2] / err) if lev > 0 and err > 0 else float("nan"))
        print(f"{lev:>5} {dts[lev]:>12.5e} {err:>14.6e} {order:>7.3f}")
    return EXIT_OK


def _cmd_info(args) -> int:
    info = io.checkpoint_info(args.checkpoint)
    for key, val in info.items():
        print(f"{key}: {val}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "check-potential": _cmd_check_potential,
    "compare": _cmd_compare,
    "convergence": _cmd_convergence,
    "info": _cmd_info,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (io.CheckpointError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except dynamics.BlowupError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
