"""Right-hand sides of the coupled Euler / Q-tensor wave system and RK4 stepping.

The system solved on the torus:

    div v = 0
    dv/dt + (v.grad) v + grad Pi = -div(grad Q (.) grad Q)
    dQ/dt + (v.grad) Q = P
    dP/dt + (v.grad) P = -dF(Q) + Lap Q - (trace multiplier)

with S_ab = d_a Q : d_b Q the elastic stress.  The pressure and the trace
multiplier are realized exactly by the Leray projection and by storing Q, P in
the traceless-symmetric basis; both are recovered as diagnostic fields.

Quadratic products (advection, stress) are dealiased with the two-thirds rule;
the pointwise bulk term dF(Q) is not dealiased by default (`dealias_potential`
knob), which keeps its pairing with P exact in the grid quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import diagnostics, kernels, spectral
from .potential import bulk_gradient, trace_multiplier
from .spectral import Grid, dealias, forward, gradient, inverse
from .state import SpectralState

__all__ = ["RhsBundle", "Trajectory", "BlowupError", "stress_tensor", "rhs",
           "cfl_dt", "step_rk4", "run"]

#: Optional additive forcing: t -> (f_v, f_q, f_p), physical fields or None.
Forcing = Callable[[float], tuple[Optional[np.ndarray], Optional[np.ndarray], Optional[np.ndarray]]]


class BlowupError(RuntimeError):
    """Raised when the solution leaves the finite / capped regime."""

    def __init__(self, t: float, reason: str, trajectory: "Trajectory | None" = None):
        super().__init__(f"blow-up detected at t={t:.6g}: {reason}")
        self.t = t
        self.reason = reason
        self.trajectory = trajectory


@dataclass
class RhsBundle:
    """Time derivatives plus the diagnostic multiplier and pressure fields."""

    dv: np.ndarray
    dq: np.ndarray
    dp: np.ndarray
    lam_field: np.ndarray
    pressure: np.ndarray


@dataclass
class Trajectory:
    """Snapshots at uniform cadence plus their per-time diagnostics records."""

    states: list[SpectralState]
    records: list["diagnostics.DiagnosticsRecord"]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def grid(self) -> Grid:
        return self.states[0].grid


def stress_tensor(state: SpectralState, qhat: np.ndarray | None = None) -> np.ndarray:
    """Elastic stress S_ab = d_a Q : d_b Q, pointwise, dealiased; shape (3, 3, grid)."""
    if qhat is None:
        qhat = forward(state.grid, state.q)
    grad_q = gradient(state.grid, qhat)
    s = kernels.stress(grad_q)
    shat = dealias(state.grid, forward(state.grid, s))
    return inverse(state.grid, shat)


def rhs(state: SpectralState, forcing: Forcing | None = None,
        dealias_potential: bool = False) -> RhsBundle:
    """Assemble all three time derivatives (with Leray projection applied to dv)
    and recover the diagnostic pressure from -Lap Pi = div[(v.grad)v + div S]."""
    g = state.grid
    vhat = forward(g, state.v)
    qhat = forward(g, state.q)
    phat = forward(g, state.p)

    grad_v = gradient(g, vhat)
    grad_q = gradient(g, qhat)
    grad_p = gradient(g, phat)

    adv_v_hat = dealias(g, forward(g, kernels.advect(state.v, grad_v)))
    adv_q_hat = dealias(g, forward(g, kernels.advect(state.v, grad_q)))
    adv_p_hat = dealias(g, forward(g, kernels.advect(state.v, grad_p)))

    s_hat = dealias(g, forward(g, kernels.stress(grad_q)))
    div_s_hat = np.stack([
        sum(spectral.spectral_derivative(g, s_hat[a, b], a) for a in range(3))
        for b in range(3)
    ])

    fv = fq = fp = None
    if forcing is not None:
        fv, fq, fp = forcing(state.t)

    dv_hat = -adv_v_hat - div_s_hat
    if fv is not None:
        dv_hat = dv_hat + forward(g, fv)
    dv_hat = spectral.leray_project_hat(g, dv_hat)
    dv = inverse(g, dv_hat)

    dq = -inverse(g, adv_q_hat) + state.p
    if fq is not None:
        dq = dq + fq

    pot = bulk_gradient(state.q, state.params)
    if dealias_potential:
        pot = inverse(g, dealias(g, forward(g, pot)))
    lap_q = inverse(g, spectral.laplacian_hat(g, qhat))
    dp = -inverse(g, adv_p_hat) - pot + lap_q
    if fp is not None:
        dp = dp + fp

    lam_field = trace_multiplier(state.q, state.params)

    # -Lap Pi = div[(v.grad)v + div S]  => |k|^2 Pi_hat = i k.(adv) - (k k^T):S
    k2 = g.k_squared.copy()
    k2[(0,) * g.dims] = 1.0
    div_adv = sum(spectral.spectral_derivative(g, adv_v_hat[a], a) for a in range(3))
    div_div_s = sum(spectral.spectral_derivative(g, div_s_hat[b], b) for b in range(3))
    pi_hat = (div_adv + div_div_s) / k2
    pi_hat[(0,) * g.dims] = 0.0
    pressure = inverse(g, pi_hat)

    return RhsBundle(dv=dv, dq=dq, dp=dp, lam_field=lam_field, pressure=pressure)


def cfl_dt(state: SpectralState, safety: float) -> float:
    """dt = safety / (k_max (|v|_inf + 1)) with k_max = n//3; the +1 covers the
    unit wave speed of the Q-P subsystem."""
    if not 0.0 < safety <= 1.0:
        raise ValueError(f"cfl safety must be in (0, 1], got {safety}")
    k_max = state.grid.cutoff
    vmax = spectral.linf_norm(state.v) if state.v.size else 0.0
    return safety / (k_max * (vmax + 1.0))


def step_rk4(state: SpectralState, dt: float, forcing: Forcing | None = None,
             dealias_potential: bool = False) -> SpectralState:
    """Classical explicit RK4 update; raises BlowupError on non-finite output."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")

    def f(s: SpectralState) -> RhsBundle:
        return rhs(s, forcing=forcing, dealias_potential=dealias_potential)

    def shifted(k: RhsBundle, h: float) -> SpectralState:
        return SpectralState(t=state.t + h, v=state.v + h * k.dv,
                             q=state.q + h * k.dq, p=state.p + h * k.dp,
                             grid=state.grid, params=state.params)

    k1 = f(state)
    k2 = f(shifted(k1, 0.5 * dt))
    k3 = f(shifted(k2, 0.5 * dt))
    k4 = f(shifted(k3, dt))

    c = dt / 6.0
    out = SpectralState(
        t=state.t + dt,
        v=state.v + c * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
        q=state.q + c * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
        p=state.p + c * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
        grid=state.grid, params=state.params)
    if not out.is_finite():
        raise BlowupError(out.t, "non-finite field values after step")
    return out


def _check_caps(state: SpectralState, cap: float, full: bool = False) -> None:
    vmax = spectral.linf_norm(state.v)
    if vmax > cap:
        raise BlowupError(state.t, f"|v|_inf = {vmax:.3e} exceeds cap {cap:.3e}")
    if full:  # gradient needs transforms; checked at snapshot cadence
        gq = gradient(state.grid, forward(state.grid, state.q))
        gmax = spectral.linf_norm(gq)
        if gmax > cap:
            raise BlowupError(state.t, f"|grad Q|_inf = {gmax:.3e} exceeds cap {cap:.3e}")


def integrate(state: SpectralState, t_end: float, snapshot_interval: float,
              cfl_safety: float, blowup_cap: float = 1e6,
              forcing: Forcing | None = None, dealias_potential: bool = False,
              dt_override: float | None = None,
              debug_checks: bool = False) -> list[SpectralState]:
    """March from state.t to t_end, returning snapshots at the uniform cadence.

    Within each interval the step is interval/ceil(interval/cfl_dt) so every
    snapshot time is hit exactly; dt_override pins the CFL-free step instead.
    On blow-up the exception carries the snapshots collected so far.
    """
    snaps = [state.copy()]
    if t_end <= state.t:
        return snaps
    t0 = state.t
    n_intervals = int(np.ceil((t_end - t0) / snapshot_interval - 1e-12))
    try:
        for i in range(n_intervals):
            target = min(t0 + (i + 1) * snapshot_interval, t_end)
            span = target - state.t
            dt_lim = dt_override if dt_override is not None else cfl_dt(state, cfl_safety)
            nsteps = max(1, int(np.ceil(span / dt_lim - 1e-12)))
            dt = span / nsteps
            for _ in range(nsteps):
                state = step_rk4(state, dt, forcing=forcing,
                                 dealias_potential=dealias_potential)
                _check_caps(state, blowup_cap)
                if debug_checks:
                    _debug_step_checks(state)
            state.t = target  # avoid accumulated roundoff in snapshot times
            _check_caps(state, blowup_cap, full=True)
            snaps.append(state.copy())
    except BlowupError as err:
        err.trajectory = Trajectory(states=snaps, records=[])
        raise
    return snaps


def _debug_step_checks(state: SpectralState) -> None:
    g = state.grid
    div = state.divergence_ratio()
    if div > 1e-11:
        raise AssertionError(f"solenoidal invariant violated: {div:.3e}")
    # Parseval on v, first component.
    vhat = forward(g, state.v[0])
    lhs = float(np.mean(state.v[0] ** 2))
    rhsv = spectral.parseval_spectrum_sum(g, vhat)
    if abs(lhs - rhsv) > 1e-12 * (1.0 + abs(lhs)):
        raise AssertionError("Parseval identity violated")
    power = diagnostics.momentum_power_identity(state)
    scale = max(abs(power[0]), abs(power[1]), 1e-30)
    if abs(power[0] - power[1]) > 1e-10 * scale:
        raise AssertionError(f"momentum weak identity violated: {power}")


def run(config) -> Trajectory:
    """Integrate a RunConfig from t=0 and attach per-snapshot diagnostics.

    Deterministic: a given (config, seed) reproduces byte-identical outputs.
    """
    from .initial import make_initial_data  # deferred: io layer imports state

    state = make_initial_data(config)
    states = integrate(
        state, t_end=config.t_end, snapshot_interval=config.snapshot_interval,
        cfl_safety=config.cfl_safety, blowup_cap=config.blowup_cap,
        dealias_potential=config.dealias_potential, debug_checks=config.debug,
    )
    loop = None
    if config.loop_radius > 0.0:
        loop0 = diagnostics.circle_loop(config.loop_center, config.loop_radius,
                                        config.loop_points)
        loop = diagnostics.advect_loop(states, loop0)
    records = diagnostics.trajectory_records(states, loops=loop)
    return Trajectory(states=states, records=records)
