"""Conservation and structure diagnostics: energy breakdown and balance,
extended circulation/vorticity/helicity, advected-loop circulation, weak-form
residuals, two-resolution defect estimation, relative energy, and the
Gronwall weak-strong check.

All functions are pure in the trajectory snapshots; nothing here mutates a
state or depends on the stepping order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, resample, spectral, tensor
from .potential import bulk_gradient, bulk_value, convexity_gap, g_gradient, g_value
from .spectral import (Grid, dealias, evaluate_at_points, forward, gradient,
                       integral, inverse, mode_coefficient)
from .state import SpectralState, max_trace

__all__ = ["DiagnosticsRecord", "DefectReport", "RelativeEnergySeries",
           "LoopResolutionWarning", "energy_breakdown", "qp_inner",
           "energy_balance_series", "extended_circulation_field",
           "extended_vorticity", "helicity", "vorticity_residual",
           "circle_loop", "advect_loop", "loop_circulation", "weak_residuals",
           "defect_estimate", "relative_energy", "gronwall_check",
           "momentum_power_identity", "trajectory_records"]


class LoopResolutionWarning(UserWarning):
    """Marker spacing on an advected loop degraded past the resolution cap."""


@dataclass
class DiagnosticsRecord:
    """One row of the diagnostics table; energies use the grid quadrature."""

    t: float
    e_kin: float
    e_p: float
    e_elastic: float
    e_bulk_f: float
    e_bulk_g: float
    e_total_f: float
    e_total_g: float
    balance_residual: float = np.nan
    helicity: float = np.nan
    max_div_v: float = np.nan
    max_trace_q: float = np.nan
    loop_circulation: float = np.nan
    vort_res_plus: float = np.nan
    vort_res_minus: float = np.nan


@dataclass
class DefectReport:
    """Two-resolution defect estimate: entrywise L1 norms of the momentum and
    P-equation defect densities, the dissipation defect, and the smallest
    constant dominating their cumulative ratio."""

    times: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    d: np.ndarray
    d_signed: np.ndarray = field(repr=False)
    ddi_constant: float = 0.0

    def to_text(self) -> str:
        lines = [
            f"defect.max_r1: {self.r1.max():.17g}",
            f"defect.max_r2: {self.r2.max():.17g}",
            f"defect.max_d: {self.d.max():.17g}",
            f"defect.ddi_constant: {self.ddi_constant:.17g}",
        ]
        return "\n".join(lines) + "\n"


@dataclass
class RelativeEnergySeries:
    """Relative energy against a resolved comparison run plus its Gronwall
    envelope and the Lipschitz norms entering the growth rate."""

    times: np.ndarray
    e_rel: np.ndarray
    envelope: np.ndarray
    lipschitz: np.ndarray
    c_fitted: float
    passed: bool
    tail_fraction: float


# ---------------------------------------------------------------------------
# energies

def _elastic_density(state: SpectralState, qhat=None) -> np.ndarray:
    g = state.grid
    if qhat is None:
        qhat = forward(g, state.q)
    gq = gradient(g, qhat)
    return np.einsum("am...,am...->...", gq, gq)


def energy_breakdown(state: SpectralState) -> DiagnosticsRecord:
    """Kinetic, inertial, elastic and bulk energies plus constraint measures."""
    g = state.grid
    e_kin = 0.5 * float(integral(g, np.einsum("a...,a...->...", state.v, state.v)))
    e_p = 0.5 * float(integral(g, np.einsum("m...,m...->...", state.p, state.p)))
    e_el = 0.5 * float(integral(g, _elastic_density(state)))
    e_f = float(integral(g, bulk_value(state.q, state.params)))
    e_g = float(integral(g, g_value(state.q, state.params)))
    return DiagnosticsRecord(
        t=state.t, e_kin=e_kin, e_p=e_p, e_elastic=e_el, e_bulk_f=e_f,
        e_bulk_g=e_g, e_total_f=e_kin + e_p + e_el + e_f,
        e_total_g=e_kin + e_p + e_el + e_g,
        max_div_v=state.divergence_ratio(),
        max_trace_q=max(max_trace(state.q), max_trace(state.p)))


def qp_inner(state: SpectralState) -> float:
    """Integral of Q:P over the torus (the source of the shifted balance)."""
    return float(integral(state.grid, np.einsum("m...,m...->...", state.q, state.p)))


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def _check_uniform(times: np.ndarray) -> float:
    dts = np.diff(times)
    if dts.size == 0:
        raise ValueError("need at least 2 snapshots")
    if np.any(np.abs(dts - dts[0]) > 1e-9 * max(dts[0], 1e-12)):
        raise ValueError("snapshots are not uniformly spaced")
    return float(dts[0])


def energy_balance_series(states: Sequence[SpectralState]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Balance residuals over a trajectory with uniform snapshot spacing.

    Returns (times, r_G, r_F) where r_G(t) = E_G(t) - E_G(0) - 2 lam * (trapezoid
    of the Q:P source) and r_F(t) = E_F(t) - E_F(0); both vanish for exact
    dynamics (r_F only when lam-free conservation applies, i.e. always, since
    the shift is diagnostic).
    """
    times = np.array([s.t for s in states])
    _check_uniform(times)
    lam = states[0].params.lam
    recs = [energy_breakdown(s) for s in states]
    e_g = np.array([r.e_total_g for r in recs])
    e_f = np.array([r.e_total_f for r in recs])
    src = np.array([qp_inner(s) for s in states])
    r_g = e_g - e_g[0] - 2.0 * lam * _cumtrapz(src, times)
    r_f = e_f - e_f[0]
    return times, r_g, r_f


# ---------------------------------------------------------------------------
# extended circulation / vorticity / helicity

def extended_circulation_field(state: SpectralState) -> np.ndarray:
    """C = v + P_ij grad Q_ij, products dealiased; shape (3, grid)."""
    g = state.grid
    gq = gradient(g, forward(g, state.q))
    w = np.einsum("m...,am...->a...", state.p, gq)
    w = inverse(g, dealias(g, forward(g, w)))
    return state.v + w


def extended_vorticity(state: SpectralState) -> np.ndarray:
    """Spectral curl of the extended circulation vector."""
    return spectral.curl(state.grid, extended_circulation_field(state))


def helicity(state: SpectralState) -> float:
    """Integral of C . curl C over the torus."""
    g = state.grid
    c = extended_circulation_field(state)
    w = spectral.curl(g, c)
    return float(integral(g, np.einsum("a...,a...->...", c, w)))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def vorticity_residual(states: Sequence[SpectralState], sign: int) -> tuple[np.ndarray, np.ndarray]:
    """L2 norms of d_t w + sign * curl(v x w) at interior snapshots, with the
    time derivative by central differences (endpoints dropped)."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    times = np.array([s.t for s in states])
    if len(states) < 3:
        raise ValueError("need at least 3 snapshots for central differences")
    h = _check_uniform(times)
    g = states[0].grid
    omegas = [extended_vorticity(s) for s in states]
    norms = []
    for i in range(1, len(states) - 1):
        dw = (omegas[i + 1] - omegas[i - 1]) / (2.0 * h)
        vxw = _cross(states[i].v, omegas[i])
        vxw = inverse(g, dealias(g, forward(g, vxw)))
        res = dw + sign * spectral.curl(g, vxw)
        norms.append(spectral.l2_norm(g, res))
    return times[1:-1], np.array(norms)


# ---------------------------------------------------------------------------
# advected loops

def circle_loop(center: Sequence[float], radius: float, n_markers: int = 64) -> np.ndarray:
    """n_markers points on a circle in the xy-plane (closure implicit)."""
    th = 2.0 * np.pi * np.arange(n_markers) / n_markers
    c = np.asarray(center, float)
    pts = np.zeros((n_markers, 3))
    pts[:, 0] = c[0] + radius * np.cos(th)
    pts[:, 1] = c[1] + radius * np.sin(th)
    pts[:, 2] = c[2] if len(c) > 2 else 0.0
    return pts


def advect_loop(states: Sequence[SpectralState], loop0: np.ndarray,
                substeps: int = 1, warn_factor: float = 50.0) -> np.ndarray:
    """Advect loop markers through the trajectory; returns shape (T, M, 3).

    Markers follow dx/dt = v(x, t) with RK4 over each snapshot interval,
    velocity linearly interpolated in time between snapshots (exact for steady
    flows; unsteady flows see an O(cadence^2) interpolation floor).  Marker
    positions stay unwrapped in R^3 so circulation segments are continuous.
    """
    loop0 = np.asarray(loop0, float)
    if loop0.ndim != 2 or loop0.shape[1] != 3 or loop0.shape[0] < 16:
        raise ValueError("loop must be an (M, 3) array with M >= 16")
    g = states[0].grid
    seg0 = np.max(np.linalg.norm(np.roll(loop0, -1, axis=0) - loop0, axis=1))
    warned = False

    def vel(w0: float, v0: np.ndarray, v1: np.ndarray, pts: np.ndarray) -> np.ndarray:
        blend = (1.0 - w0) * v0 + w0 * v1
        return evaluate_at_points(g, blend, pts).T

    loops = [loop0.copy()]
    x = loop0.copy()
    for i in range(len(states) - 1):
        v0, v1 = states[i].v, states[i + 1].v
        h = (states[i + 1].t - states[i].t) / substeps
        span = states[i + 1].t - states[i].t
        for j in range(substeps):
            w = (j * h) / span if span > 0 else 0.0
            dw = h / span if span > 0 else 0.0
            k1 = vel(w, v0, v1, x)
            k2 = vel(w + 0.5 * dw, v0, v1, x + 0.5 * h * k1)
            k3 = vel(w + 0.5 * dw, v0, v1, x + 0.5 * h * k2)
            k4 = vel(w + dw, v0, v1, x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        seg = np.max(np.linalg.norm(np.roll(x, -1, axis=0) - x, axis=1))
        if not warned and seg0 > 0 and seg > warn_factor * seg0:
            warnings.warn("advected loop marker spacing degraded beyond "
                          f"{warn_factor:g}x the initial spacing",
                          LoopResolutionWarning)
            warned = True
        loops.append(x.copy())
    return np.stack(loops)


def loop_circulation(state: SpectralState, loop: np.ndarray) -> float:
    """Trapezoid quadrature of the closed line integral of C along the loop."""
    loop = np.asarray(loop, float)
    if loop.ndim != 2 or loop.shape[1] != 3 or loop.shape[0] < 16:
        raise ValueError("loop must be an (M, 3) array with M >= 16")
    c_field = extended_circulation_field(state)
    cvals = evaluate_at_points(state.grid, c_field, loop)  # (3, M)
    d = np.roll(loop, -1, axis=0) - loop
    c_mid = 0.5 * (cvals + np.roll(cvals, -1, axis=1))
    return float(np.einsum("am,ma->", c_mid, d))


# ---------------------------------------------------------------------------
# weak-form residuals

def _half_modes(dims: int, k_cut: int) -> list[tuple[int, ...]]:
    rng = range(-k_cut, k_cut + 1)
    modes = []
    if dims == 2:
        cand = [(i, j) for i in rng for j in rng]
    else:
        cand = [(i, j, l) for i in rng for j in rng for l in rng]
    for k in cand:
        # canonical half: keep k lexicographically above -k (conjugate partner)
        if k > tuple(-x for x in k):
            modes.append(k)
    return modes


def weak_residuals(states: Sequence[SpectralState], k_cut: int = 4) -> dict[str, float]:
    """Max residual of the four weak identities over trigonometric tests up to
    wavenumber k_cut, with trapezoid time quadrature over the snapshots.

    Tests are evaluated through low-mode Fourier coefficients of the raw
    product fields (exactly the grid quadrature against cos/sin tests).  The
    momentum residual is projected onto divergence-free test directions.
    Returns max |residual| per equation: keys div, momentum, q, p.
    """
    g = states[0].grid
    if k_cut > g.cutoff:
        raise ValueError(f"test cutoff {k_cut} exceeds dealiased band {g.cutoff}")
    times = np.array([s.t for s in states])
    _check_uniform(times)
    modes = _half_modes(g.dims, k_cut)
    vol = g.volume

    vhat_t, flux_mom, flux_q, flux_p, div_t = [], [], [], [], []
    qhat_t, phat_t = [], []
    for s in states:
        vhat = forward(g, s.v)
        qhat = forward(g, s.q)
        phat = forward(g, s.p)
        vv = forward(g, np.einsum("a...,b...->ab...", s.v, s.v))
        stress = forward(g, kernels.stress(gradient(g, qhat)))
        vq = forward(g, np.einsum("a...,m...->am...", s.v, s.q))
        vp = forward(g, np.einsum("a...,m...->am...", s.v, s.p))
        dfh = forward(g, bulk_gradient(s.q, s.params))

        vh = np.array([mode_coefficient(g, vhat, k) for k in modes])  # (K,3)
        qh = np.array([mode_coefficient(g, qhat, k) for k in modes])  # (K,5)
        ph = np.array([mode_coefficient(g, phat, k) for k in modes])
        vvh = np.array([mode_coefficient(g, vv, k) for k in modes])   # (K,3,3)
        ssh = np.array([mode_coefficient(g, stress, k) for k in modes])
        vqh = np.array([mode_coefficient(g, vq, k) for k in modes])   # (K,3,5)
        vph = np.array([mode_coefficient(g, vp, k) for k in modes])
        dfm = np.array([mode_coefficient(g, dfh, k) for k in modes])  # (K,5)

        kv = np.array([list(k) + [0] * (3 - len(k)) for k in modes], float)  # (K,3)
        k2 = np.einsum("ka,ka->k", kv, kv)

        div_t.append(np.abs(np.einsum("ka,ka->k", kv, vh)).max())
        flux_mom.append(-1j * np.einsum("ka,kab->kb", kv, vvh + ssh))
        flux_q.append(-1j * np.einsum("ka,kam->km", kv, vqh) + ph)
        flux_p.append(-1j * np.einsum("ka,kam->km", kv, vph) - dfm - k2[:, None] * qh)
        vhat_t.append(vh)
        qhat_t.append(qh)
        phat_t.append(ph)

    kv = np.array([list(k) + [0] * (3 - len(k)) for k in modes], float)
    k2 = np.einsum("ka,ka->k", kv, kv)

    def trapz_stack(series: list[np.ndarray]) -> np.ndarray:
        return np.trapezoid(np.stack(series), x=times, axis=0)

    r_mom = (vhat_t[-1] - vhat_t[0]) - trapz_stack(flux_mom)
    r_mom = r_mom - kv * np.einsum("ka,ka->k", kv, r_mom)[:, None] / k2[:, None]
    r_q = (qhat_t[-1] - qhat_t[0]) - trapz_stack(flux_q)
    r_p = (phat_t[-1] - phat_t[0]) - trapz_stack(flux_p)

    return {
        "div": vol * float(max(div_t)),
        "momentum": vol * float(np.abs(r_mom).max()),
        "q": vol * float(np.abs(r_q).max()),
        "p": vol * float(np.abs(r_p).max()),
    }


# ---------------------------------------------------------------------------
# defect estimation

def _l1_product_gap(g: Grid, a: np.ndarray, b: np.ndarray) -> float:
    """Entrywise L1 norm of a - b integrated over the torus."""
    diff = np.abs(a - b)
    while diff.ndim > g.dims:
        diff = diff.sum(axis=0)
    return float(integral(g, diff))


def defect_estimate(coarse: Sequence[SpectralState], fine: Sequence[SpectralState],
                    init_tol: float = 1e-8) -> DefectReport:
    """Estimate the defect measures of the coarse run against a resolved
    reference sharing its initial data and snapshot times.

    Per snapshot (coarse prolonged to the fine grid): the momentum defect
    density is |v (x) v - v_ref (x) v_ref| plus the elastic stress gap, the
    P-equation defect density is |v (x) P - v_ref (x) P_ref|, both integrated
    entrywise (L1 proxies for total-variation norms); the dissipation defect
    is the shifted-energy gap E_G[fine] - E_G[coarse], clamped at zero for the
    report.  ddi_constant is the sup over tau of the cumulative ratio.
    """
    tc = np.array([s.t for s in coarse])
    tf = np.array([s.t for s in fine])
    if len(coarse) != len(fine) or np.max(np.abs(tc - tf)) > 1e-10:
        raise ValueError("trajectories must share snapshot times")
    gc, gf = coarse[0].grid, fine[0].grid
    same_grid = gc.n == gf.n
    if not same_grid and gc.n > gf.n:
        raise ValueError("coarse trajectory must have the lower resolution")

    def lift(s: SpectralState) -> SpectralState:
        return s if same_grid else resample.prolong_state(s, gf.n)

    s0 = lift(coarse[0])
    scale = max(spectral.linf_norm(fine[0].v), spectral.linf_norm(fine[0].q),
                spectral.linf_norm(fine[0].p)) or 1.0
    gap0 = max(spectral.linf_norm(s0.v - fine[0].v),
               spectral.linf_norm(s0.q - fine[0].q),
               spectral.linf_norm(s0.p - fine[0].p))
    if gap0 > init_tol * scale:
        raise ValueError(f"initial data not shared: relative gap {gap0 / scale:.3e}")

    r1, r2, d_signed = [], [], []
    for sc, sf in zip(coarse, fine):
        sl = lift(sc)
        vv_c = np.einsum("a...,b...->ab...", sl.v, sl.v)
        vv_f = np.einsum("a...,b...->ab...", sf.v, sf.v)
        st_c = kernels.stress(gradient(gf, forward(gf, sl.q)))
        st_f = kernels.stress(gradient(gf, forward(gf, sf.q)))
        r1.append(_l1_product_gap(gf, vv_c, vv_f) + _l1_product_gap(gf, st_c, st_f))
        pm_c = tensor.to_matrix(sl.p)
        pm_f = tensor.to_matrix(sf.p)
        vp_c = np.einsum("a...,ij...->aij...", sl.v, pm_c)
        vp_f = np.einsum("a...,ij...->aij...", sf.v, pm_f)
        r2.append(_l1_product_gap(gf, vp_c, vp_f))
        d_signed.append(energy_breakdown(sf).e_total_g - energy_breakdown(sc).e_total_g)

    r1 = np.array(r1)
    r2 = np.array(r2)
    d_signed = np.array(d_signed)
    d = np.maximum(d_signed, 0.0)

    e0 = energy_breakdown(fine[0]).e_total_g
    num = _cumtrapz(r1 + r2, tc)
    den = _cumtrapz(d, tc)
    span = np.maximum(tc - tc[0], 1e-300)
    floor = 1e-13 * (1.0 + abs(e0))
    valid = den > floor * span
    if np.any(valid):
        ddi = float(np.max(num[valid] / den[valid]))
    elif np.all(num <= floor * span):
        ddi = 0.0
    else:
        ddi = float("inf")
    return DefectReport(times=tc, r1=r1, r2=r2, d=d, d_signed=d_signed,
                        ddi_constant=ddi)


# ---------------------------------------------------------------------------
# relative energy and the weak-strong check

def relative_energy(state: SpectralState, tilde: SpectralState) -> float:
    """Half the squared L2 distance in (v, P, grad Q) plus the convexity gap
    of the shifted potential; same grid and potential parameters required."""
    g = state.grid
    if tilde.grid != g:
        raise ValueError("grid mismatch: restrict/prolong before comparing")
    if tilde.params != state.params:
        raise ValueError("potential parameters differ between states")
    dv = state.v - tilde.v
    dp = state.p - tilde.p
    dgq = gradient(g, forward(g, state.q - tilde.q))
    quad = 0.5 * (np.einsum("a...,a...->...", dv, dv)
                  + np.einsum("m...,m...->...", dp, dp)
                  + np.einsum("am...,am...->...", dgq, dgq))
    gap = convexity_gap(state.q, tilde.q, state.params)
    return float(integral(g, quad + gap))


def lipschitz_norms(state: SpectralState) -> float:
    """1 + |grad v|_inf + |grad P|_inf + |Lap Q|_inf + |grad dG(Q)|_inf of a
    comparison state: the growth rate of the relative-energy envelope."""
    g = state.grid
    vhat = forward(g, state.v)
    phat = forward(g, state.p)
    qhat = forward(g, state.q)
    gv = spectral.linf_norm(gradient(g, vhat))
    gp = spectral.linf_norm(gradient(g, phat))
    lq = spectral.linf_norm(inverse(g, spectral.laplacian_hat(g, qhat)))
    dg = g_gradient(state.q, state.params)
    gdg = spectral.linf_norm(gradient(g, forward(g, dg)))
    return 1.0 + gv + gp + lq + gdg


def gronwall_check(coarse: Sequence[SpectralState], strong: Sequence[SpectralState],
                   c: float | None = None, tail_tol: float = 1e-10,
                   uniqueness_tol: float | None = None) -> RelativeEnergySeries:
    """Relative-energy series against a resolved comparison trajectory plus
    its exponential envelope (fitted growth constant when c is None).

    Refuses (ValueError) when the comparison run is not resolved: its spectral
    tail above |k| > n/4 must stay below tail_tol of the total.  When the
    initial relative energy is indistinguishable from zero the pass flag
    reverts to the coincidence test e_rel <= uniqueness_tol (default
    1e-6 * E_G(0)).
    """
    tc = np.array([s.t for s in coarse])
    ts = np.array([s.t for s in strong])
    if len(coarse) != len(strong) or np.max(np.abs(tc - ts)) > 1e-10:
        raise ValueError("trajectories must share snapshot times")
    gs = strong[0].grid
    tail = max(spectral.spectral_tail_fraction(gs, [s.v, s.q, s.p]) for s in strong)
    if tail > tail_tol:
        raise ValueError(f"comparison trajectory unresolved: spectral tail "
                         f"{tail:.3e} above |k| > n/4 exceeds {tail_tol:.1e}")

    same = coarse[0].grid.n == gs.n

    def lift(s: SpectralState) -> SpectralState:
        return s if same else resample.prolong_state(s, gs.n)

    e_rel = np.array([relative_energy(lift(sc), ss) for sc, ss in zip(coarse, strong)])
    lip = np.array([lipschitz_norms(ss) for ss in strong])
    cum = _cumtrapz(lip, ts)

    e0 = e_rel[0]
    e_ref = energy_breakdown(strong[0]).e_total_g
    floor = 1e-14 * (1.0 + abs(e_ref))
    if uniqueness_tol is None:
        uniqueness_tol = 1e-6 * max(e_ref, 1e-300)

    if e0 <= floor:
        envelope = e0 * np.exp((c or 0.0) * cum)
        passed = bool(np.max(e_rel) <= uniqueness_tol)
        c_fit = float(c or 0.0)
    else:
        if c is None:
            with np.errstate(divide="ignore"):
                ratios = np.log(np.maximum(e_rel[1:], 1e-300) / e0) / np.maximum(cum[1:], 1e-300)
            c_fit = float(max(0.0, np.max(ratios)))
        else:
            c_fit = float(c)
        envelope = e0 * np.exp(c_fit * cum)
        passed = bool(np.all(e_rel <= envelope * (1.0 + 1e-9) + floor))
    return RelativeEnergySeries(times=tc, e_rel=e_rel, envelope=envelope,
                                lipschitz=lip, c_fitted=c_fit, passed=passed,
                                tail_fraction=float(tail))


# ---------------------------------------------------------------------------
# per-step identity and record assembly

def momentum_power_identity(state: SpectralState) -> tuple[float, float]:
    """(int dv/dt . v, -int div(S) . v): equal when advection is energy-neutral
    after the Leray projection (discrete momentum weak identity)."""
    from .dynamics import rhs, stress_tensor  # deferred: avoid module cycle

    g = state.grid
    bundle = rhs(state)
    lhs = float(integral(g, np.einsum("a...,a...->...", bundle.dv, state.v)))
    s = stress_tensor(state)
    shat = forward(g, s)
    div_s = np.stack([
        inverse(g, sum(spectral.spectral_derivative(g, shat[a, b], a) for a in range(3)))
        for b in range(3)
    ])
    rhs_val = -float(integral(g, np.einsum("a...,a...->...", div_s, state.v)))
    # dq/dt and dp/dt pairings cancel in the energy; lhs pairs with the stress work.
    return lhs, rhs_val


def trajectory_records(states: Sequence[SpectralState],
                       loops: np.ndarray | None = None) -> list[DiagnosticsRecord]:
    """Assemble the full diagnostics table for a snapshot sequence."""
    records = [energy_breakdown(s) for s in states]
    for rec, s in zip(records, states):
        rec.helicity = helicity(s)
    records[0].balance_residual = 0.0
    if len(states) >= 2:
        try:
            _, r_g, _ = energy_balance_series(states)
        except ValueError:  # non-uniform cadence (t_end off the snapshot grid)
            pass
        else:
            for rec, r in zip(records, r_g):
                rec.balance_residual = float(r)
    if len(states) >= 3:
        try:
            _, plus = vorticity_residual(states, +1)
            _, minus = vorticity_residual(states, -1)
        except ValueError:
            pass
        else:
            for i, (rp, rm) in enumerate(zip(plus, minus)):
                records[i + 1].vort_res_plus = float(rp)
                records[i + 1].vort_res_minus = float(rm)
    if loops is not None:
        for rec, s, loop in zip(records, states, loops):
            rec.loop_circulation = loop_circulation(s, loop)
    return records
