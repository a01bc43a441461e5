"""Quartic bulk potential, its convexified shift, and the assumption audit.

The potential family is F(Q) = a/2 |Q|^2 + b/3 tr(Q^3) + c/4 |Q|^4 with c > 0,
and G(Q) = F(Q) + lam |Q|^2 is its shift.  The constrained gradient dF is the
traceless-symmetric projection of the matrix derivative; the eliminated trace
multiplier is lam_mult = -(b/3) tr(Q^2), exposed for inspection.

All value/gradient functions accept coefficient arrays of shape (5,) or
(5, ...) and broadcast pointwise (heavy paths go through qsflow.kernels).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels, tensor

__all__ = ["PotentialParams", "bulk_value", "bulk_gradient", "g_value",
           "g_gradient", "trace_multiplier", "convexity_gap",
           "ray_convexity_threshold", "AssumptionReport", "check_assumptions"]


@dataclass(frozen=True)
class PotentialParams:
    """Coefficients of the quartic potential plus audit parameters.

    lam is the convexity shift (diagnostics only; it never enters the
    dynamics), q < 5 and cbar > 0 parameterize the gradient-growth audit.
    """

    a: float = -0.3
    b: float = -4.0
    c: float = 4.0
    lam: float = 0.0
    q: float = 3.0
    cbar: float = 10.0

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"potential.c must be > 0, got {self.c}")
        if self.lam < 0:
            raise ValueError(f"potential.lambda must be >= 0, got {self.lam}")
        if not self.q < 5:
            raise ValueError(f"potential.q must be < 5, got {self.q}")
        if not self.cbar > 0:
            raise ValueError(f"potential.cbar must be > 0, got {self.cbar}")
        for name in ("a", "b", "c", "lam", "q", "cbar"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"potential.{name} must be finite")


def bulk_value(c: np.ndarray, p: PotentialParams) -> np.ndarray:
    """F(Q) pointwise."""
    return kernels.bulk_value(c, p.a, p.b, p.c)


def bulk_gradient(c: np.ndarray, p: PotentialParams) -> np.ndarray:
    """Constrained gradient dF(Q) = a Q + b (Q^2 - tr(Q^2)/3 I) + c|Q|^2 Q."""
    return kernels.bulk_gradient(c, p.a, p.b, p.c)


def g_value(c: np.ndarray, p: PotentialParams) -> np.ndarray:
    """G(Q) = F(Q) + lam |Q|^2."""
    q2 = np.einsum("i...,i...->...", c, c)
    return kernels.bulk_value(c, p.a, p.b, p.c) + p.lam * q2


def g_gradient(c: np.ndarray, p: PotentialParams) -> np.ndarray:
    """dG(Q) = dF(Q) + 2 lam Q."""
    return kernels.bulk_gradient(c, p.a, p.b, p.c) + 2.0 * p.lam * c


def trace_multiplier(c: np.ndarray, p: PotentialParams) -> np.ndarray:
    """The eliminated trace multiplier, -(b/3) tr(Q^2), as a scalar (field)."""
    return -(p.b / 3.0) * np.einsum("i...,i...->...", c, c)


def convexity_gap(c: np.ndarray, ctilde: np.ndarray, p: PotentialParams) -> np.ndarray:
    """G(Q) - dG(Qt):(Q - Qt) - G(Qt); nonnegative whenever G is convex."""
    lin = np.einsum("i...,i...->...", g_gradient(ctilde, p), c - ctilde)
    return g_value(c, p) - lin - g_value(ctilde, p)


def ray_convexity_threshold(p: PotentialParams) -> float:
    """Smallest lam making G convex along every ray t -> t U, |U| = 1.

    Along a ray, g(t) = (a/2 + lam) t^2 + (b/3) tr(U^3) t^3 + (c/4) t^4 and
    min_t g'' = (a + 2 lam) - b^2 s^2 / (3 c) with s = tr(U^3), |s| <= 1/sqrt(6)
    (uniaxial extremum).  Necessary for convexity; the sampling audit decides.
    """
    worst = p.b**2 * (1.0 / 6.0) / (3.0 * p.c)
    return max(0.0, 0.5 * (worst - p.a))


@dataclass
class AssumptionReport:
    """Outcome of the sampled audit of isotropy, shifted convexity, and growth."""

    n_samples: int
    radius: float
    seed: int
    a1_pass: bool
    a1_max_gap: float
    a1_witness: np.ndarray
    a2_pass: bool
    a2_min_midpoint_gap: float
    a2_min_value: float
    a2_witness: tuple[np.ndarray, np.ndarray]
    a2_ray_threshold: float
    a3_pass: bool
    a3_max_ratio: float
    a3_witness: np.ndarray
    params: PotentialParams = field(repr=False, default=PotentialParams())

    @property
    def all_pass(self) -> bool:
        return self.a1_pass and self.a2_pass and self.a3_pass

    def to_text(self) -> str:
        p = self.params
        lines = [
            f"potential.a: {p.a:.17g}",
            f"potential.b: {p.b:.17g}",
            f"potential.c: {p.c:.17g}",
            f"potential.lambda: {p.lam:.17g}",
            f"potential.q: {p.q:.17g}",
            f"potential.cbar: {p.cbar:.17g}",
            f"audit.n_samples: {self.n_samples}",
            f"audit.radius: {self.radius:.17g}",
            f"audit.seed: {self.seed}",
            f"isotropy.pass: {self.a1_pass}",
            f"isotropy.max_gap: {self.a1_max_gap:.6e}",
            f"isotropy.witness: {np.array2string(self.a1_witness, precision=6)}",
            f"convexity.pass: {self.a2_pass}",
            f"convexity.min_midpoint_gap: {self.a2_min_midpoint_gap:.6e}",
            f"convexity.min_value: {self.a2_min_value:.6e}",
            f"convexity.witness_a: {np.array2string(self.a2_witness[0], precision=6)}",
            f"convexity.witness_b: {np.array2string(self.a2_witness[1], precision=6)}",
            f"convexity.ray_lambda_threshold: {self.a2_ray_threshold:.17g}",
            f"growth.pass: {self.a3_pass}",
            f"growth.max_ratio: {self.a3_max_ratio:.6e}",
            f"growth.witness: {np.array2string(self.a3_witness, precision=6)}",
            f"all_pass: {self.all_pass}",
        ]
        return "\n".join(lines) + "\n"


def check_assumptions(p: PotentialParams, n_samples: int = 10_000,
                      radius: float = 10.0, seed: int = 0) -> AssumptionReport:
    """Sampled audit of isotropy, shifted convexity, and gradient growth.

    Advisory: sampling can only refute, not certify; the ray threshold in the
    report is the closed-form necessary lower bound on lam.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not radius > 0:
        raise ValueError("radius must be > 0")
    rng = np.random.default_rng(seed)

    # Isotropy: F(Q) vs F(R Q R^T) for Haar-random orthogonal R.
    qs = tensor.random_coefficients(rng, n_samples, radius)
    f_qs = bulk_value(qs, p)
    mats = tensor.to_matrix(qs)
    rotated = np.empty_like(qs)
    for i in range(n_samples):
        r = tensor.random_rotation(rng)
        rotated[:, i] = tensor.from_matrix(r @ mats[:, :, i] @ r.T)
    gaps = np.abs(f_qs - bulk_value(rotated, p)) / (1.0 + np.abs(f_qs))
    i1 = int(np.argmax(gaps))
    a1_pass = bool(gaps[i1] <= 1e-10)

    # Shifted convexity: midpoint gaps on sample pairs plus nonnegativity.
    qa = tensor.random_coefficients(rng, n_samples, radius)
    qb = tensor.random_coefficients(rng, n_samples, radius)
    g_mid = g_value(0.5 * (qa + qb), p)
    mid_gap = 0.5 * (g_value(qa, p) + g_value(qb, p)) - g_mid
    i2 = int(np.argmin(mid_gap))
    values = np.concatenate([g_value(qa, p), g_value(qb, p), g_mid])
    min_value = float(values.min())
    a2_pass = bool(mid_gap[i2] >= -1e-12 and min_value >= -1e-12)

    # Gradient growth: |dF(Q)| <= cbar (1 + |Q|^q).
    grads = bulk_gradient(qs, p)
    ratios = np.sqrt(np.einsum("in,in->n", grads, grads))
    ratios /= p.cbar * (1.0 + tensor.frobenius_norm(qs) ** p.q)
    i3 = int(np.argmax(ratios))
    a3_pass = bool(ratios[i3] <= 1.0)

    return AssumptionReport(
        n_samples=n_samples, radius=radius, seed=seed,
        a1_pass=a1_pass, a1_max_gap=float(gaps[i1]), a1_witness=qs[:, i1].copy(),
        a2_pass=a2_pass, a2_min_midpoint_gap=float(mid_gap[i2]),
        a2_min_value=min_value,
        a2_witness=(qa[:, i2].copy(), qb[:, i2].copy()),
        a2_ray_threshold=ray_convexity_threshold(p),
        a3_pass=a3_pass, a3_max_ratio=float(ratios[i3]), a3_witness=qs[:, i3].copy(),
        params=p,
    )
