"""Mean-value and Harnack audits on space-time cylinders.

Cylinders follow the standard split: over Q = B(R) x [t0 - R^2, t0] the
sup of u^p on the shrunken cylinder is weighed against the space-time
integral; the Harnack quotient compares the sup over an early window
Q_- = B(dR) x [t0 - s R^2, t0 - r R^2] with the inf over the late window
Q_+ = B(dR) x [t0 - e R^2, t0], with the fractions e = (1+d)/4,
r = (3-d)/4, s = (3+d)/4 tied to the ball shrink factor d.

Caloric test solutions default to spectral kernel columns (rotationally
symmetric positive solutions); any map t -> full-grid field works.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AuditError, ParameterError
from .context import AuditContext
from .report import BoundReport, empirical_report

__all__ = [
    "CylinderSpec",
    "audit_mean_value",
    "audit_harnack",
    "harnack_constant",
    "mean_value_constant",
    "kernel_solutions",
]


@dataclass(frozen=True)
class CylinderSpec:
    """Space-time cylinder B(center, R) x [t0 - R^2, t0] with shrink delta."""

    R: float
    t0: float
    center: float
    delta: float = 0.8

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ParameterError("cylinder shrink factor must lie in (0, 1)")
        if self.R <= 0:
            raise ParameterError("cylinder radius must be positive")
        if self.t0 - self.R * self.R <= 0:
            raise ParameterError("cylinder must start at positive time")

    @property
    def eps_frac(self) -> float:
        return (1.0 + self.delta) / 4.0

    @property
    def rho_frac(self) -> float:
        return (3.0 - self.delta) / 4.0

    @property
    def sigma_frac(self) -> float:
        return (3.0 + self.delta) / 4.0

    @classmethod
    def standard(cls, ctx: AuditContext, R: float | None = None,
                 t0: float | None = None, delta: float = 0.8) -> "CylinderSpec":
        if R is None:
            man = ctx.manifold
            usable = man.domain.r_max if man.domain.kind == "pole_cap" \
                else 0.5 * man.domain.length
            R = 0.3 * usable
        if t0 is None:
            t0 = 1.05 * R * R
        return cls(R=R, t0=t0, center=ctx.audit_center, delta=delta)


def kernel_solutions(ctx: AuditContext, cyl: CylinderSpec, count: int = 2):
    """Positive caloric solutions: l=0 kernel columns from sources inside
    the ball.  Returns a list of maps t -> field on the full grid."""
    kern = ctx.kernel()
    grid = ctx.grid
    offsets = np.linspace(0.0, 0.5 * cyl.R, count)
    sources = []
    for off in offsets:
        i = grid.nearest_node(cyl.center + off)
        if i not in sources:
            sources.append(i)
    return [
        (lambda t, i=i: kern.column(i, t)) for i in sources
    ]


def harnack_constant(ctx: AuditContext, cyl: CylinderSpec, u_fn,
                     n_time: int = 6) -> float:
    """sup over the early window / inf over the late window, both on B(delta R)."""
    ball = ctx.grid.ball_nodes(cyl.delta * cyl.R, cyl.center)
    R2 = cyl.R * cyl.R
    t_minus = np.linspace(cyl.t0 - cyl.sigma_frac * R2,
                          cyl.t0 - cyl.rho_frac * R2, n_time)
    t_plus = np.linspace(cyl.t0 - cyl.eps_frac * R2, cyl.t0, n_time)
    sup_minus = max(float(np.max(u_fn(t)[ball])) for t in t_minus)
    inf_plus = min(float(np.min(u_fn(t)[ball])) for t in t_plus)
    if inf_plus < 1e-300:
        raise AuditError("Harnack window touches nonpositive values")
    return sup_minus / inf_plus


def mean_value_constant(ctx: AuditContext, cyl: CylinderSpec, u_fn, p: float,
                        n_time: int = 13) -> float:
    """sup_{Q_delta} u^p  *  (1-delta)^{2+nu} R^2 V  /  iint_Q u^p dmu dt."""
    grid = ctx.grid
    R2 = cyl.R * cyl.R
    ball = grid.ball_nodes(cyl.R, cyl.center)
    ball_d = grid.ball_nodes(cyl.delta * cyl.R, cyl.center)
    V = float(np.sum(grid.mu[ball]))

    times = np.linspace(cyl.t0 - R2, cyl.t0, n_time)
    slab = np.array([
        float(np.sum(u_fn(t)[ball] ** p * grid.mu[ball])) for t in times
    ])
    integral = float(np.trapezoid(slab, times))
    if integral <= 0:
        raise AuditError("degenerate space-time integral in mean-value audit")

    t_delta = np.linspace(cyl.t0 - cyl.delta * R2, cyl.t0, n_time)
    sup_d = max(float(np.max(u_fn(t)[ball_d] ** p)) for t in t_delta)
    nu = ctx.params.nu
    return sup_d * (1.0 - cyl.delta) ** (2.0 + nu) * R2 * V / integral


def audit_harnack(ctx: AuditContext, cyl: CylinderSpec | None = None,
                  solutions=None) -> BoundReport:
    if cyl is None:
        cyl = CylinderSpec.standard(ctx)
    if solutions is None:
        solutions = kernel_solutions(ctx, cyl)
    consts = [harnack_constant(ctx, cyl, u) for u in solutions]
    c0 = max(consts)

    fine = ctx.refined()
    cyl_f = CylinderSpec(R=cyl.R, t0=cyl.t0, center=cyl.center, delta=cyl.delta)
    sols_f = kernel_solutions(fine, cyl_f, count=len(consts))
    c1 = max(harnack_constant(fine, cyl_f, u) for u in sols_f)

    K = ctx.k_eps_ball(2.0 * cyl.R, center=cyl.center)
    return empirical_report(
        "harnack", ctx.scenario,
        [{"R": cyl.R, "t0": cyl.t0, "constant": c} for c in consts],
        constant=c0,
        refined_constant=c1,
        notes={
            "delta": cyl.delta,
            "sqrt_keps_R": float(np.sqrt(K) * cyl.R),
        },
    )


def audit_mean_value(ctx: AuditContext, cyl: CylinderSpec | None = None,
                     solutions=None, powers=(1.0, 2.0)) -> BoundReport:
    if cyl is None:
        cyl = CylinderSpec.standard(ctx)
    if solutions is None:
        solutions = kernel_solutions(ctx, cyl)
    samples = []
    best = 0.0
    for p in powers:
        for u in solutions:
            c = mean_value_constant(ctx, cyl, u, p)
            samples.append({"p": p, "constant": c})
            best = max(best, c)

    fine = ctx.refined()
    sols_f = kernel_solutions(fine, cyl, count=len(solutions))
    c1 = max(
        mean_value_constant(fine, cyl, u, p) for p in powers for u in sols_f
    )
    return empirical_report(
        "mean-value", ctx.scenario, samples,
        constant=best,
        refined_constant=c1,
        notes={"delta": cyl.delta, "R": cyl.R},
    )
