"""Neumann Poincare and local Sobolev audits on metric balls.

The Poincare check is explicit: the sharpest constant over a span of low
Neumann eigenfunctions of the double ball is compared with the closed
form 2^{n+3} (2b/a)^{1/c} exp(sqrt(K/c) 2R/a) R^2.  The Sobolev check is
empirical: the best constant over a bump-plus-eigenfunction family must
be finite, positive, and resolution stable.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh

from ..comparison import BOUND_SAT, EXP_SAT
from ..errors import ConfigError
from ..operators import mode_spectrum
from .context import AuditContext
from .report import (
    BoundReport,
    empirical_report,
    explicit_report,
    pair_samples,
    vacuous_report,
)

__all__ = ["audit_poincare", "audit_sobolev", "poincare_empirical_constant",
           "sobolev_empirical_constant"]

_POINCARE_MODES = 40
_SOBOLEV_EIGS = 20
_BUMP_POWERS = (1, 2, 3, 4)


def _default_ball_radius(ctx: AuditContext, frac: float) -> float:
    man = ctx.manifold
    if man.domain.kind == "pole_cap":
        usable = man.domain.r_max
    else:
        usable = 0.5 * man.domain.length
    return frac * usable


def poincare_empirical_constant(ctx: AuditContext, R: float,
                                n_modes: int = _POINCARE_MODES) -> float:
    """max of int_{B_R}|u - mean|^2 dmu / int_{B_2R}|grad u|^2 dmu over the
    span of low Neumann eigenfunctions of B_2R, block by angular mode."""
    man = ctx.manifold
    l_top = 4 if man.domain.kind == "pole_cap" else 0
    center = ctx.audit_center
    best = 0.0
    for l in range(l_top + 1):
        op, sub = ctx.ball_operator(2.0 * R, l=l, outer="neumann", center=center)
        k = min(n_modes + (1 if l == 0 else 0), sub.M)
        eigs = mode_spectrum(op, k_max=k)
        lam, vec = eigs.values, eigs.vectors
        if l == 0:
            lam, vec = lam[1:], vec[:, 1:]
        if lam.size == 0:
            continue
        ctx.require(float(lam[0]) > 0.0, "nonpositive energy in Poincare block")
        inner = man.distance(sub.nodes, center) <= R
        mu_R = np.where(inner, sub.mu, 0.0)
        if l == 0:
            means = (mu_R @ vec) / np.sum(mu_R)
            vc = vec - means[None, :]
        else:
            vc = vec
        A = vc.T @ (mu_R[:, None] * vc)
        theta = eigh(A, np.diag(lam), eigvals_only=True)
        best = max(best, float(theta[-1]))
    return best


def audit_poincare(ctx: AuditContext, R: float | None = None,
                   n_modes: int = _POINCARE_MODES) -> BoundReport:
    if R is None:
        R = _default_ball_radius(ctx, 0.25)
    if R < 4.0 * ctx.grid.h:
        raise ConfigError(f"Poincare ball R={R} under 4 grid cells")
    if not ctx.hypothesis_ok():
        return vacuous_report("poincare-neumann", ctx.scenario, ctx.hypothesis_margin())
    p = ctx.params
    n = ctx.manifold.n
    K2 = ctx.k_eps_ball(2.0 * R, center=ctx.audit_center)
    rhs = min(
        2.0 ** (n + 3)
        * (2.0 * p.b / p.a) ** (1.0 / p.c)
        * np.exp(min(np.sqrt(K2 / p.c) * 2.0 * R / p.a, EXP_SAT))
        * R * R,
        BOUND_SAT,
    )
    lhs = poincare_empirical_constant(ctx, R, n_modes=n_modes)
    rep = explicit_report(
        "poincare-neumann", ctx.scenario, pair_samples([lhs], [rhs], [f"R={R:.4g}"]),
        notes={"R": R, "k_eps_2R": K2, "hypothesis_margin": ctx.hypothesis_margin()},
    )
    rep.empirical_constant = lhs
    return rep


def _sobolev_family(ctx: AuditContext, R: float, n_eigs: int):
    """Bump powers and low Dirichlet eigenfunctions on the ball sub-grid."""
    op, sub = ctx.ball_operator(R, l=0, outer="dirichlet", center=ctx.audit_center)
    d = ctx.manifold.distance(sub.nodes, ctx.audit_center)
    fams = []
    for k in _BUMP_POWERS:
        u = np.clip(1.0 - (d / R) ** 2, 0.0, None) ** k
        fams.append(u)
    eigs = mode_spectrum(op, k_max=min(n_eigs, sub.M))
    for j in range(eigs.values.size):
        fams.append(eigs.vectors[:, j])
    return op, sub, fams


def sobolev_empirical_constant(ctx: AuditContext, R: float,
                               n_eigs: int = _SOBOLEV_EIGS) -> float:
    """Best constant in  |u|_{2nu/(nu-2)}^2 <= C R^2 V^{-2/nu} (E(u) + R^{-2}|u|_2^2)."""
    nu = ctx.params.nu
    q = 2.0 * nu / (nu - 2.0)
    op, sub, fams = _sobolev_family(ctx, R, n_eigs)
    V = float(np.sum(sub.mu))
    best = 0.0
    for u in fams:
        norm_q = float(np.sum(np.abs(u) ** q * sub.mu)) ** (1.0 / q)
        l2sq = float(np.sum(u * u * sub.mu))
        energy = -float(np.dot(op.apply(u) * u, sub.mu))
        denom = R * R * V ** (-2.0 / nu) * (energy + l2sq / (R * R))
        if denom <= 0:
            continue
        best = max(best, norm_q * norm_q / denom)
    return best


def audit_sobolev(ctx: AuditContext, R: float | None = None,
                  n_eigs: int = _SOBOLEV_EIGS) -> BoundReport:
    if R is None:
        R = _default_ball_radius(ctx, 0.4)
    c0 = sobolev_empirical_constant(ctx, R, n_eigs=n_eigs)
    c1 = sobolev_empirical_constant(ctx.refined(), R, n_eigs=n_eigs)
    return empirical_report(
        "sobolev-ball", ctx.scenario,
        [{"R": R, "constant": c0}],
        constant=c0,
        refined_constant=c1,
        notes={"R": R, "nu": ctx.params.nu},
    )
