"""Audits of the static geometry bounds: sphere mean curvature and
volume ratios for concentric, doubled, and shifted balls.

Every audit returns a BoundReport.  The explicit ones compare quantities
computed from the manifold against the closed-form bounds; when the
pointwise curvature hypothesis fails on the sampled domain the check is
recorded as vacuous rather than failed.
"""

from __future__ import annotations

import numpy as np

from ..comparison import (
    cross_center_ratio_bound,
    doubling_bound,
    laplacian_comparison_pair,
    positive_cap,
    volume_ratio_bound,
)
from ..errors import AuditError
from .context import AuditContext
from .report import BoundReport, explicit_report, pair_samples, vacuous_report

__all__ = [
    "audit_laplacian_comparison",
    "audit_volume_comparison",
    "audit_doubling",
    "audit_cross_center",
]


def _usable_radius(ctx: AuditContext) -> float:
    """Largest ball radius around the audit center that stays inside the
    represented domain."""
    man = ctx.manifold
    if man.domain.kind == "pole_cap":
        return man.domain.r_max
    return 0.5 * man.domain.length


def audit_laplacian_comparison(ctx: AuditContext, radii=None) -> BoundReport:
    """(n-1) f'/f - phi'  against the background mean-curvature bound."""
    man = ctx.manifold
    if man.domain.kind != "pole_cap":
        raise AuditError("mean-curvature audit needs a radial distance; pole cap only")
    if not ctx.hypothesis_ok():
        return vacuous_report(
            "laplacian-comparison", ctx.scenario, ctx.hypothesis_margin()
        )
    params = ctx.params
    if radii is None:
        radii = ctx.grid.nodes
    radii = np.asarray(radii, dtype=float)
    cK = params.c * params.K
    if cK > 0:
        radii = radii[radii < 0.999 * params.b * np.pi / np.sqrt(cK)]
    # keep away from a far pole where f -> 0
    radii = radii[man.f(radii) > 1e-8]
    radii = radii[radii > 0]
    if radii.size == 0:
        return vacuous_report(
            "laplacian-comparison", ctx.scenario, ctx.hypothesis_margin(),
            notes={"reason": "validity window contains no sample radii"},
        )
    lhs, rhs = laplacian_comparison_pair(man, params, radii)
    return explicit_report(
        "laplacian-comparison", ctx.scenario, pair_samples(lhs, rhs),
        notes={"hypothesis_margin": ctx.hypothesis_margin()},
    )


def _default_radius_pairs(ctx: AuditContext):
    top = _usable_radius(ctx)
    if ctx.params.K > 0:
        top = min(top, positive_cap(ctx.params))
    fracs = [(0.1, 0.3), (0.2, 0.5), (0.25, 0.9), (0.5, 0.99), (0.05, 0.95)]
    return [(lo * top, hi * top) for lo, hi in fracs]


def audit_volume_comparison(ctx: AuditContext, pairs=None) -> BoundReport:
    """V(R)/V(r) against the background volume-ratio bound."""
    if not ctx.hypothesis_ok():
        return vacuous_report("volume-ratio", ctx.scenario, ctx.hypothesis_margin())
    man, params = ctx.manifold, ctx.params
    if pairs is None:
        pairs = _default_radius_pairs(ctx)
    center = ctx.audit_center
    lhs, rhs, labels = [], [], []
    for r, R in pairs:
        vr = man.ball_volume(r, center)
        if vr <= 0:
            continue
        lhs.append(man.ball_volume(R, center) / vr)
        rhs.append(volume_ratio_bound(params, r, R))
        labels.append(f"r={r:.4g},R={R:.4g}")
    if not lhs:
        return vacuous_report(
            "volume-ratio", ctx.scenario, ctx.hypothesis_margin(),
            notes={"reason": "no admissible radius pairs"},
        )
    return explicit_report(
        "volume-ratio", ctx.scenario, pair_samples(lhs, rhs, labels),
        notes={"hypothesis_margin": ctx.hypothesis_margin()},
    )


def audit_doubling(ctx: AuditContext, radii=None) -> BoundReport:
    """V(2R)/V(R) against the polynomial-exponential doubling bound."""
    if not ctx.hypothesis_ok():
        return vacuous_report("volume-doubling", ctx.scenario, ctx.hypothesis_margin())
    man, params = ctx.manifold, ctx.params
    if radii is None:
        top = 0.5 * _usable_radius(ctx)
        radii = [f * top for f in (0.2, 0.4, 0.7, 0.95)]
    center = ctx.audit_center
    lhs, rhs, labels = [], [], []
    for R in radii:
        vR = man.ball_volume(R, center)
        if vR <= 0:
            continue
        lhs.append(man.ball_volume(2.0 * R, center) / vR)
        rhs.append(doubling_bound(params, R))
        labels.append(f"R={R:.4g}")
    if not lhs:
        return vacuous_report(
            "volume-doubling", ctx.scenario, ctx.hypothesis_margin(),
            notes={"reason": "no admissible radii"},
        )
    return explicit_report(
        "volume-doubling", ctx.scenario, pair_samples(lhs, rhs, labels),
        notes={"hypothesis_margin": ctx.hypothesis_margin()},
    )


def _cross_center_pairs(ctx: AuditContext):
    """Pairs (x, y) of computable ball centers with positive separation."""
    man = ctx.manifold
    if man.domain.kind == "pole_cap":
        if not man.has_far_pole:
            raise AuditError(
                "cross-center audit needs two computable centers; this cap has one pole"
            )
        return [(0.0, man.domain.r_max)]
    mid = ctx.audit_center
    span = 0.5 * man.domain.length
    return [
        (mid, mid + 0.3 * span),
        (mid, mid - 0.55 * span),
        (mid + 0.2 * span, mid - 0.2 * span),
    ]


def audit_cross_center(ctx: AuditContext, s_fracs=(0.15, 0.3)) -> BoundReport:
    """V_x(s)/V_y(s) for shifted centers against the shifted-ball bound."""
    if not ctx.hypothesis_ok():
        return vacuous_report(
            "volume-cross-center", ctx.scenario, ctx.hypothesis_margin()
        )
    man, params = ctx.manifold, ctx.params
    centers = _cross_center_pairs(ctx)
    top = _usable_radius(ctx)
    if params.K > 0:
        top = min(top, positive_cap(ctx.params))
    lhs, rhs, labels = [], [], []
    for x, y in centers:
        d = float(man.distance(x, y))
        for frac in s_fracs:
            s = frac * top
            vx = man.ball_volume(s, x)
            vy = man.ball_volume(s, y)
            if min(vx, vy) <= 0:
                continue
            bound = cross_center_ratio_bound(params, s, d)
            lhs.extend([vx / vy, vy / vx])
            rhs.extend([bound, bound])
            labels.extend(
                [f"s={s:.4g},d={d:.4g}", f"s={s:.4g},d={d:.4g},swapped"]
            )
    if not lhs:
        return vacuous_report(
            "volume-cross-center", ctx.scenario, ctx.hypothesis_margin(),
            notes={"reason": "no admissible center pairs"},
        )
    return explicit_report(
        "volume-cross-center", ctx.scenario, pair_samples(lhs, rhs, labels),
        notes={"hypothesis_margin": ctx.hypothesis_margin()},
    )
